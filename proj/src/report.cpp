#include "srde/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace srde {

double round_sig(double v, int digits) {
  if (!std::isfinite(v) || v == 0.0) return v;
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return std::strtod(buf, nullptr);
}

json json_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return round_sig(v);
}

std::string timestamp_iso() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
  return buf;
}

void write_json(const json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream os(out_path);
  if (!os) throw std::ios_base::failure("cannot open '" + out_path + "' for writing");
  os << j.dump(2) << "\n";
  if (!os) throw std::ios_base::failure("write to '" + out_path + "' failed");
}

namespace {

void write_rows(std::ostream& os, const std::vector<std::string>& header,
                const std::vector<std::vector<double>>& rows) {
  for (std::size_t i = 0; i < header.size(); ++i)
    os << header[i] << (i + 1 < header.size() ? "," : "\n");
  char buf[48];
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.12g", row[i]);
      os << buf << (i + 1 < row.size() ? "," : "\n");
    }
  }
}

}  // namespace

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  if (path.empty()) {
    write_rows(std::cout, header, rows);
    return;
  }
  std::ofstream os(path);
  if (!os) throw std::ios_base::failure("cannot open '" + path + "' for writing");
  write_rows(os, header, rows);
  if (!os) throw std::ios_base::failure("write to '" + path + "' failed");
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const GridSpec& grid) {
  require_trajectory_shape(traj, grid, "write_trajectory_csv");
  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<std::size_t>(grid.n_t + 1) * grid.n_x);
  for (int k = 0; k <= grid.n_t; ++k)
    for (int i = 0; i < grid.n_x; ++i)
      rows.push_back({static_cast<double>(k), static_cast<double>(i), traj(k, i)});
  write_csv(path, {"t_index", "x_index", "value"}, rows);
}

void write_control_csv(const std::string& path, const Eigen::ArrayXXd& values,
                       const GridSpec& grid) {
  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<std::size_t>(grid.n_t) * grid.n_x);
  for (int k = 0; k < grid.n_t; ++k)
    for (int i = 0; i < grid.n_x; ++i)
      rows.push_back({static_cast<double>(k), static_cast<double>(i), values(k, i)});
  write_csv(path, {"t_index", "x_index", "value"}, rows);
}

Eigen::ArrayXXd read_control_csv(const std::string& path, const GridSpec& grid) {
  std::ifstream is(path);
  if (!is) throw std::ios_base::failure("cannot open control file '" + path + "'");
  Eigen::ArrayXXd values = Eigen::ArrayXXd::Zero(grid.n_t, grid.n_x);
  std::string line;
  if (!std::getline(is, line))
    throw std::ios_base::failure("control file '" + path + "' is empty");
  long parsed = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell;
    double fields[3];
    for (int c = 0; c < 3; ++c) {
      if (!std::getline(ss, cell, ','))
        throw std::ios_base::failure("control file '" + path + "': malformed row '" + line + "'");
      fields[c] = std::strtod(cell.c_str(), nullptr);
    }
    const int k = static_cast<int>(fields[0]);
    const int i = static_cast<int>(fields[1]);
    if (k < 0 || k >= grid.n_t || i < 0 || i >= grid.n_x)
      throw std::ios_base::failure("control file '" + path + "': index out of range in '" +
                                   line + "'");
    values(k, i) = fields[2];
    ++parsed;
  }
  if (parsed == 0)
    throw std::ios_base::failure("control file '" + path + "' has no data rows");
  return values;
}

json grid_json(const GridSpec& grid) {
  return {{"T", json_number(grid.T)},
          {"n_t", grid.n_t},
          {"half_width", json_number(grid.half_width)},
          {"n_x", grid.n_x},
          {"periodic_extension", grid.periodic_extension}};
}

}  // namespace srde
