#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "srde/grid.hpp"

namespace srde {

using json = nlohmann::json;

/// Rounds to 12 significant decimal digits; serialized reports are then
/// reproducible byte-for-byte across runs.
double round_sig(double v, int digits = 12);

/// JSON value for a double: rounded, with non-finite values as strings.
json json_number(double v);

std::string timestamp_iso();

/// Writes JSON to the path, or to stdout when the path is empty.
/// Throws std::ios_base::failure on I/O errors.
void write_json(const json& j, const std::string& out_path);

/// CSV with a header row; one formatted row per entry.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// Trajectory as (t_index, x_index, value) rows, the layout described in
/// FORMATS.md.
void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const GridSpec& grid);

/// Control field as (t_index, x_index, value) rows.
void write_control_csv(const std::string& path, const Eigen::ArrayXXd& values,
                       const GridSpec& grid);

/// Reads a control tabulation written by write_control_csv.
Eigen::ArrayXXd read_control_csv(const std::string& path, const GridSpec& grid);

/// Grid echo for report provenance.
json grid_json(const GridSpec& grid);

}  // namespace srde
