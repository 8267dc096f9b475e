#include <optional>
#include <string>

#include "tstab/csv.hpp"
#include "tstab/error.hpp"
#include "tstab/motion.hpp"

namespace tstab::motion {

ColumnMap default_column_map() {
  return {{"t", Column::Time}, {"x", Column::X}, {"y", Column::Y}, {"z", Column::Z}};
}

Trajectory parse_trajectory(std::string_view csv_text, const ColumnMap& columns) {
  const auto table = csv::parse(csv_text);

  std::optional<std::size_t> index[4];
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    const auto it = columns.find(table.header[c]);
    if (it != columns.end()) index[static_cast<int>(it->second)] = c;
  }
  static constexpr const char* kRoleNames[] = {"t", "x", "y", "z"};
  for (int r = 0; r < 4; ++r) {
    if (!index[r]) {
      throw Error(Errc::MissingColumn, std::string("no column mapped to '") + kRoleNames[r] + "'");
    }
  }

  std::vector<Sample> samples;
  samples.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    auto field = [&](int role) -> double {
      const auto c = *index[role];
      if (c >= row.size()) {
        throw Error(Errc::Parse, "row " + std::to_string(i + 2) + " is missing fields");
      }
      return csv::parse_number(row[c]);
    };
    samples.push_back({field(0), Vec3(field(1), field(2), field(3))});
  }
  return Trajectory::from_samples(std::move(samples));
}

Trajectory load_trajectory(const std::filesystem::path& path, const ColumnMap& columns) {
  return parse_trajectory(csv::read_file(path), columns);
}

std::string format_trajectory(const Trajectory& traj) {
  std::string out = "t,x,y,z\n";
  for (const auto& s : traj.samples()) {
    out += csv::format_number(s.t);
    for (int k = 0; k < 3; ++k) {
      out += ',';
      out += csv::format_number(s.anchor_pos[k]);
    }
    out += '\n';
  }
  return out;
}

void write_trajectory(const std::filesystem::path& path, const Trajectory& traj) {
  csv::write_file(path, format_trajectory(traj));
}

std::string format_cable_series(const CableSeries& series) {
  std::string out = "t,length_m,velocity_mps\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out += csv::format_number(series.time(i));
    out += ',';
    out += csv::format_number(series.length[i]);
    out += ',';
    out += csv::format_number(series.velocity[i]);
    out += '\n';
  }
  return out;
}

}  // namespace tstab::motion
