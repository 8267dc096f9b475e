#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "tstab/device.hpp"
#include "tstab/motion.hpp"
#include "tstab/signal.hpp"

namespace tstab {

enum class Side { Left, Right };

/// One cable: its anchors plus the rest position of the tracked shoulder point.
struct SideConfig {
  motion::AnchorConfig anchor;
  motion::Vec3 start_pos = motion::Vec3::Zero();
};

struct RunConfig {
  device::DeviceParams device;
  signal::DetectorSpec detector;
  signal::SgSpec sg;
  SideConfig left;
  SideConfig right;
  double rate = motion::kCanonicalRate;  // Hz
  double jitter = 0.0;                   // m, uniform marker jitter for synthetic scenarios

  RunConfig();
  void validate() const;
  const SideConfig& side(Side s) const { return s == Side::Left ? left : right; }
};

/// Parses the `[section]` / `key = value` document written by format_config.
/// Keys absent from the document keep their defaults; unknown keys are errors.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);
std::string format_config(const RunConfig& config);

}  // namespace tstab
