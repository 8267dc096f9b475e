#pragma once

#include <vector>

#include "tstab/device.hpp"
#include "tstab/motion.hpp"
#include "tstab/signal.hpp"

namespace tstab {

struct PipelineConfig {
  motion::AnchorConfig anchor;
  signal::SgSpec sg;
  signal::DetectorSpec detector;
  device::DeviceParams device;
};

struct PipelineResult {
  motion::CableSeries cable;              // raw geometry
  std::vector<double> filtered_length;    // SG-smoothed length
  std::vector<double> velocity;           // derivative of filtered length
  std::vector<signal::DetectionEvent> detections;
  device::Simulation simulation;
};

/// geometry -> SG filter -> differentiate -> detector and device.
PipelineResult run_pipeline(const motion::Trajectory& traj, const PipelineConfig& config);

}  // namespace tstab
