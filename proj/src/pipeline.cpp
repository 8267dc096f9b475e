#include "tstab/pipeline.hpp"

namespace tstab {

PipelineResult run_pipeline(const motion::Trajectory& traj, const PipelineConfig& config) {
  config.anchor.validate();
  config.device.validate();
  config.detector.validate();

  PipelineResult r;
  r.cable = motion::trajectory_to_cable(traj, config.anchor);
  r.filtered_length = signal::sg_filter(r.cable.length, config.sg);
  r.velocity = signal::differentiate(r.filtered_length, r.cable.sample_rate);
  r.detections = signal::detect(r.velocity, r.cable.sample_rate, config.detector, r.cable.t0);
  r.simulation = device::simulate(r.velocity, r.cable.sample_rate, config.device, r.cable.t0);
  return r;
}

}  // namespace tstab
