#include "tstab/motion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "tstab/error.hpp"
#include "tstab/signal.hpp"

namespace tstab::motion {

namespace {

bool finite(const Vec3& v) { return v.allFinite(); }

void check_steps(std::span<const Sample> samples, double dt) {
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (!(samples[i].t > samples[i - 1].t)) {
      throw Error(Errc::NonMonotonicTime, "sample " + std::to_string(i) + " does not advance in time");
    }
  }
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const double step = samples[i].t - samples[i - 1].t;
    if (std::abs(step - dt) > kTimeTolerance) {
      throw Error(Errc::NonUniformSampling, "step " + std::to_string(i) + " deviates from 1/rate");
    }
  }
}

void check_common(std::span<const Sample> samples) {
  if (samples.size() < 2) throw Error(Errc::TooFewSamples, "a trajectory needs at least 2 samples");
  for (const auto& s : samples) {
    if (!std::isfinite(s.t) || !finite(s.anchor_pos)) {
      throw Error(Errc::NonFiniteInput, "non-finite trajectory sample");
    }
  }
}

std::size_t sample_count(double duration, double rate) {
  // The tolerance keeps e.g. 5.0 s * 250 Hz from losing its last sample to rounding.
  return static_cast<std::size_t>(std::floor(duration * rate + 1e-6)) + 1;
}

}  // namespace

Trajectory::Trajectory(double sample_rate, std::vector<Sample> samples)
    : sample_rate_(sample_rate), samples_(std::move(samples)) {
  if (!(sample_rate_ > 0.0) || !std::isfinite(sample_rate_)) {
    throw Error(Errc::NonUniformSampling, "sample rate must be positive and finite");
  }
  check_common(samples_);
  check_steps(samples_, 1.0 / sample_rate_);
}

Trajectory Trajectory::uniform(double sample_rate, double t0, std::span<const Vec3> positions) {
  std::vector<Sample> samples;
  samples.reserve(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    samples.push_back({t0 + static_cast<double>(i) / sample_rate, positions[i]});
  }
  return Trajectory(sample_rate, std::move(samples));
}

Trajectory Trajectory::from_samples(std::vector<Sample> samples) {
  check_common(samples);
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (!(samples[i].t > samples[i - 1].t)) {
      throw Error(Errc::NonMonotonicTime, "sample " + std::to_string(i) + " does not advance in time");
    }
  }
  const double mean_dt =
      (samples.back().t - samples.front().t) / static_cast<double>(samples.size() - 1);
  const double nominal = std::round(1.0 / mean_dt);
  double rate = 1.0 / mean_dt;
  if (nominal > 0.0) {
    const double dt = 1.0 / nominal;
    const bool fits = std::all_of(samples.begin() + 1, samples.end(), [&](const Sample& s) {
      const auto i = static_cast<std::size_t>(&s - samples.data());
      return std::abs((s.t - samples[i - 1].t) - dt) <= kTimeTolerance;
    });
    if (fits) rate = nominal;
  }
  return Trajectory(rate, std::move(samples));
}

bool operator==(const Trajectory& a, const Trajectory& b) {
  if (a.sample_rate_ != b.sample_rate_ || a.samples_.size() != b.samples_.size()) return false;
  for (std::size_t i = 0; i < a.samples_.size(); ++i) {
    if (a.samples_[i].t != b.samples_[i].t || a.samples_[i].anchor_pos != b.samples_[i].anchor_pos) {
      return false;
    }
  }
  return true;
}

void AnchorConfig::validate() const {
  if (!finite(device_anchor) || !finite(body_anchor_offset)) {
    throw Error(Errc::NonFiniteInput, "anchor coordinates must be finite");
  }
  if (!(body_anchor_offset.norm() < 0.5)) {
    throw Error(Errc::InvalidAnchor, "body anchor offset must be shorter than 0.5 m");
  }
}

void LeanProfile::validate() const {
  if (!finite(direction) || std::abs(direction.norm() - 1.0) > 1e-9) {
    throw Error(Errc::InvalidProfile, "lean direction must be a unit vector");
  }
  if (!(amplitude > 0.0) || !std::isfinite(amplitude)) throw Error(Errc::InvalidProfile, "amplitude must be > 0");
  if (!(duration > 0.0) || !std::isfinite(duration)) throw Error(Errc::InvalidProfile, "duration must be > 0");
  if (!(hold >= 0.0) || !std::isfinite(hold)) throw Error(Errc::InvalidProfile, "hold must be >= 0");
}

void FallProfile::validate() const {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!(onset >= 0.0) || !std::isfinite(onset)) throw Error(Errc::InvalidProfile, "onset must be >= 0");
  if (!positive(dip_speed) || !positive(recoil_speed)) {
    throw Error(Errc::InvalidProfile, "dip and recoil speeds must be > 0");
  }
  if (!positive(dip_duration) || !positive(recoil_duration)) {
    throw Error(Errc::InvalidProfile, "lobe durations must be > 0");
  }
  if (!(settle >= 0.0) || !std::isfinite(settle)) throw Error(Errc::InvalidProfile, "settle must be >= 0");
  // The recoil may not carry the anchor behind its starting point.
  if (recoil_speed * recoil_duration > dip_speed * dip_duration) {
    throw Error(Errc::InvalidProfile, "recoil displacement exceeds dip displacement");
  }
}

void CableSeries::validate() const {
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) throw Error(Errc::InvalidSpec, "bad sample rate");
  if (length.size() != velocity.size()) throw Error(Errc::InvalidSpec, "length/velocity size mismatch");
  for (double l : length) {
    if (!(l >= 0.0)) throw Error(Errc::InvalidSpec, "negative cable length");
  }
}

double cable_length(const AnchorConfig& anchor, const Vec3& body_pos) {
  if (!finite(anchor.device_anchor) || !finite(anchor.body_anchor_offset) || !finite(body_pos)) {
    throw Error(Errc::NonFiniteInput, "cable_length needs finite inputs");
  }
  return (body_pos + anchor.body_anchor_offset - anchor.device_anchor).norm();
}

CableSeries trajectory_to_cable(const Trajectory& traj, const AnchorConfig& anchor) {
  CableSeries out;
  out.sample_rate = traj.sample_rate();
  out.t0 = traj.t0();
  out.length.reserve(traj.size());
  for (const auto& s : traj.samples()) out.length.push_back(cable_length(anchor, s.anchor_pos));
  out.velocity = signal::finite_difference(out.length, traj.sample_rate());
  return out;
}

double min_jerk(double s) noexcept {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double s3 = s * s * s;
  return s3 * (10.0 + s * (-15.0 + 6.0 * s));
}

Vec3 radial_direction(const AnchorConfig& anchor, const Vec3& start_pos) {
  const Vec3 r = start_pos + anchor.body_anchor_offset - anchor.device_anchor;
  const double n = r.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error(Errc::InvalidProfile, "body anchor coincides with the device anchor");
  }
  return r / n;
}

Trajectory gen_lean(const LeanProfile& profile, const AnchorConfig& anchor, const Vec3& start_pos,
                    double rate) {
  profile.validate();
  anchor.validate();
  if (!(rate > 0.0) || !std::isfinite(rate)) throw Error(Errc::InvalidProfile, "rate must be > 0");
  if (!finite(start_pos)) throw Error(Errc::NonFiniteInput, "start position must be finite");

  const double d = profile.duration;
  const double h = profile.hold;
  const std::size_t n = sample_count(2.0 * d + h, rate);

  std::vector<Vec3> pos;
  pos.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    double s = 0.0;
    if (t <= d) {
      s = min_jerk(t / d);
    } else if (t <= d + h) {
      s = 1.0;
    } else {
      s = 1.0 - min_jerk((t - d - h) / d);
    }
    pos.push_back(start_pos + (s * profile.amplitude) * profile.direction);
  }
  return Trajectory::uniform(rate, 0.0, pos);
}

Trajectory gen_fall(const FallProfile& profile, const AnchorConfig& anchor, const Vec3& start_pos,
                    double rate) {
  profile.validate();
  anchor.validate();
  if (!(rate > 0.0) || !std::isfinite(rate)) throw Error(Errc::InvalidProfile, "rate must be > 0");
  if (!finite(start_pos)) throw Error(Errc::NonFiniteInput, "start position must be finite");

  const Vec3 u = radial_direction(anchor, start_pos);
  constexpr double pi = std::numbers::pi;
  const double t_dip = profile.onset;
  const double t_recoil = t_dip + profile.dip_duration;
  const double t_rest = t_recoil + profile.recoil_duration;
  // Integrals of the half-sine velocity lobes.
  const double dip_area = profile.dip_speed * profile.dip_duration / pi;
  const double recoil_area = profile.recoil_speed * profile.recoil_duration / pi;

  const std::size_t n = sample_count(profile.total_duration(), rate);
  std::vector<Vec3> pos;
  pos.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    double x = 0.0;
    if (t <= t_dip) {
      x = 0.0;
    } else if (t <= t_recoil) {
      x = dip_area * (1.0 - std::cos(pi * (t - t_dip) / profile.dip_duration));
    } else if (t <= t_rest) {
      x = 2.0 * dip_area - recoil_area * (1.0 - std::cos(pi * (t - t_recoil) / profile.recoil_duration));
    } else {
      x = 2.0 * dip_area - 2.0 * recoil_area;
    }
    pos.push_back(start_pos + x * u);
  }
  return Trajectory::uniform(rate, 0.0, pos);
}

Trajectory add_jitter(const Trajectory& traj, double amplitude, std::uint64_t seed) {
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
    throw Error(Errc::InvalidProfile, "jitter amplitude must be >= 0");
  }
  if (amplitude == 0.0) return traj;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> noise(-amplitude, amplitude);
  std::vector<Sample> samples(traj.samples().begin(), traj.samples().end());
  for (auto& s : samples) {
    for (int k = 0; k < 3; ++k) s.anchor_pos[k] += noise(rng);
  }
  return Trajectory(traj.sample_rate(), std::move(samples));
}

}  // namespace tstab::motion
