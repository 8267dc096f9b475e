#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

// Body-anchor trajectories and their conversion to cable length through a
// straight-line cable path between a fixed device anchor and the vest.
namespace tstab::motion {

using Vec3 = Eigen::Vector3d;

inline constexpr double kCanonicalRate = 250.0;   // Hz
inline constexpr double kTimeTolerance = 1e-9;    // s, uniform-sampling check
inline constexpr double kMinJerkPeakFactor = 1.875;

struct Sample {
  double t = 0.0;
  Vec3 anchor_pos = Vec3::Zero();
};

/// Uniformly sampled body-anchor positions. Always holds at least two samples
/// with spacing 1/sample_rate (within kTimeTolerance).
class Trajectory {
 public:
  Trajectory(double sample_rate, std::vector<Sample> samples);

  /// Builds t_i = t0 + i / rate.
  static Trajectory uniform(double sample_rate, double t0, std::span<const Vec3> positions);

  /// Infers the sample rate from the timestamps. A rate within tolerance of an
  /// integer number of Hz is taken as that integer.
  static Trajectory from_samples(std::vector<Sample> samples);

  double sample_rate() const noexcept { return sample_rate_; }
  double dt() const noexcept { return 1.0 / sample_rate_; }
  std::size_t size() const noexcept { return samples_.size(); }
  std::span<const Sample> samples() const noexcept { return samples_; }
  const Sample& operator[](std::size_t i) const { return samples_[i]; }
  double t0() const noexcept { return samples_.front().t; }
  double duration() const noexcept { return samples_.back().t - samples_.front().t; }

  friend bool operator==(const Trajectory& a, const Trajectory& b);

 private:
  double sample_rate_;
  std::vector<Sample> samples_;
};

struct AnchorConfig {
  Vec3 device_anchor = Vec3::Zero();      // wheelchair frame, m
  Vec3 body_anchor_offset = Vec3::Zero(); // vest attachment relative to tracked point, m

  void validate() const;
};

/// Out-hold-return lean along a fixed direction.
struct LeanProfile {
  Vec3 direction = Vec3::UnitX();
  double amplitude = 0.0;  // m
  double duration = 0.0;   // s, for each of the out and return strokes
  double hold = 0.0;       // s

  void validate() const;
};

/// Incipient fall: half-sine forward surge then half-sine backward recovery
/// along the radial direction from the device anchor.
struct FallProfile {
  double onset = 0.0;            // s
  double dip_speed = 0.0;        // m/s, forward peak
  double recoil_speed = 0.0;     // m/s, backward peak
  double dip_duration = 0.25;    // s
  double recoil_duration = 0.25; // s
  double settle = 1.0;           // s of rest appended after the recoil

  void validate() const;
  double total_duration() const noexcept { return onset + dip_duration + recoil_duration + settle; }
};

/// Cable length and signed payout velocity (positive = extension).
struct CableSeries {
  double sample_rate = kCanonicalRate;
  double t0 = 0.0;
  std::vector<double> length;
  std::vector<double> velocity;

  std::size_t size() const noexcept { return length.size(); }
  double time(std::size_t i) const noexcept { return t0 + static_cast<double>(i) / sample_rate; }
  void validate() const;
};

double cable_length(const AnchorConfig& anchor, const Vec3& body_pos);

/// Length per sample, velocity by finite differences. No filtering.
CableSeries trajectory_to_cable(const Trajectory& traj, const AnchorConfig& anchor);

/// Minimum-jerk position profile 10s^3 - 15s^4 + 6s^5, clamped outside [0, 1].
double min_jerk(double s) noexcept;

/// Unit vector from the device anchor to the cable attachment at `start_pos`.
Vec3 radial_direction(const AnchorConfig& anchor, const Vec3& start_pos);

Trajectory gen_lean(const LeanProfile& profile, const AnchorConfig& anchor, const Vec3& start_pos,
                    double rate = kCanonicalRate);

Trajectory gen_fall(const FallProfile& profile, const AnchorConfig& anchor, const Vec3& start_pos,
                    double rate = kCanonicalRate);

/// Adds seeded uniform jitter in [-amplitude, amplitude] to every coordinate.
Trajectory add_jitter(const Trajectory& traj, double amplitude, std::uint64_t seed);

// --- CSV ---------------------------------------------------------------

enum class Column { Time, X, Y, Z };
using ColumnMap = std::map<std::string, Column>;

ColumnMap default_column_map();

Trajectory parse_trajectory(std::string_view csv_text, const ColumnMap& columns = default_column_map());
Trajectory load_trajectory(const std::filesystem::path& path,
                           const ColumnMap& columns = default_column_map());

std::string format_trajectory(const Trajectory& traj);
void write_trajectory(const std::filesystem::path& path, const Trajectory& traj);

std::string format_cable_series(const CableSeries& series);

}  // namespace tstab::motion
