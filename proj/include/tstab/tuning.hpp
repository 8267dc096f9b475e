#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tstab/device.hpp"
#include "tstab/motion.hpp"
#include "tstab/signal.hpp"

namespace tstab::tuning {

enum class FreeParam { F_retain, M_fly, R_fly };

struct TuneTarget {
  double v_star = 0.9;  // m/s
  FreeParam free = FreeParam::F_retain;
};

/// Closed-form inverse of threshold_velocity for the one free parameter.
device::DeviceParams solve_retention(const TuneTarget& target, const device::DeviceParams& p);

enum class Truth { Adl, Fall };

struct Scenario {
  std::string id;
  motion::Trajectory trajectory;
  motion::AnchorConfig anchor;
  Truth truth = Truth::Adl;
  std::optional<double> onset;  // generator ground truth for falls, s
};

struct ScenarioReport {
  std::string scenario_id;
  bool locked = false;                 // device engaged at least once
  std::optional<double> lock_time;     // first LOCK, s
  double max_payout = 0.0;             // m
  bool false_positive = false;         // ADL that locked
  bool miss = false;                   // fall that never locked
  bool detector_locked = false;        // software detector emitted a LockTrigger
  std::optional<double> detector_lock_time;
};

/// Rates are empty when their denominator is zero.
struct SuiteSummary {
  std::size_t adl_count = 0;
  std::size_t fall_count = 0;
  std::optional<double> fp_rate;
  std::optional<double> miss_rate;
  std::optional<double> median_latency;  // first LOCK minus ground-truth onset, s
  std::optional<double> detector_fp_rate;
  std::optional<double> detector_miss_rate;
  double v_star = 0.0;                   // device threshold, m/s
};

struct SuiteResult {
  std::vector<ScenarioReport> reports;
  SuiteSummary summary;
};

ScenarioReport evaluate_scenario(const Scenario& scenario, const device::DeviceParams& p,
                                 const signal::DetectorSpec& det, const signal::SgSpec& sg);

SuiteSummary summarize(std::span<const Scenario> scenarios, std::span<const ScenarioReport> reports,
                       const device::DeviceParams& p);

SuiteResult evaluate_suite(std::span<const Scenario> scenarios, const device::DeviceParams& p,
                           const signal::DetectorSpec& det, const signal::SgSpec& sg = {});

enum class SweepAxis { F_retain, M_fly, R_fly, Window, V_lock };

std::string_view to_string(SweepAxis axis) noexcept;

struct GridAxis {
  SweepAxis axis = SweepAxis::F_retain;
  std::vector<double> values;
};

struct SweepBase {
  device::DeviceParams device;
  signal::DetectorSpec detector;
  signal::SgSpec sg;
};

struct SweepRow {
  std::string label;  // "name=value;name=value" in grid-axis order
  std::vector<std::pair<SweepAxis, double>> coords;
  device::DeviceParams device;
  signal::DetectorSpec detector;
  signal::SgSpec sg;
  SuiteSummary summary;
};

enum class Execution { Serial, Parallel };

/// One row per grid point, lexicographic over the axes in the given order
/// (first axis varies slowest). An empty grid is the single base point.
std::vector<SweepRow> sweep(std::span<const GridAxis> grid, std::span<const Scenario> suite,
                            const SweepBase& base, Execution exec = Execution::Parallel);

/// `grid_point,fp_rate,miss_rate,median_latency_s,v_star_mps`, then the
/// detector's rates. Undefined values are written as NA.
std::string format_sweep(std::span<const SweepRow> rows);

/// Ten ADL leans with peak speed <= 0.6 m/s and ten falls with dip >= 1.0 m/s.
std::vector<Scenario> standard_suite(const motion::AnchorConfig& anchor, const motion::Vec3& start_pos,
                                     double jitter = 0.0, std::uint64_t seed = 0);

}  // namespace tstab::tuning
