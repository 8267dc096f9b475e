#include "tstab/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include <Eigen/Geometry>

#include "tstab/csv.hpp"
#include "tstab/error.hpp"
#include "tstab/pipeline.hpp"

namespace tstab::tuning {

device::DeviceParams solve_retention(const TuneTarget& target, const device::DeviceParams& p) {
  if (!(target.v_star > 0.0) || !std::isfinite(target.v_star)) {
    throw Error(Errc::InfeasibleTarget, "target lock velocity must be positive and finite");
  }
  p.validate();
  const double omega = target.v_star / p.r_capstan;
  const double omega2 = omega * omega;

  device::DeviceParams out = p;
  double solved = 0.0;
  switch (target.free) {
    case FreeParam::F_retain: solved = out.F_retain = p.m_fly * p.r_fly * omega2; break;
    case FreeParam::M_fly: solved = out.m_fly = p.F_retain / (p.r_fly * omega2); break;
    case FreeParam::R_fly: solved = out.r_fly = p.F_retain / (p.m_fly * omega2); break;
  }
  if (!(solved > 0.0) || !std::isfinite(solved)) {
    throw Error(Errc::InfeasibleTarget, "solved parameter is not a positive finite value");
  }
  return out;
}

ScenarioReport evaluate_scenario(const Scenario& scenario, const device::DeviceParams& p,
                                 const signal::DetectorSpec& det, const signal::SgSpec& sg) {
  const auto result = run_pipeline(scenario.trajectory, PipelineConfig{scenario.anchor, sg, det, p});

  ScenarioReport r;
  r.scenario_id = scenario.id;
  for (const auto& e : result.simulation.events) {
    if (e.change == device::ModeChange::Lock) {
      r.locked = true;
      r.lock_time = e.t;
      break;
    }
  }
  for (const auto& row : result.simulation.trace) r.max_payout = std::max(r.max_payout, row.length);
  for (const auto& e : result.detections) {
    if (e.kind == signal::EventKind::LockTrigger) {
      r.detector_locked = true;
      r.detector_lock_time = e.t;
      break;
    }
  }
  r.false_positive = scenario.truth == Truth::Adl && r.locked;
  r.miss = scenario.truth == Truth::Fall && !r.locked;
  return r;
}

SuiteSummary summarize(std::span<const Scenario> scenarios, std::span<const ScenarioReport> reports,
                       const device::DeviceParams& p) {
  SuiteSummary s;
  s.v_star = device::threshold_velocity(p);
  std::size_t fp = 0, miss = 0, det_fp = 0, det_miss = 0;
  std::vector<double> latencies;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const auto& sc = scenarios[i];
    const auto& r = reports[i];
    if (sc.truth == Truth::Adl) {
      ++s.adl_count;
      fp += r.locked;
      det_fp += r.detector_locked;
    } else {
      ++s.fall_count;
      miss += !r.locked;
      det_miss += !r.detector_locked;
      if (r.lock_time && sc.onset) latencies.push_back(*r.lock_time - *sc.onset);
    }
  }
  auto rate = [](std::size_t k, std::size_t n) -> std::optional<double> {
    if (n == 0) return std::nullopt;
    return static_cast<double>(k) / static_cast<double>(n);
  };
  s.fp_rate = rate(fp, s.adl_count);
  s.miss_rate = rate(miss, s.fall_count);
  s.detector_fp_rate = rate(det_fp, s.adl_count);
  s.detector_miss_rate = rate(det_miss, s.fall_count);
  if (!latencies.empty()) {
    std::sort(latencies.begin(), latencies.end());
    const auto n = latencies.size();
    s.median_latency = n % 2 ? latencies[n / 2] : 0.5 * (latencies[n / 2 - 1] + latencies[n / 2]);
  }
  return s;
}

SuiteResult evaluate_suite(std::span<const Scenario> scenarios, const device::DeviceParams& p,
                           const signal::DetectorSpec& det, const signal::SgSpec& sg) {
  p.validate();
  det.validate();
  sg.validate();
  SuiteResult out;
  out.reports.reserve(scenarios.size());
  for (const auto& sc : scenarios) out.reports.push_back(evaluate_scenario(sc, p, det, sg));
  out.summary = summarize(scenarios, out.reports, p);
  return out;
}

std::string_view to_string(SweepAxis axis) noexcept {
  switch (axis) {
    case SweepAxis::F_retain: return "f_retain_n";
    case SweepAxis::M_fly: return "m_fly_kg";
    case SweepAxis::R_fly: return "r_fly_m";
    case SweepAxis::Window: return "window";
    case SweepAxis::V_lock: return "v_lock_mps";
  }
  return "unknown";
}

namespace {

SweepRow make_point(std::span<const GridAxis> grid, std::span<const std::size_t> index, const SweepBase& base) {
  SweepRow row;
  row.device = base.device;
  row.detector = base.detector;
  row.sg = base.sg;
  for (std::size_t a = 0; a < grid.size(); ++a) {
    const double v = grid[a].values[index[a]];
    row.coords.emplace_back(grid[a].axis, v);
    switch (grid[a].axis) {
      case SweepAxis::F_retain: row.device.F_retain = v; break;
      case SweepAxis::M_fly: row.device.m_fly = v; break;
      case SweepAxis::R_fly: row.device.r_fly = v; break;
      case SweepAxis::Window:
        if (v != std::floor(v)) throw Error(Errc::InvalidSpec, "SG window must be an integer");
        row.sg.window = static_cast<int>(v);
        break;
      case SweepAxis::V_lock: row.detector.v_lock = v; break;
    }
    if (!row.label.empty()) row.label += ';';
    row.label += to_string(grid[a].axis);
    row.label += '=';
    row.label += csv::format_number(v);
  }
  if (row.label.empty()) row.label = "base";
  row.device.validate();
  row.detector.validate();
  row.sg.validate();
  return row;
}

std::vector<SweepRow> enumerate(std::span<const GridAxis> grid, const SweepBase& base) {
  for (const auto& axis : grid) {
    if (axis.values.empty()) throw Error(Errc::InvalidSpec, "sweep axis has no values");
  }
  std::vector<SweepRow> rows;
  std::vector<std::size_t> index(grid.size(), 0);
  while (true) {
    rows.push_back(make_point(grid, index, base));
    // Odometer increment: the last axis varies fastest.
    std::size_t a = grid.size();
    while (a > 0) {
      --a;
      if (++index[a] < grid[a].values.size()) break;
      index[a] = 0;
      if (a == 0) return rows;
    }
    if (grid.empty()) return rows;
  }
}

}  // namespace

std::vector<SweepRow> sweep(std::span<const GridAxis> grid, std::span<const Scenario> suite,
                            const SweepBase& base, Execution exec) {
  auto rows = enumerate(grid, base);
  const std::size_t n_sc = suite.size();
  const auto jobs = static_cast<std::ptrdiff_t>(rows.size() * n_sc);
  std::vector<ScenarioReport> reports(rows.size() * n_sc);
  std::vector<std::exception_ptr> errors(reports.size());

  auto run_job = [&](std::ptrdiff_t j) {
    const auto k = static_cast<std::size_t>(j);
    const auto& row = rows[k / n_sc];
    try {
      reports[k] = evaluate_scenario(suite[k % n_sc], row.device, row.detector, row.sg);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };

  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t j = 0; j < jobs; ++j) run_job(j);
  } else {
    for (std::ptrdiff_t j = 0; j < jobs; ++j) run_job(j);
  }

  // Report the first failure in grid order, whatever order the jobs finished in.
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    rows[r].summary = summarize(suite, std::span(reports).subspan(r * n_sc, n_sc), rows[r].device);
  }
  return rows;
}

std::string format_sweep(std::span<const SweepRow> rows) {
  auto opt = [](const std::optional<double>& v) { return v ? csv::format_number(*v) : std::string("NA"); };
  std::string out = "grid_point,fp_rate,miss_rate,median_latency_s,v_star_mps,det_fp_rate,det_miss_rate\n";
  for (const auto& r : rows) {
    out += r.label;
    out += ',' + opt(r.summary.fp_rate);
    out += ',' + opt(r.summary.miss_rate);
    out += ',' + opt(r.summary.median_latency);
    out += ',' + csv::format_number(r.summary.v_star);
    out += ',' + opt(r.summary.detector_fp_rate);
    out += ',' + opt(r.summary.detector_miss_rate);
    out += '\n';
  }
  return out;
}

std::vector<Scenario> standard_suite(const motion::AnchorConfig& anchor, const motion::Vec3& start_pos,
                                     double jitter, std::uint64_t seed) {
  using motion::Vec3;
  const Vec3 radial = motion::radial_direction(anchor, start_pos);
  // Sideward component orthogonal to the radial direction.
  Vec3 lateral = radial.cross(Vec3::UnitZ());
  if (lateral.norm() < 1e-6) lateral = radial.cross(Vec3::UnitX());
  lateral.normalize();

  std::vector<Scenario> suite;
  for (int k = 0; k < 10; ++k) {
    const double mix = 0.15 * k;  // 0 (pure forward) .. 1.35 rad
    motion::LeanProfile lean;
    lean.direction = (std::cos(mix) * radial + std::sin(mix) * lateral).normalized();
    lean.amplitude = 0.30 + 0.03 * k;  // 0.30 .. 0.57 m
    lean.duration = 2.0;               // peak 1.875 * A / 2 <= 0.54 m/s
    lean.hold = 1.0;
    auto traj = motion::gen_lean(lean, anchor, start_pos);
    if (jitter > 0.0) traj = motion::add_jitter(traj, jitter, seed + static_cast<std::uint64_t>(k));
    suite.push_back({"lean_" + std::to_string(k), std::move(traj), anchor, Truth::Adl, std::nullopt});
  }
  for (int k = 0; k < 10; ++k) {
    motion::FallProfile fall;
    fall.onset = 2.0 + 0.1 * k;
    fall.dip_speed = 1.0 + 0.05 * k;
    fall.recoil_speed = 0.9 * fall.dip_speed;
    auto traj = motion::gen_fall(fall, anchor, start_pos);
    if (jitter > 0.0) traj = motion::add_jitter(traj, jitter, seed + 100 + static_cast<std::uint64_t>(k));
    suite.push_back({"fall_" + std::to_string(k), std::move(traj), anchor, Truth::Fall, fall.onset});
  }
  return suite;
}

}  // namespace tstab::tuning
