// Acceptance suite: one line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "tstab/device.hpp"
#include "tstab/motion.hpp"
#include "tstab/pipeline.hpp"
#include "tstab/signal.hpp"
#include "tstab/tuning.hpp"

using namespace tstab;

namespace {

constexpr double kRate = 250.0;
constexpr double kDt = 1.0 / kRate;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += "FAILED " + what;
    }
  }
  void note(const std::string& s) {
    if (!detail.empty()) detail += "; ";
    detail += s;
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void append(std::vector<double>& v, double value, double seconds) {
  const auto n = static_cast<std::size_t>(std::lround(seconds * kRate));
  v.insert(v.end(), n, value);
}

const motion::AnchorConfig kAnchor{};
const motion::Vec3 kStart(0.25, 0.0, 0.10);

// 1. Travel transparency.
Outcome travel_transparency() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();

  motion::LeanProfile lean;
  lean.direction = motion::radial_direction(kAnchor, kStart);
  lean.amplitude = 0.58;
  lean.duration = motion::kMinJerkPeakFactor * 0.58 / 0.5625;  // peak speed 0.5625 m/s
  lean.hold = 1.0;
  const auto traj = motion::gen_lean(lean, kAnchor, kStart);

  double peak = 0.0;
  for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
    peak = std::max(peak, (traj[i + 1].anchor_pos - traj[i - 1].anchor_pos).norm() * kRate / 2.0);
  }

  PipelineConfig cfg;
  cfg.anchor = kAnchor;
  cfg.device = tuning::solve_retention({0.9}, device::DeviceParams{});
  const auto r = run_pipeline(traj, cfg);
  double max_payout = 0.0;
  for (const auto& row : r.simulation.trace) max_payout = std::max(max_payout, row.length);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  o.require(std::abs(peak - 0.5625) <= 1e-3, "peak body speed 0.5625 m/s");
  o.require(r.simulation.events.empty(), "zero lock events");
  o.require(std::abs(max_payout - 0.58) <= 1e-3, "max payout 0.58 +/- 1e-3 m");
  o.require(secs < 1.0, "runtime < 1 s");
  o.note("peak_speed=" + fmt("%.5f", peak) + " m/s, events=" + std::to_string(r.simulation.events.size()) +
         ", max_payout=" + fmt("%.6f", max_payout) + " m, runtime=" + fmt("%.3f", secs) + " s");
  return o;
}

// 2. Threshold band.
Outcome threshold_band() {
  Outcome o;
  constexpr double slope = 0.5;  // m/s^2
  for (double vstar : {0.8, 0.9, 1.0}) {
    const auto p = tuning::solve_retention({vstar}, device::DeviceParams{});
    std::vector<double> v;
    for (int i = 0; i * kDt * slope <= 1.5; ++i) v.push_back(slope * i * kDt);
    const auto sim = device::simulate(v, kRate, p);
    if (sim.events.empty() || sim.events[0].change != device::ModeChange::Lock) {
      o.require(false, "lock for v*=" + fmt("%.2f", vstar));
      continue;
    }
    const double t_lock = sim.events[0].t;
    const double v_lock = v[static_cast<std::size_t>(std::lround(t_lock * kRate))];
    const double t_cross = vstar / slope;  // analytic crossing time
    o.require(std::abs(v_lock - vstar) <= 0.005, "lock velocity within 0.005 of v*=" + fmt("%.2f", vstar));
    o.require(t_lock >= t_cross - 1e-12 && t_lock <= t_cross + kDt + 1e-12,
              "lock within one sample of analytic crossing for v*=" + fmt("%.2f", vstar));
    o.note("v*=" + fmt("%.2f", vstar) + " locked at " + fmt("%.4f", v_lock) + " m/s (t=" + fmt("%.3f", t_lock) +
           " s, analytic " + fmt("%.3f", t_cross) + " s)");
  }
  return o;
}

// 3. Prototype replay.
Outcome prototype_replay() {
  Outcome o;
  const auto p = tuning::solve_retention({0.628}, device::DeviceParams{});
  std::vector<double> v;
  std::vector<std::pair<double, double>> fast_segments;  // [start, end) of the 0.7 m/s pulls
  for (int episode = 0; episode < 2; ++episode) {
    for (double pull : {0.3, 0.5, 0.7}) {
      const double start = static_cast<double>(v.size()) / kRate;
      append(v, pull, 0.1);
      if (pull == 0.7) fast_segments.emplace_back(start, static_cast<double>(v.size()) / kRate);
    }
    append(v, -0.3, 0.5);  // relieve tension and rewind
    append(v, 0.0, 0.3);
  }
  const auto sim = device::simulate(v, kRate, p);

  std::size_t locks = 0, resets = 0;
  for (const auto& e : sim.events) {
    if (e.change == device::ModeChange::Lock) {
      ++locks;
      bool inside = false;
      for (const auto& [a, b] : fast_segments) inside = inside || (e.t >= a - 1e-12 && e.t < b);
      o.require(inside, "lock at t=" + fmt("%.3f", e.t) + " falls on a 0.7 m/s segment");
      o.note("LOCK t=" + fmt("%.3f", e.t));
    } else {
      ++resets;
      o.note("RESET t=" + fmt("%.3f", e.t));
    }
  }
  o.require(locks == 2, "two LOCK events");
  o.require(resets == 2, "two RESET events");
  for (std::size_t i = 0; i + 1 < sim.events.size(); ++i) {
    o.require(sim.events[i].change != sim.events[i + 1].change, "LOCK and RESET alternate");
  }
  o.note("v*=" + fmt("%.4f", device::threshold_velocity(p)) + " m/s");
  return o;
}

motion::Trajectory fall_scenario() {
  motion::FallProfile f;
  f.onset = 16.0;
  f.dip_speed = 1.0;
  f.recoil_speed = 0.9;
  f.settle = 18.0 - 16.0 - f.dip_duration - f.recoil_duration;
  return motion::gen_fall(f, kAnchor, kStart);
}

PipelineConfig signature_config() {
  PipelineConfig cfg;
  cfg.anchor = kAnchor;
  cfg.detector.mode = signal::DetectorMode::FallSignature;
  return cfg;
}

// 4. Fall-signature timing.
Outcome fall_signature_timing() {
  Outcome o;
  const auto traj = fall_scenario();
  const auto cfg = signature_config();
  const auto r = run_pipeline(traj, cfg);

  std::vector<double> locks;
  for (const auto& e : r.detections) {
    if (e.kind == signal::EventKind::LockTrigger) locks.push_back(e.t);
  }
  // True crossing of -recoil_min by the clean half-sine recoil lobe.
  const double t_true = 16.0 + 0.25 + std::asin(cfg.detector.recoil_min / 0.9) / std::numbers::pi * 0.25;
  o.require(traj.duration() == 18.0, "18 s trajectory");
  o.require(locks.size() == 1, "exactly one LockTrigger");
  if (!locks.empty()) {
    const double latency = locks[0] - t_true;
    o.require(locks[0] >= 16.0 && locks[0] <= 18.0, "LockTrigger within [16, 18] s");
    o.require(latency <= 0.100, "latency <= 100 ms");
    o.note("LockTrigger t=" + fmt("%.3f", locks[0]) + " s, true crossing " + fmt("%.4f", t_true) +
           " s, latency=" + fmt("%.1f", latency * 1000.0) + " ms");
  }
  return o;
}

// 5. Compliant, definite stop.
Outcome compliant_stop() {
  Outcome o;
  const device::DeviceParams p;
  auto raw_force = [&](double x) { return p.k1_block * x + p.k3_block * x * x * x; };
  std::vector<double> v;
  append(v, 0.5, 0.2);
  append(v, 1.0, 0.3);
  const auto sim = device::simulate(v, kRate, p);

  constexpr double tol = 1e-9;  // N, floating-point rounding of the coil term
  std::size_t lock = 0;
  while (lock < sim.trace.size() && sim.trace[lock].mode != device::Mode::Locked) ++lock;
  o.require(lock > 0 && lock < sim.trace.size(), "device locks");
  if (!o.pass) return o;

  std::size_t continuity_violations = 0, non_increasing = 0, moving_after_stop = 0;
  bool reached = false;
  std::size_t stop_at = 0;
  for (std::size_t i = lock; i < sim.trace.size(); ++i) {
    const auto& prev = sim.trace[i - 1];
    const auto& cur = sim.trace[i];
    const double bound = raw_force(v[i] * kDt + prev.x_block) - raw_force(prev.x_block);
    if (cur.tension - prev.tension > bound + tol) ++continuity_violations;
    if (reached) {
      if (cur.velocity != 0.0 || cur.length != prev.length) ++moving_after_stop;
    } else if (!(cur.tension > prev.tension)) {
      ++non_increasing;
    }
    if (!reached && cur.x_block == p.x_block_max) {
      reached = true;
      stop_at = i;
    }
  }
  o.require(continuity_violations == 0, "tension increments bounded by blocking-force increments");
  o.require(non_increasing == 0, "tension strictly increasing until x_block_max");
  o.require(reached, "x_block_max reached");
  o.require(moving_after_stop == 0, "zero payout after the stop");
  o.note("lock t=" + fmt("%.3f", sim.trace[lock].t) + " s, stop t=" + fmt("%.3f", sim.trace[stop_at].t) +
         " s, peak tension=" + fmt("%.1f", sim.trace.back().tension) + " N, samples after stop=" +
         std::to_string(sim.trace.size() - 1 - stop_at));
  return o;
}

// 6. Signal-processing properties.
Outcome signal_properties() {
  Outcome o;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  double worst_sg = 0.0;
  for (int trial = 0; trial < 40; ++trial) {
    const int order = 1 + trial % 4;
    const signal::SgSpec spec{2 * (order / 2) + 3 + 2 * (trial % 12), order};
    std::vector<double> coef(static_cast<std::size_t>(order) + 1);
    for (auto& c : coef) c = u(rng);
    std::vector<double> x(300);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double t = static_cast<double>(i) / kRate;
      double s = 0.0;
      for (auto it = coef.rbegin(); it != coef.rend(); ++it) s = s * t + *it;
      x[i] = s;
    }
    const auto y = signal::sg_filter(x, spec);
    for (std::size_t i = 0; i < x.size(); ++i) worst_sg = std::max(worst_sg, std::abs(y[i] - x[i]));
  }
  o.require(worst_sg <= 1e-9, "SG reproduces polynomials of degree <= order within 1e-9");

  double worst_diff = 0.0;
  std::vector<double> lin, quad;
  for (int i = 0; i < 500; ++i) {
    const double t = i / kRate;
    lin.push_back(0.2 - 0.7 * t);
    quad.push_back(1.5 * t * t - 0.3 * t);
  }
  const auto dl = signal::differentiate(lin, kRate);
  const auto dq = signal::differentiate(quad, kRate);
  for (std::size_t i = 1; i + 1 < lin.size(); ++i) {
    const double t = static_cast<double>(i) / kRate;
    worst_diff = std::max(worst_diff, std::abs(dl[i] + 0.7));
    worst_diff = std::max(worst_diff, std::abs(dq[i] - (3.0 * t - 0.3)));
  }
  o.require(worst_diff <= 1e-9, "differentiate exact on linear/quadratic interiors within 1e-9");

  std::size_t monotone_failures = 0;
  std::normal_distribution<double> g(0.0, 0.05);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v(750);
    double x = 0.0;
    for (auto& e : v) e = x += g(rng);
    signal::DetectorSpec hi;
    hi.v_lock = 0.3 + 0.01 * trial;
    hi.refractory = 0.05 * (trial % 5);
    signal::DetectorSpec lo = hi;
    lo.v_lock = hi.v_lock - 0.1;
    const auto eh = signal::detect(v, kRate, hi);
    const auto el = signal::detect(v, kRate, lo);
    const bool ok = el.size() >= eh.size() && (eh.empty() || el.front().t <= eh.front().t);
    monotone_failures += !ok;
  }
  o.require(monotone_failures == 0, "detector monotone in v_lock over 100 random series");
  o.note("max SG error=" + fmt("%.2e", worst_sg) + ", max derivative error=" + fmt("%.2e", worst_diff) +
         ", monotonicity failures=" + std::to_string(monotone_failures) + "/100");
  return o;
}

// 7. Inverse-design round trip.
Outcome inverse_round_trip() {
  Outcome o;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    device::DeviceParams p;
    p.r_capstan = 0.005 + 0.03 * u(rng);
    p.m_fly = 0.002 + 0.03 * u(rng);
    p.r_fly = 0.005 + 0.03 * u(rng);
    p.F_retain = 0.05 + 2.0 * u(rng);
    const double vstar = 0.3 + 1.2 * u(rng);
    const auto solved = tuning::solve_retention({vstar}, p);
    worst = std::max(worst, std::abs(device::threshold_velocity(solved) - vstar) / vstar);
  }
  o.require(worst <= 1e-9, "threshold_velocity(solve_retention(v*)) == v* within 1e-9 relative");
  o.note("worst relative error=" + fmt("%.2e", worst) + " over 50 parameter sets");
  return o;
}

// 8. Determinism.
Outcome determinism() {
  Outcome o;
  auto once = [] {
    const auto r = run_pipeline(fall_scenario(), signature_config());
    return device::format_trace(r.simulation.trace) + signal::format_events(r.detections);
  };
  const auto a = once();
  const auto b = once();
  o.require(a == b, "byte-identical traces");
  o.note(std::to_string(a.size()) + " bytes compared");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"AC1 travel transparency", travel_transparency},
      {"AC2 threshold band", threshold_band},
      {"AC3 prototype replay", prototype_replay},
      {"AC4 fall-signature timing", fall_signature_timing},
      {"AC5 compliant, definite stop", compliant_stop},
      {"AC6 signal-processing properties", signal_properties},
      {"AC7 inverse-design round trip", inverse_round_trip},
      {"AC8 determinism", determinism},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += !o.pass;
    std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
