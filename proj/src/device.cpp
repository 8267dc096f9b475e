#include "tstab/device.hpp"

#include <algorithm>
#include <cmath>

#include "tstab/csv.hpp"
#include "tstab/error.hpp"

namespace tstab::device {

namespace {

bool positive(double v) { return v > 0.0 && std::isfinite(v); }

void check_state(const DeviceState& s, const DeviceParams& p) {
  if (!std::isfinite(s.L) || s.L < 0.0 || s.L > p.L_max) {
    throw Error(Errc::StateInvariantViolation, "payout outside [0, L_max]");
  }
  if (!std::isfinite(s.x_block) || s.x_block < 0.0 || s.x_block > p.x_block_max) {
    throw Error(Errc::StateInvariantViolation, "blocking extension outside [0, x_block_max]");
  }
  if (s.mode == Mode::Transparent && s.x_block != 0.0) {
    throw Error(Errc::StateInvariantViolation, "blocking spring extended while transparent");
  }
  if (s.x_block > s.L) throw Error(Errc::StateInvariantViolation, "blocking extension exceeds payout");
}

}  // namespace

void DeviceParams::validate() const {
  if (!positive(r_capstan) || !positive(k_coil) || !positive(m_fly) || !positive(r_fly) ||
      !positive(F_retain) || !positive(k1_block) || !positive(x_block_max) || !positive(eps_tension)) {
    throw Error(Errc::InvalidParams, "device constants must be strictly positive");
  }
  if (!(tau0_coil >= 0.0) || !std::isfinite(tau0_coil)) throw Error(Errc::InvalidParams, "tau0_coil must be >= 0");
  if (!(k3_block >= 0.0) || !std::isfinite(k3_block)) throw Error(Errc::InvalidParams, "k3_block must be >= 0");
  if (!(L_max >= 0.60) || !std::isfinite(L_max)) throw Error(Errc::InvalidParams, "L_max must be >= 0.60 m");
  if (n_fly != 2) throw Error(Errc::InvalidParams, "the mechanism has exactly two flyweights");
}

double capstan_omega(double v, double r_capstan) {
  if (!(r_capstan > 0.0)) throw Error(Errc::NonPositiveRadius, "capstan radius must be > 0");
  return v / r_capstan;
}

bool lock_condition(double omega, const DeviceParams& p) {
  return p.m_fly * omega * omega * p.r_fly >= p.F_retain;
}

double threshold_velocity(const DeviceParams& p) {
  return p.r_capstan * std::sqrt(p.F_retain / (p.m_fly * p.r_fly));
}

double blocking_force(double x, const DeviceParams& p) {
  if (!(x >= 0.0) || x > p.x_block_max) {
    throw Error(Errc::ExtensionOutOfRange, "blocking extension outside [0, x_block_max]");
  }
  return p.k1_block * x + p.k3_block * x * x * x;
}

double coil_tension(double L, const DeviceParams& p) {
  return (p.tau0_coil + p.k_coil * L / p.r_capstan) / p.r_capstan;
}

DeviceState initial_state(const DeviceParams& p, double t0) {
  p.validate();
  DeviceState s;
  s.t = t0;
  s.tension = coil_tension(0.0, p);
  return s;
}

DeviceState step(const DeviceState& state, const StepInput& input, const DeviceParams& p, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(Errc::InvalidDt, "dt must be > 0");
  if (!std::isfinite(input.v_cable_cmd)) throw Error(Errc::NonFiniteInput, "commanded velocity must be finite");
  check_state(state, p);

  const double v = input.v_cable_cmd;
  DeviceState next = state;
  next.t = state.t + dt;
  next.omega = capstan_omega(v, p.r_capstan);

  // The ratchet only catches in the payout direction; retraction spins the
  // flyweights out but cannot engage the plate.
  if (next.mode == Mode::Transparent && next.omega > 0.0 && lock_condition(next.omega, p)) {
    next.mode = Mode::Locked;
    next.x_block = 0.0;
    next.events.push_back({state.t, ModeChange::Lock});
  }

  if (next.mode == Mode::Transparent) {
    next.L = std::clamp(state.L + v * dt, 0.0, p.L_max);
    next.velocity = (next.L - state.L) / dt;
    next.tension = coil_tension(next.L, p);
    return next;
  }

  // Locked: payout goes into the blocking spring; the coil only sees the
  // payout reached at engagement (L - x_block).
  double x = state.x_block;
  double L = state.L;
  if (v > 0.0) {
    double x_new = std::min(x + v * dt, p.x_block_max);
    double L_new = L + (x_new - x);
    if (L_new > p.L_max) {
      x_new = x + (p.L_max - L);
      L_new = p.L_max;
    }
    x = x_new;
    L = L_new;
  } else {
    x = std::max(x + v * dt, 0.0);
    L = std::clamp(L + v * dt, x, p.L_max);
  }
  next.x_block = x;
  next.L = L;
  next.velocity = (L - state.L) / dt;
  next.tension = coil_tension(L - x, p) + blocking_force(x, p);

  if (v <= 0.0 && x == 0.0) {
    next.mode = Mode::Transparent;
    next.events.push_back({state.t, ModeChange::Reset});
    next.tension = coil_tension(L, p);
  }
  return next;
}

Simulation simulate(std::span<const double> velocity, double rate, const DeviceParams& p, double t0) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw Error(Errc::InvalidDt, "rate must be > 0");
  const double dt = 1.0 / rate;
  Simulation sim;
  sim.trace.reserve(velocity.size());
  DeviceState state = initial_state(p, t0);
  for (std::size_t i = 0; i < velocity.size(); ++i) {
    // Re-anchor to the sample clock so event stamps do not accumulate drift.
    state.t = t0 + static_cast<double>(i) / rate;
    const double t = state.t;
    state = step(state, StepInput{velocity[i]}, p, dt);
    sim.trace.push_back({t, state.L, state.velocity, state.mode, state.x_block, state.tension});
  }
  sim.events = state.events;
  sim.final_state = std::move(state);
  return sim;
}

std::string format_trace(std::span<const TraceRow> trace) {
  std::string out = "t,length_m,velocity_mps,mode,x_block_m,tension_N\n";
  for (const auto& r : trace) {
    out += csv::format_number(r.t);
    out += ',';
    out += csv::format_number(r.length);
    out += ',';
    out += csv::format_number(r.velocity);
    out += r.mode == Mode::Locked ? ",L," : ",T,";
    out += csv::format_number(r.x_block);
    out += ',';
    out += csv::format_number(r.tension);
    out += '\n';
  }
  return out;
}

std::string format_events(std::span<const ModeEvent> events) {
  std::string out = "t,event\n";
  for (const auto& e : events) {
    out += csv::format_number(e.t);
    out += e.change == ModeChange::Lock ? ",LOCK\n" : ",RESET\n";
  }
  return out;
}

}  // namespace tstab::device
