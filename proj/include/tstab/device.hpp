#pragma once

#include <span>
#include <string>
#include <vector>

// Passive lock mechanism: coil-sprung capstan, magnet-retained centrifugal
// flyweights, and a stiffening blocking spring engaged once they snap out.
namespace tstab::device {

struct DeviceParams {
  double r_capstan = 0.015;     // m
  double k_coil = 5e-4;         // N*m/rad
  double tau0_coil = 5e-3;      // N*m, pretension
  double m_fly = 0.01;          // kg, per flyweight
  double r_fly = 0.02;          // m, flyweight CoM radius at engagement
  double F_retain = 0.72;       // N, magnet breakaway (radial)
  int n_fly = 2;
  double k1_block = 200.0;      // N/m
  double k3_block = 5e5;        // N/m^3
  double x_block_max = 0.08;    // m
  double L_max = 0.65;          // m, cable travel
  double eps_tension = 0.5;     // N, reserved for a force-based reset rule

  void validate() const;
  friend bool operator==(const DeviceParams&, const DeviceParams&) = default;
};

enum class Mode { Transparent, Locked };
enum class ModeChange { Lock, Reset };

struct ModeEvent {
  double t = 0.0;
  ModeChange change = ModeChange::Lock;
  friend bool operator==(const ModeEvent&, const ModeEvent&) = default;
};

struct DeviceState {
  Mode mode = Mode::Transparent;
  double L = 0.0;                // m, cable payout
  double omega = 0.0;            // rad/s, payout-positive
  double x_block = 0.0;          // m, blocking spring extension
  double t = 0.0;                // s, time of the next input sample
  double velocity = 0.0;         // m/s, payout rate achieved over the last step
  double tension = 0.0;          // N
  std::vector<ModeEvent> events;
};

struct StepInput {
  double v_cable_cmd = 0.0;  // m/s, imposed by the torso, payout-positive
};

double capstan_omega(double v, double r_capstan);
/// Per-flyweight centrifugal force against magnet breakaway (>=).
bool lock_condition(double omega, const DeviceParams& p);
/// Cable velocity at which lock_condition first holds.
double threshold_velocity(const DeviceParams& p);
double blocking_force(double x, const DeviceParams& p);
/// Cable tension from the coil spring alone at payout L.
double coil_tension(double L, const DeviceParams& p);

DeviceState initial_state(const DeviceParams& p, double t0 = 0.0);

/// Advances one fixed step. The input applies over [state.t, state.t + dt);
/// mode changes are stamped at state.t.
DeviceState step(const DeviceState& state, const StepInput& input, const DeviceParams& p, double dt);

struct TraceRow {
  double t = 0.0;
  double length = 0.0;
  double velocity = 0.0;
  Mode mode = Mode::Transparent;
  double x_block = 0.0;
  double tension = 0.0;
};

struct Simulation {
  std::vector<TraceRow> trace;
  std::vector<ModeEvent> events;
  DeviceState final_state;
};

/// Folds `step` over a velocity series sampled at `rate`. Row i is stamped
/// with the sample time and holds the state reached by applying sample i.
Simulation simulate(std::span<const double> velocity, double rate, const DeviceParams& p, double t0 = 0.0);

/// `t,length_m,velocity_mps,mode,x_block_m,tension_N`, mode in {T, L}
std::string format_trace(std::span<const TraceRow> trace);
/// `t,event`, event in {LOCK, RESET}
std::string format_events(std::span<const ModeEvent> events);

}  // namespace tstab::device
