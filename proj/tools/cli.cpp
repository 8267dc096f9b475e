#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <sstream>
#include <vector>

#include "tstab/config.hpp"
#include "tstab/csv.hpp"
#include "tstab/error.hpp"
#include "tstab/pipeline.hpp"
#include "tstab/tuning.hpp"

namespace tstab::cli {

namespace {

namespace fs = std::filesystem;

/// Carries an exit code out of a command.
struct Exit {
  int code;
  std::string message;
};

enum class Stage { Setup, Run };

int exit_code(const Error& e, Stage stage) {
  switch (e.code()) {
    case Errc::Io: return kIoFailure;
    case Errc::InfeasibleTarget: return kInfeasible;
    default: return stage == Stage::Setup ? kBadInput : kPipelineError;
  }
}

template <class Fn>
auto guarded(Stage stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Exit{exit_code(e, stage), e.what()};
  }
}

std::string cm_per_s(double mps) {
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(1);
  ss << mps * 100.0 << " cm/s";
  return ss.str();
}

std::string metres(double m) {
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(4);
  ss << m << " m";
  return ss.str();
}

motion::Vec3 parse_vec3(const std::string& text) {
  const auto parts = csv::split(text);
  if (parts.size() != 3) throw Error(Errc::Parse, "expected x,y,z but got '" + text + "'");
  return {csv::parse_number(parts[0]), csv::parse_number(parts[1]), csv::parse_number(parts[2])};
}

struct Globals {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  std::string side = "left";
};

RunConfig load_run_config(const Globals& g) {
  return guarded(Stage::Setup, [&] {
    RunConfig c = g.config_path.empty() ? RunConfig{} : load_config(g.config_path);
    c.validate();
    return c;
  });
}

Side parse_side(const std::string& s) { return s == "right" ? Side::Right : Side::Left; }

fs::path output_path(const Globals& g, const std::string& name) {
  return guarded(Stage::Run, [&] {
    std::error_code ec;
    fs::create_directories(g.out_dir, ec);
    if (ec) throw Error(Errc::Io, "cannot create output directory '" + g.out_dir + "'");
    return fs::path(g.out_dir) / name;
  });
}

void write(const fs::path& path, const std::string& content) {
  guarded(Stage::Run, [&] { csv::write_file(path, content); });
}

motion::Trajectory read_trajectory(const std::string& path) {
  return guarded(Stage::Run, [&] {
    if (!fs::exists(path)) throw Error(Errc::Io, "input '" + path + "' does not exist");
    return motion::load_trajectory(path);
  });
}

// --- generate -------------------------------------------------------------

struct LeanArgs {
  double amplitude = 0.0;
  double duration = 0.0;
  double hold = 1.0;
  std::string direction;
  std::string out = "lean.csv";
};

struct FallArgs {
  double dip = 0.0;
  std::optional<double> recoil;
  double onset = 0.0;
  double dip_duration = 0.25;
  double recoil_duration = 0.25;
  double settle = 1.0;
  std::string out = "fall.csv";
};

void print_trajectory_summary(std::ostream& out, const motion::Trajectory& traj, const SideConfig& side,
                              const fs::path& path) {
  double peak_speed = 0.0;
  for (std::size_t i = 1; i < traj.size(); ++i) {
    const double v = (traj[i].anchor_pos - traj[i - 1].anchor_pos).norm() * traj.sample_rate();
    peak_speed = std::max(peak_speed, v);
  }
  const auto cable = motion::trajectory_to_cable(traj, side.anchor);
  const auto [lo, hi] = std::minmax_element(cable.length.begin(), cable.length.end());
  out << "wrote " << path.string() << ": duration=" << traj.duration() << " s, peak_speed="
      << cm_per_s(peak_speed) << ", peak_payout=" << metres(*hi - cable.length.front())
      << ", payout_excursion=" << metres(*hi - *lo) << '\n';
}

int cmd_generate_lean(const Globals& g, const LeanArgs& a, std::ostream& out) {
  const RunConfig cfg = load_run_config(g);
  const SideConfig& side = cfg.side(parse_side(g.side));
  const auto traj = guarded(Stage::Setup, [&] {
    motion::LeanProfile p;
    p.direction = a.direction.empty() ? motion::radial_direction(side.anchor, side.start_pos)
                                      : parse_vec3(a.direction);
    p.amplitude = a.amplitude;
    p.duration = a.duration;
    p.hold = a.hold;
    auto t = motion::gen_lean(p, side.anchor, side.start_pos, cfg.rate);
    return cfg.jitter > 0.0 ? motion::add_jitter(t, cfg.jitter, g.seed) : t;
  });
  const auto path = output_path(g, a.out);
  write(path, motion::format_trajectory(traj));
  print_trajectory_summary(out, traj, side, path);
  return kOk;
}

int cmd_generate_fall(const Globals& g, const FallArgs& a, std::ostream& out) {
  const RunConfig cfg = load_run_config(g);
  const SideConfig& side = cfg.side(parse_side(g.side));
  const auto traj = guarded(Stage::Setup, [&] {
    motion::FallProfile p;
    p.onset = a.onset;
    p.dip_speed = a.dip;
    p.recoil_speed = a.recoil.value_or(0.9 * a.dip);
    p.dip_duration = a.dip_duration;
    p.recoil_duration = a.recoil_duration;
    p.settle = a.settle;
    auto t = motion::gen_fall(p, side.anchor, side.start_pos, cfg.rate);
    return cfg.jitter > 0.0 ? motion::add_jitter(t, cfg.jitter, g.seed) : t;
  });
  const auto path = output_path(g, a.out);
  write(path, motion::format_trajectory(traj));
  print_trajectory_summary(out, traj, side, path);
  return kOk;
}

// --- simulate / detect ------------------------------------------------------

int cmd_simulate(const Globals& g, const std::string& input, std::ostream& out) {
  const RunConfig cfg = load_run_config(g);
  const SideConfig& side = cfg.side(parse_side(g.side));
  const auto traj = read_trajectory(input);
  const auto result = guarded(Stage::Run, [&] {
    return run_pipeline(traj, PipelineConfig{side.anchor, cfg.sg, cfg.detector, cfg.device});
  });

  write(output_path(g, "trace.csv"), device::format_trace(result.simulation.trace));
  write(output_path(g, "events.csv"), device::format_events(result.simulation.events));
  write(output_path(g, "cable.csv"), motion::format_cable_series(result.cable));

  std::size_t locks = 0, resets = 0;
  for (const auto& e : result.simulation.events) (e.change == device::ModeChange::Lock ? locks : resets)++;
  double max_payout = 0.0, peak_v = 0.0;
  for (const auto& r : result.simulation.trace) max_payout = std::max(max_payout, r.length);
  for (double v : result.velocity) peak_v = std::max(peak_v, v);
  out << "locks=" << locks << " resets=" << resets << " max_payout=" << metres(max_payout)
      << " peak_velocity=" << cm_per_s(peak_v) << " threshold=" << cm_per_s(device::threshold_velocity(cfg.device))
      << '\n';
  return kOk;
}

int cmd_detect(const Globals& g, const std::string& input, const std::string& mode, std::ostream& out) {
  RunConfig cfg = load_run_config(g);
  if (mode == "velocity") cfg.detector.mode = signal::DetectorMode::VelocityThreshold;
  if (mode == "signature") cfg.detector.mode = signal::DetectorMode::FallSignature;
  const SideConfig& side = cfg.side(parse_side(g.side));
  const auto traj = read_trajectory(input);
  const auto events = guarded(Stage::Run, [&] {
    const auto cable = motion::trajectory_to_cable(traj, side.anchor);
    const auto smooth = signal::sg_filter(cable.length, cfg.sg);
    const auto velocity = signal::differentiate(smooth, cable.sample_rate);
    return signal::detect(velocity, cable.sample_rate, cfg.detector, cable.t0);
  });
  write(output_path(g, "detections.csv"), signal::format_events(events));

  std::size_t triggers = 0;
  std::optional<double> first;
  for (const auto& e : events) {
    if (e.kind != signal::EventKind::LockTrigger) continue;
    if (!first) first = e.t;
    ++triggers;
  }
  out << "events=" << events.size() << " lock_triggers=" << triggers;
  if (first) out << " first_lock_t=" << *first << " s";
  out << '\n';
  return kOk;
}

// --- tune / sweep -----------------------------------------------------------

tuning::FreeParam parse_free(const std::string& s) {
  if (s == "m_fly") return tuning::FreeParam::M_fly;
  if (s == "r_fly") return tuning::FreeParam::R_fly;
  return tuning::FreeParam::F_retain;
}

int cmd_tune(const Globals& g, double v_star, const std::string& free, const std::vector<double>& sweep_v_star,
             std::ostream& out) {
  RunConfig cfg = load_run_config(g);
  cfg.device = guarded(Stage::Setup, [&] {
    return tuning::solve_retention({v_star, parse_free(free)}, cfg.device);
  });
  const auto path = output_path(g, "tuned.toml");
  write(path, format_config(cfg));
  out << "wrote " << path.string() << ": f_retain=" << cfg.device.F_retain << " N m_fly=" << cfg.device.m_fly
      << " kg r_fly=" << cfg.device.r_fly << " m threshold=" << cm_per_s(device::threshold_velocity(cfg.device))
      << '\n';

  if (!sweep_v_star.empty()) {
    tuning::GridAxis axis{tuning::SweepAxis::F_retain, {}};
    for (double v : sweep_v_star) {
      axis.values.push_back(guarded(Stage::Setup, [&] {
        return tuning::solve_retention({v, tuning::FreeParam::F_retain}, cfg.device).F_retain;
      }));
    }
    const auto suite = guarded(Stage::Run, [&] {
      return tuning::standard_suite(cfg.left.anchor, cfg.left.start_pos, cfg.jitter, g.seed);
    });
    const auto rows = guarded(Stage::Run, [&] {
      return tuning::sweep(std::span(&axis, 1), suite, {cfg.device, cfg.detector, cfg.sg});
    });
    const auto table = output_path(g, "tune_sweep.csv");
    write(table, tuning::format_sweep(rows));
    out << "wrote " << table.string() << " (" << rows.size() << " rows)\n";
  }
  return kOk;
}

struct SweepArgs {
  std::vector<double> f_retain, m_fly, r_fly, window, v_lock, v_star;
  bool serial = false;
};

int cmd_sweep(const Globals& g, SweepArgs a, std::ostream& out) {
  const RunConfig cfg = load_run_config(g);
  if (!a.v_star.empty() && !a.f_retain.empty()) {
    throw Exit{kBadInput, "--v-star and --f-retain both set the retention axis"};
  }
  for (double v : a.v_star) {
    a.f_retain.push_back(guarded(Stage::Setup, [&] {
      return tuning::solve_retention({v, tuning::FreeParam::F_retain}, cfg.device).F_retain;
    }));
  }
  std::vector<tuning::GridAxis> grid;
  auto add = [&grid](tuning::SweepAxis axis, const std::vector<double>& values) {
    if (!values.empty()) grid.push_back({axis, values});
  };
  add(tuning::SweepAxis::F_retain, a.f_retain);
  add(tuning::SweepAxis::M_fly, a.m_fly);
  add(tuning::SweepAxis::R_fly, a.r_fly);
  add(tuning::SweepAxis::Window, a.window);
  add(tuning::SweepAxis::V_lock, a.v_lock);

  const auto suite = guarded(Stage::Run, [&] {
    return tuning::standard_suite(cfg.left.anchor, cfg.left.start_pos, cfg.jitter, g.seed);
  });
  // Grid values are validated per point, so a bad value is a flag error.
  const auto rows = guarded(Stage::Setup, [&] {
    return tuning::sweep(grid, suite, {cfg.device, cfg.detector, cfg.sg},
                         a.serial ? tuning::Execution::Serial : tuning::Execution::Parallel);
  });
  const auto path = output_path(g, "sweep.csv");
  write(path, tuning::format_sweep(rows));
  out << "wrote " << path.string() << " (" << rows.size() << " grid points, " << suite.size()
      << " scenarios each)\n";
  return kOk;
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Torso stabiliser simulator: trajectories, lock mechanism, detection and tuning", "tstab"};
  app.require_subcommand(1);

  Globals g;
  app.add_option("--config", g.config_path, "Run configuration file");
  app.add_option("--out-dir", g.out_dir, "Directory for output files")->capture_default_str();
  app.add_option("--seed", g.seed, "Seed for marker jitter")->capture_default_str();
  app.add_option("--side", g.side, "Which cable to use")
      ->check(CLI::IsMember({"left", "right"}))
      ->capture_default_str();

  auto* generate = app.add_subcommand("generate", "Write a synthetic trajectory CSV");
  generate->require_subcommand(1);

  LeanArgs lean;
  auto* lean_cmd = generate->add_subcommand("lean", "Minimum-jerk out-hold-return lean");
  lean_cmd->add_option("--amplitude", lean.amplitude, "Lean amplitude, m")->required();
  lean_cmd->add_option("--duration", lean.duration, "Out and return stroke duration, s")->required();
  lean_cmd->add_option("--hold", lean.hold, "Hold at full lean, s")->capture_default_str();
  lean_cmd->add_option("--direction", lean.direction, "Unit direction x,y,z (default: radial)");
  lean_cmd->add_option("--out", lean.out, "Output file name")->capture_default_str();

  FallArgs fall;
  auto* fall_cmd = generate->add_subcommand("fall", "Forward surge followed by a backward recoil");
  fall_cmd->add_option("--dip", fall.dip, "Peak forward speed, m/s")->required();
  fall_cmd->add_option("--onset", fall.onset, "Episode onset, s")->required();
  fall_cmd->add_option("--recoil", fall.recoil, "Peak backward speed, m/s (default 0.9 * dip)");
  fall_cmd->add_option("--dip-duration", fall.dip_duration, "s")->capture_default_str();
  fall_cmd->add_option("--recoil-duration", fall.recoil_duration, "s")->capture_default_str();
  fall_cmd->add_option("--settle", fall.settle, "Rest after the episode, s")->capture_default_str();
  fall_cmd->add_option("--out", fall.out, "Output file name")->capture_default_str();

  std::string sim_input;
  auto* simulate = app.add_subcommand("simulate", "Run a trajectory through the filter and the device");
  simulate->add_option("--input", sim_input, "Trajectory CSV")->required();

  std::string det_input, det_mode;
  auto* detect = app.add_subcommand("detect", "Run the software detector on a trajectory");
  detect->add_option("--input", det_input, "Trajectory CSV")->required();
  detect->add_option("--mode", det_mode, "Override the configured detector")
      ->check(CLI::IsMember({"velocity", "signature"}));

  double v_star = 0.0;
  std::string free = "f_retain";
  std::vector<double> tune_sweep;
  auto* tune = app.add_subcommand("tune", "Solve mechanism parameters for a target lock velocity");
  tune->add_option("--v-star", v_star, "Target lock velocity, m/s")->required();
  tune->add_option("--free", free, "Parameter to solve for")
      ->check(CLI::IsMember({"f_retain", "m_fly", "r_fly"}))
      ->capture_default_str();
  tune->add_option("--sweep-v-star", tune_sweep, "Also evaluate the standard suite at these targets")
      ->delimiter(',');

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "Evaluate the standard suite over a parameter grid");
  sweep->add_option("--f-retain", sw.f_retain, "N")->delimiter(',');
  sweep->add_option("--m-fly", sw.m_fly, "kg")->delimiter(',');
  sweep->add_option("--r-fly", sw.r_fly, "m")->delimiter(',');
  sweep->add_option("--window", sw.window, "SG window, samples")->delimiter(',');
  sweep->add_option("--v-lock", sw.v_lock, "Detector threshold, m/s")->delimiter(',');
  sweep->add_option("--v-star", sw.v_star, "Target lock velocities, solved into f_retain")->delimiter(',');
  sweep->add_flag("--serial", sw.serial, "Use the serial reference path");

  for (auto* sub : {generate, lean_cmd, fall_cmd, simulate, detect, tune, sweep}) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kBadInput;
  }

  try {
    if (lean_cmd->parsed()) return cmd_generate_lean(g, lean, out);
    if (fall_cmd->parsed()) return cmd_generate_fall(g, fall, out);
    if (simulate->parsed()) return cmd_simulate(g, sim_input, out);
    if (detect->parsed()) return cmd_detect(g, det_input, det_mode, out);
    if (tune->parsed()) return cmd_tune(g, v_star, free, tune_sweep, out);
    if (sweep->parsed()) return cmd_sweep(g, sw, out);
  } catch (const Exit& e) {
    err << "error: " << e.message << '\n';
    return e.code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kPipelineError;
  }
  return kBadInput;
}

}  // namespace tstab::cli
