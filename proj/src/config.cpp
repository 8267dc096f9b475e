#include "tstab/config.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <variant>
#include <vector>

#include "tstab/csv.hpp"
#include "tstab/error.hpp"

namespace tstab {

RunConfig::RunConfig() {
  left.anchor.device_anchor = {0.0, 0.15, 0.0};
  left.start_pos = {0.25, 0.15, 0.10};
  right.anchor.device_anchor = {0.0, -0.15, 0.0};
  right.start_pos = {0.25, -0.15, 0.10};
}

void RunConfig::validate() const {
  device.validate();
  detector.validate();
  sg.validate();
  left.anchor.validate();
  right.anchor.validate();
  if (!(rate > 0.0) || !std::isfinite(rate)) throw Error(Errc::InvalidSpec, "rate_hz must be > 0");
  if (!(jitter >= 0.0) || !std::isfinite(jitter)) throw Error(Errc::InvalidSpec, "jitter_m must be >= 0");
}

namespace {

using Value = std::variant<double, std::string, std::vector<double>>;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

Value parse_value(std::string_view raw, int line_no) {
  const auto v = trim(raw);
  auto fail = [&](const std::string& why) {
    return Error(Errc::Parse, "line " + std::to_string(line_no) + ": " + why);
  };
  if (v.empty()) throw fail("missing value");
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"') throw fail("unterminated string");
    return std::string(v.substr(1, v.size() - 2));
  }
  if (v.front() == '[') {
    if (v.back() != ']') throw fail("unterminated array");
    std::vector<double> out;
    const auto inner = trim(v.substr(1, v.size() - 2));
    if (!inner.empty()) {
      for (auto item : csv::split(inner)) out.push_back(csv::parse_number(item));
    }
    return out;
  }
  return csv::parse_number(v);
}

using Binder = std::function<void(RunConfig&, const Value&, const std::string&)>;

Binder real(double RunConfig::*field) {
  return [field](RunConfig& c, const Value& v, const std::string& key) {
    if (!std::holds_alternative<double>(v)) throw Error(Errc::Parse, key + " expects a number");
    c.*field = std::get<double>(v);
  };
}

template <class Fn>
Binder number(Fn apply) {
  return [apply](RunConfig& c, const Value& v, const std::string& key) {
    if (!std::holds_alternative<double>(v)) throw Error(Errc::Parse, key + " expects a number");
    apply(c, std::get<double>(v));
  };
}

template <class Fn>
Binder integer(Fn apply) {
  return [apply](RunConfig& c, const Value& v, const std::string& key) {
    if (!std::holds_alternative<double>(v)) throw Error(Errc::Parse, key + " expects an integer");
    const double d = std::get<double>(v);
    if (d != std::floor(d) || std::abs(d) > 1e9) throw Error(Errc::Parse, key + " expects an integer");
    apply(c, static_cast<int>(d));
  };
}

template <class Fn>
Binder vec3(Fn apply) {
  return [apply](RunConfig& c, const Value& v, const std::string& key) {
    if (!std::holds_alternative<std::vector<double>>(v) || std::get<std::vector<double>>(v).size() != 3) {
      throw Error(Errc::Parse, key + " expects [x, y, z]");
    }
    const auto& a = std::get<std::vector<double>>(v);
    apply(c, motion::Vec3(a[0], a[1], a[2]));
  };
}

const std::map<std::string, Binder>& binders() {
  static const std::map<std::string, Binder> table = [] {
    std::map<std::string, Binder> b;
    b["device.r_capstan_m"] = number([](RunConfig& c, double v) { c.device.r_capstan = v; });
    b["device.k_coil_nm_per_rad"] = number([](RunConfig& c, double v) { c.device.k_coil = v; });
    b["device.tau0_coil_nm"] = number([](RunConfig& c, double v) { c.device.tau0_coil = v; });
    b["device.m_fly_kg"] = number([](RunConfig& c, double v) { c.device.m_fly = v; });
    b["device.r_fly_m"] = number([](RunConfig& c, double v) { c.device.r_fly = v; });
    b["device.f_retain_n"] = number([](RunConfig& c, double v) { c.device.F_retain = v; });
    b["device.n_fly"] = integer([](RunConfig& c, int v) { c.device.n_fly = v; });
    b["device.k1_block_n_per_m"] = number([](RunConfig& c, double v) { c.device.k1_block = v; });
    b["device.k3_block_n_per_m3"] = number([](RunConfig& c, double v) { c.device.k3_block = v; });
    b["device.x_block_max_m"] = number([](RunConfig& c, double v) { c.device.x_block_max = v; });
    b["device.l_max_m"] = number([](RunConfig& c, double v) { c.device.L_max = v; });
    b["device.eps_tension_n"] = number([](RunConfig& c, double v) { c.device.eps_tension = v; });

    b["detector.mode"] = [](RunConfig& c, const Value& v, const std::string& key) {
      const auto* s = std::get_if<std::string>(&v);
      if (s && *s == "velocity") {
        c.detector.mode = signal::DetectorMode::VelocityThreshold;
      } else if (s && *s == "signature") {
        c.detector.mode = signal::DetectorMode::FallSignature;
      } else {
        throw Error(Errc::Parse, key + " must be \"velocity\" or \"signature\"");
      }
    };
    b["detector.v_lock_mps"] = number([](RunConfig& c, double v) { c.detector.v_lock = v; });
    b["detector.dip_min_mps"] = number([](RunConfig& c, double v) { c.detector.dip_min = v; });
    b["detector.recoil_min_mps"] = number([](RunConfig& c, double v) { c.detector.recoil_min = v; });
    b["detector.pair_window_s"] = number([](RunConfig& c, double v) { c.detector.pair_window = v; });
    b["detector.refractory_s"] = number([](RunConfig& c, double v) { c.detector.refractory = v; });
    b["detector.polarity"] = integer([](RunConfig& c, int v) { c.detector.polarity = v; });

    b["sg.window"] = integer([](RunConfig& c, int v) { c.sg.window = v; });
    b["sg.order"] = integer([](RunConfig& c, int v) { c.sg.order = v; });

    for (const auto& [name, member] : {std::pair{"left", &RunConfig::left}, std::pair{"right", &RunConfig::right}}) {
      const std::string prefix = std::string("anchor.") + name + ".";
      auto m = member;
      b[prefix + "device_anchor_m"] = vec3([m](RunConfig& c, const motion::Vec3& v) { (c.*m).anchor.device_anchor = v; });
      b[prefix + "body_anchor_offset_m"] =
          vec3([m](RunConfig& c, const motion::Vec3& v) { (c.*m).anchor.body_anchor_offset = v; });
      b[prefix + "start_pos_m"] = vec3([m](RunConfig& c, const motion::Vec3& v) { (c.*m).start_pos = v; });
    }

    b["motion.rate_hz"] = real(&RunConfig::rate);
    b["motion.jitter_m"] = real(&RunConfig::jitter);
    return b;
  }();
  return table;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  RunConfig config;
  std::string section;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(strip_comment(text.substr(start, end - start)));
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw Error(Errc::Parse, "line " + std::to_string(line_no) + ": bad section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(Errc::Parse, "line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = (section.empty() ? "" : section + ".") + std::string(trim(line.substr(0, eq)));
    const auto it = binders().find(key);
    if (it == binders().end()) throw Error(Errc::Parse, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    it->second(config, parse_value(line.substr(eq + 1), line_no), key);
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) { return parse_config(csv::read_file(path)); }

namespace {

std::string vec(const motion::Vec3& v) {
  return "[" + csv::format_number(v.x()) + ", " + csv::format_number(v.y()) + ", " + csv::format_number(v.z()) + "]";
}

}  // namespace

std::string format_config(const RunConfig& c) {
  using csv::format_number;
  std::string o;
  auto kv = [&o](std::string_view key, const std::string& value) {
    o += key;
    o += " = ";
    o += value;
    o += '\n';
  };
  o += "# Torso stabiliser run configuration. SI units; the suffix names the unit.\n\n[device]\n";
  kv("r_capstan_m", format_number(c.device.r_capstan));
  kv("k_coil_nm_per_rad", format_number(c.device.k_coil));
  kv("tau0_coil_nm", format_number(c.device.tau0_coil));
  kv("m_fly_kg", format_number(c.device.m_fly));
  kv("r_fly_m", format_number(c.device.r_fly));
  kv("f_retain_n", format_number(c.device.F_retain));
  kv("n_fly", std::to_string(c.device.n_fly));
  kv("k1_block_n_per_m", format_number(c.device.k1_block));
  kv("k3_block_n_per_m3", format_number(c.device.k3_block));
  kv("x_block_max_m", format_number(c.device.x_block_max));
  kv("l_max_m", format_number(c.device.L_max));
  kv("eps_tension_n", format_number(c.device.eps_tension));

  o += "\n[detector]\n";
  kv("mode", c.detector.mode == signal::DetectorMode::VelocityThreshold ? "\"velocity\"" : "\"signature\"");
  kv("v_lock_mps", format_number(c.detector.v_lock));
  kv("dip_min_mps", format_number(c.detector.dip_min));
  kv("recoil_min_mps", format_number(c.detector.recoil_min));
  kv("pair_window_s", format_number(c.detector.pair_window));
  kv("refractory_s", format_number(c.detector.refractory));
  kv("polarity", std::to_string(c.detector.polarity));

  o += "\n[sg]\n";
  kv("window", std::to_string(c.sg.window));
  kv("order", std::to_string(c.sg.order));

  for (const auto& [name, side] : {std::pair{"left", &c.left}, std::pair{"right", &c.right}}) {
    o += std::string("\n[anchor.") + name + "]\n";
    kv("device_anchor_m", vec(side->anchor.device_anchor));
    kv("body_anchor_offset_m", vec(side->anchor.body_anchor_offset));
    kv("start_pos_m", vec(side->start_pos));
  }

  o += "\n[motion]\n";
  kv("rate_hz", format_number(c.rate));
  kv("jitter_m", format_number(c.jitter));
  return o;
}

}  // namespace tstab
