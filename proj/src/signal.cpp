#include "tstab/signal.hpp"

#include <cmath>
#include <optional>

#include <Eigen/QR>

#include "tstab/csv.hpp"
#include "tstab/error.hpp"

namespace tstab::signal {

void SgSpec::validate() const {
  if (order < 1) throw Error(Errc::InvalidSpec, "SG order must be >= 1");
  if (window % 2 == 0) throw Error(Errc::InvalidSpec, "SG window must be odd");
  if (window < order + 2) throw Error(Errc::InvalidSpec, "SG window must be >= order + 2");
}

void DetectorSpec::validate() const {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(v_lock)) throw Error(Errc::InvalidSpec, "v_lock must be > 0");
  if (!positive(dip_min)) throw Error(Errc::InvalidSpec, "dip_min must be > 0");
  if (!positive(recoil_min)) throw Error(Errc::InvalidSpec, "recoil_min must be > 0");
  if (!positive(pair_window)) throw Error(Errc::InvalidSpec, "pair_window must be > 0");
  if (!(refractory >= 0.0) || !std::isfinite(refractory)) {
    throw Error(Errc::InvalidSpec, "refractory must be >= 0");
  }
  if (polarity != 1 && polarity != -1) throw Error(Errc::InvalidSpec, "polarity must be +1 or -1");
}

DetectorSpec DetectorSpec::mirrored() const {
  DetectorSpec m = *this;
  m.polarity = -polarity;
  return m;
}

std::string_view to_string(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::LockTrigger: return "LockTrigger";
    case EventKind::SignatureDip: return "SignatureDip";
    case EventKind::SignatureRecoil: return "SignatureRecoil";
  }
  return "Unknown";
}

Eigen::MatrixXd sg_weights(const SgSpec& spec) {
  spec.validate();
  const int w = spec.window;
  const int h = w / 2;
  // Abscissa scaled to [-1, 1] keeps the Vandermonde matrix well conditioned.
  Eigen::MatrixXd vander(w, spec.order + 1);
  for (int j = 0; j < w; ++j) {
    const double x = static_cast<double>(j - h) / static_cast<double>(h);
    double p = 1.0;
    for (int k = 0; k <= spec.order; ++k) {
      vander(j, k) = p;
      p *= x;
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(vander);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(w, spec.order + 1);
  return q * q.transpose();
}

std::vector<double> sg_filter(std::span<const double> series, const SgSpec& spec) {
  spec.validate();
  const auto n = static_cast<std::ptrdiff_t>(series.size());
  const std::ptrdiff_t w = spec.window;
  const std::ptrdiff_t h = w / 2;
  if (n < w) throw Error(Errc::SeriesTooShort, "series shorter than the SG window");

  const Eigen::MatrixXd hat = sg_weights(spec);
  std::vector<double> out(series.size());

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    std::ptrdiff_t start = i - h;
    std::ptrdiff_t row = h;
    if (i < h) {
      start = 0;
      row = i;
    } else if (i >= n - h) {
      start = n - w;
      row = i - start;
    }
    double acc = 0.0;
    for (std::ptrdiff_t j = 0; j < w; ++j) acc += hat(row, j) * series[static_cast<std::size_t>(start + j)];
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

std::vector<double> finite_difference(std::span<const double> x, double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw Error(Errc::InvalidSpec, "rate must be > 0");
  const std::size_t n = x.size();
  if (n < 2) throw Error(Errc::SeriesTooShort, "need at least 2 samples to differentiate");
  std::vector<double> d(n);
  if (n == 2) {
    d[0] = d[1] = (x[1] - x[0]) * rate;
    return d;
  }
  const double half = 0.5 * rate;
  d[0] = (4.0 * (x[1] - x[0]) - (x[2] - x[0])) * half;
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (x[i + 1] - x[i - 1]) * half;
  d[n - 1] = (4.0 * (x[n - 1] - x[n - 2]) - (x[n - 1] - x[n - 3])) * half;
  return d;
}

std::vector<double> differentiate(std::span<const double> series, double rate) {
  if (series.size() < 3) throw Error(Errc::SeriesTooShort, "need at least 3 samples to differentiate");
  return finite_difference(series, rate);
}

namespace {

std::ptrdiff_t to_samples_ceil(double seconds, double rate) {
  return static_cast<std::ptrdiff_t>(std::ceil(seconds * rate - 1e-9));
}

std::ptrdiff_t to_samples_floor(double seconds, double rate) {
  return static_cast<std::ptrdiff_t>(std::floor(seconds * rate + 1e-9));
}

}  // namespace

std::vector<DetectionEvent> detect(std::span<const double> velocity, double rate,
                                   const DetectorSpec& spec, double t0) {
  spec.validate();
  if (!(rate > 0.0) || !std::isfinite(rate)) throw Error(Errc::InvalidSpec, "rate must be > 0");

  const auto refractory = to_samples_ceil(spec.refractory, rate);
  const auto pair_window = to_samples_floor(spec.pair_window, rate);
  const double sign = static_cast<double>(spec.polarity);
  auto time_of = [&](std::ptrdiff_t i) { return t0 + static_cast<double>(i) / rate; };

  std::vector<DetectionEvent> events;
  std::optional<std::ptrdiff_t> last_lock;
  auto refractory_active = [&](std::ptrdiff_t i) { return last_lock && i - *last_lock < refractory; };

  const auto n = static_cast<std::ptrdiff_t>(velocity.size());

  if (spec.mode == DetectorMode::VelocityThreshold) {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const double v = velocity[static_cast<std::size_t>(i)];
      if (sign * v >= spec.v_lock && !refractory_active(i)) {
        events.push_back({time_of(i), EventKind::LockTrigger, v});
        last_lock = i;
      }
    }
    return events;
  }

  bool armed = false;
  std::ptrdiff_t dip_at = 0;
  bool above_prev = false;
  bool below_prev = false;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double v = velocity[static_cast<std::size_t>(i)];
    const bool above = sign * v >= spec.dip_min;
    const bool below = sign * v <= -spec.recoil_min;

    if (refractory_active(i)) {
      armed = false;
    } else {
      if (armed && i - dip_at > pair_window) armed = false;
      if (below && armed) {
        events.push_back({time_of(i), EventKind::LockTrigger, v});
        last_lock = i;
        armed = false;
      } else if (below && !below_prev) {
        events.push_back({time_of(i), EventKind::SignatureRecoil, v});
      } else if (above && !above_prev) {
        events.push_back({time_of(i), EventKind::SignatureDip, v});
        armed = true;
        dip_at = i;
      }
    }
    above_prev = above;
    below_prev = below;
  }
  return events;
}

std::string format_events(std::span<const DetectionEvent> events) {
  std::string out = "t,kind,magnitude_mps\n";
  for (const auto& e : events) {
    out += csv::format_number(e.t);
    out += ',';
    out += to_string(e.kind);
    out += ',';
    out += csv::format_number(e.magnitude);
    out += '\n';
  }
  return out;
}

}  // namespace tstab::signal
