#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace tstab::signal {

/// Savitzky-Golay smoothing window. Defaults: 31 samples (124 ms at 250 Hz), cubic.
struct SgSpec {
  int window = 31;
  int order = 3;

  void validate() const;
  friend bool operator==(const SgSpec&, const SgSpec&) = default;
};

enum class DetectorMode { VelocityThreshold, FallSignature };

struct DetectorSpec {
  DetectorMode mode = DetectorMode::VelocityThreshold;
  double v_lock = 0.9;       // m/s
  double dip_min = 0.8;      // m/s, forward surge that arms the signature
  double recoil_min = 0.6;   // m/s, backward correction that confirms it
  double pair_window = 0.5;  // s, max dip-to-recoil separation
  double refractory = 1.0;   // s after a LockTrigger with no further events
  int polarity = +1;         // -1 inverts which velocity sign counts as "forward"

  void validate() const;
  /// Same detector for a sign-reversed velocity convention.
  DetectorSpec mirrored() const;
};

enum class EventKind { LockTrigger, SignatureDip, SignatureRecoil };

std::string_view to_string(EventKind kind) noexcept;

struct DetectionEvent {
  double t = 0.0;
  EventKind kind = EventKind::LockTrigger;
  double magnitude = 0.0;  // signed velocity at the event sample, m/s

  friend bool operator==(const DetectionEvent&, const DetectionEvent&) = default;
};

/// Hat matrix of the local polynomial fit: row j holds the weights that
/// evaluate the least-squares polynomial at window position j.
Eigen::MatrixXd sg_weights(const SgSpec& spec);

/// Savitzky-Golay smoothing. Edges evaluate the one-sided window's fit at the
/// edge sample instead of padding. Output points are computed in parallel.
std::vector<double> sg_filter(std::span<const double> series, const SgSpec& spec);

/// Central differences inside, second-order one-sided at the ends (first
/// order when only two samples exist). Requires at least two samples.
std::vector<double> finite_difference(std::span<const double> series, double rate);

/// finite_difference with the public precondition of at least three samples.
std::vector<double> differentiate(std::span<const double> series, double rate);

std::vector<DetectionEvent> detect(std::span<const double> velocity, double rate,
                                   const DetectorSpec& spec, double t0 = 0.0);

/// `t,kind,magnitude_mps`
std::string format_events(std::span<const DetectionEvent> events);

}  // namespace tstab::signal
