#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "tstab/error.hpp"
#include "tstab/motion.hpp"
#include "tstab/signal.hpp"
#include "tstab/signal_reference.hpp"

using namespace tstab;
using namespace tstab::signal;

namespace {

Errc error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::Io;
}

double rms(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s / static_cast<double>(a.size()));
}

std::vector<double> random_walk(std::mt19937_64& rng, std::size_t n, double step) {
  std::normal_distribution<double> g(0.0, step);
  std::vector<double> v(n);
  double x = 0.0;
  for (auto& e : v) e = x += g(rng);
  return v;
}

}  // namespace

TEST_CASE("SgSpec validation") {
  CHECK(error_of([] { SgSpec{30, 3}.validate(); }) == Errc::InvalidSpec);
  CHECK(error_of([] { SgSpec{5, 4}.validate(); }) == Errc::InvalidSpec);
  CHECK(error_of([] { SgSpec{5, 0}.validate(); }) == Errc::InvalidSpec);
  CHECK_NOTHROW(SgSpec{5, 3}.validate());
  std::vector<double> x(10, 1.0);
  CHECK(error_of([&] { sg_filter(x, SgSpec{11, 3}); }) == Errc::SeriesTooShort);
}

TEST_CASE("sg_filter reproduces constants and polynomials up to its order") {
  std::vector<double> c(100, 3.25);
  for (const auto& spec : {SgSpec{5, 1}, SgSpec{31, 3}, SgSpec{11, 4}}) {
    const auto out = sg_filter(c, spec);
    for (double v : out) CHECK(v == doctest::Approx(3.25).epsilon(1e-13));
  }

  std::vector<double> cubic;
  for (int i = 0; i < 300; ++i) {
    const double t = i / 250.0;
    cubic.push_back(0.3 - 1.2 * t + 0.7 * t * t - 0.15 * t * t * t);
  }
  const auto out = sg_filter(cubic, SgSpec{21, 3});
  for (std::size_t i = 0; i < cubic.size(); ++i) CHECK(std::abs(out[i] - cubic[i]) <= 1e-9);

  // Random polynomials of degree <= order, all specs.
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  for (int trial = 0; trial < 30; ++trial) {
    const int order = 1 + trial % 4;
    const SgSpec spec{order + 2 + 2 * (trial % 7) + (order % 2 == 0 ? 1 : 0), order};
    std::vector<double> a(static_cast<std::size_t>(order) + 1);
    for (auto& e : a) e = coef(rng);
    std::vector<double> x(200);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double t = static_cast<double>(i) / 250.0;
      double p = 0.0;
      for (auto it = a.rbegin(); it != a.rend(); ++it) p = p * t + *it;
      x[i] = p;
    }
    const auto y = sg_filter(x, spec);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(y[i] - x[i]) <= 1e-9);
  }
}

TEST_CASE("sg_filter is linear") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = random_walk(rng, 400, 0.01);
    const auto y = random_walk(rng, 400, 0.02);
    const double a = 1.7, b = -0.4;
    std::vector<double> mix(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) mix[i] = a * x[i] + b * y[i];
    const SgSpec spec{31, 3};
    const auto fx = sg_filter(x, spec), fy = sg_filter(y, spec), fm = sg_filter(mix, spec);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(fm[i] - (a * fx[i] + b * fy[i])) <= 1e-9);
  }
}

TEST_CASE("sg_filter matches the serial per-window least-squares reference") {
  std::mt19937_64 rng(1);
  for (const auto& spec : {SgSpec{31, 3}, SgSpec{7, 2}, SgSpec{15, 5}, SgSpec{3, 1}}) {
    const auto x = random_walk(rng, 257, 0.05);
    const auto fast = sg_filter(x, spec);
    const auto ref = reference::sg_filter(x, spec);
    REQUIRE(fast.size() == ref.size());
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(fast[i] == doctest::Approx(ref[i]).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("sg_filter reduces noise on a 2 Hz sine") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> noise(-0.05, 0.05);
  std::vector<double> clean, noisy;
  for (int i = 0; i < 1250; ++i) {
    const double t = i / 250.0;
    clean.push_back(std::sin(2.0 * std::numbers::pi * 2.0 * t));
    noisy.push_back(clean.back() + noise(rng));
  }
  const auto smooth = sg_filter(noisy, SgSpec{31, 3});
  const double raw_err = rms(noisy, clean);
  const double smooth_err = rms(smooth, clean);
  CHECK(smooth_err < raw_err);
  CHECK(smooth_err < 0.5 * raw_err);
}

TEST_CASE("differentiate") {
  std::vector<double> ramp, quad, flat(50, 2.0);
  for (int i = 0; i < 50; ++i) {
    const double t = i / 250.0;
    ramp.push_back(0.1 + 0.5 * t);
    quad.push_back(t * t);
  }
  for (double d : differentiate(ramp, 250.0)) CHECK(d == doctest::Approx(0.5).epsilon(1e-9));
  for (double d : differentiate(flat, 250.0)) CHECK(d == 0.0);
  const auto dq = differentiate(quad, 250.0);
  for (std::size_t i = 1; i + 1 < dq.size(); ++i) CHECK(std::abs(dq[i] - 2.0 * i / 250.0) <= 1e-9);

  CHECK(error_of([] { differentiate(std::vector<double>{1.0, 2.0}, 250.0); }) == Errc::SeriesTooShort);
  CHECK(finite_difference(std::vector<double>{1.0, 2.0}, 10.0) == std::vector<double>{10.0, 10.0});
}

TEST_CASE("detect: velocity threshold basics") {
  DetectorSpec spec;
  spec.v_lock = 0.9;
  CHECK(detect(std::vector<double>(500, 0.3), 250.0, spec).empty());

  // At threshold locks (>=).
  std::vector<double> v(100, 0.0);
  v[10] = 0.9;
  auto ev = detect(v, 250.0, spec);
  REQUIRE(ev.size() == 1);
  CHECK(ev[0].t == doctest::Approx(0.04));
  CHECK(ev[0].kind == EventKind::LockTrigger);
  CHECK(ev[0].magnitude == 0.9);

  // Sustained excess re-triggers once per refractory period.
  spec.refractory = 0.2;
  ev = detect(std::vector<double>(250, 1.0), 250.0, spec, 5.0);
  REQUIRE(ev.size() == 5);
  for (std::size_t i = 0; i < ev.size(); ++i) CHECK(ev[i].t == doctest::Approx(5.0 + 0.2 * i));

  spec.v_lock = -1.0;
  CHECK(error_of([&] { detect(v, 250.0, spec); }) == Errc::InvalidSpec);
}

TEST_CASE("detect: end-to-end fall with velocity threshold") {
  const motion::AnchorConfig a;
  motion::FallProfile f;
  f.onset = 2.0;
  f.dip_speed = 1.0;
  f.recoil_speed = 0.9;
  const auto cable = motion::trajectory_to_cable(motion::gen_fall(f, a, motion::Vec3(0.25, 0, 0.1)), a);
  const auto vel = differentiate(sg_filter(cable.length, SgSpec{}), cable.sample_rate);
  DetectorSpec spec;
  spec.v_lock = 0.9;
  const auto ev = detect(vel, cable.sample_rate, spec);
  REQUIRE(ev.size() == 1);
  const double crossing = f.onset + std::asin(0.9 / 1.0) / std::numbers::pi * f.dip_duration;
  CHECK(ev[0].t >= crossing - 0.004);
  CHECK(ev[0].t <= crossing + 0.012);
}

TEST_CASE("detect: fall signature cases") {
  DetectorSpec spec;
  spec.mode = DetectorMode::FallSignature;
  spec.pair_window = 0.2;
  const double rate = 100.0;

  std::vector<double> v(200, 0.0);
  for (int i = 20; i < 30; ++i) v[i] = 1.0;
  for (int i = 35; i < 40; ++i) v[i] = -0.7;
  auto ev = detect(v, rate, spec);
  REQUIRE(ev.size() == 2);
  CHECK(ev[0].kind == EventKind::SignatureDip);
  CHECK(ev[0].t == doctest::Approx(0.20));
  CHECK(ev[1].kind == EventKind::LockTrigger);
  CHECK(ev[1].t == doctest::Approx(0.35));
  CHECK(ev[1].magnitude == -0.7);

  // Recoil arrives after the pair window.
  std::vector<double> late(200, 0.0);
  for (int i = 20; i < 30; ++i) late[i] = 1.0;
  for (int i = 60; i < 65; ++i) late[i] = -0.7;
  ev = detect(late, rate, spec);
  REQUIRE(ev.size() == 2);
  CHECK(ev[0].kind == EventKind::SignatureDip);
  CHECK(ev[1].kind == EventKind::SignatureRecoil);

  // Dip alone.
  std::vector<double> dip_only(200, 0.0);
  for (int i = 20; i < 30; ++i) dip_only[i] = 1.0;
  ev = detect(dip_only, rate, spec);
  REQUIRE(ev.size() == 1);
  CHECK(ev[0].kind == EventKind::SignatureDip);
}

TEST_CASE("detect: monotone in v_lock over random series") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> thr(0.2, 1.5);
  for (int trial = 0; trial < 100; ++trial) {
    auto v = random_walk(rng, 600, 0.05);
    DetectorSpec hi;
    hi.v_lock = thr(rng);
    hi.refractory = (trial % 4) * 0.1;
    DetectorSpec lo = hi;
    lo.v_lock = hi.v_lock * 0.8;
    const auto e_hi = detect(v, 250.0, hi);
    const auto e_lo = detect(v, 250.0, lo);
    CHECK(e_lo.size() >= e_hi.size());
    if (!e_hi.empty()) {
      REQUIRE_FALSE(e_lo.empty());
      CHECK(e_lo.front().t <= e_hi.front().t);
    }
  }
}

TEST_CASE("detect: ordering, refractory spacing and sign symmetry") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto v = random_walk(rng, 800, 0.08);
    for (auto mode : {DetectorMode::VelocityThreshold, DetectorMode::FallSignature}) {
      DetectorSpec spec;
      spec.mode = mode;
      spec.refractory = 0.3;
      const auto ev = detect(v, 250.0, spec);
      double last_lock = -1e9;
      for (std::size_t i = 0; i < ev.size(); ++i) {
        if (i > 0) CHECK(ev[i].t > ev[i - 1].t);
        if (ev[i].kind == EventKind::LockTrigger) {
          CHECK(ev[i].t - last_lock >= spec.refractory - 1e-9);
          last_lock = ev[i].t;
        }
      }
      // Latency bound: a signature lock follows its dip within the pair window.
      if (mode == DetectorMode::FallSignature) {
        for (std::size_t i = 0; i < ev.size(); ++i) {
          if (ev[i].kind != EventKind::LockTrigger) continue;
          REQUIRE(i > 0);
          CHECK(ev[i - 1].kind == EventKind::SignatureDip);
          CHECK(ev[i].t - ev[i - 1].t <= spec.pair_window + 1e-9);
        }
      }

      std::vector<double> neg(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) neg[i] = -v[i];
      const auto mirrored = detect(neg, 250.0, spec.mirrored());
      REQUIRE(mirrored.size() == ev.size());
      for (std::size_t i = 0; i < ev.size(); ++i) {
        CHECK(mirrored[i].t == ev[i].t);
        CHECK(mirrored[i].kind == ev[i].kind);
        CHECK(mirrored[i].magnitude == -ev[i].magnitude);
      }
    }
  }
}

TEST_CASE("format_events") {
  const std::vector<DetectionEvent> ev{{16.2, EventKind::LockTrigger, -0.65}};
  CHECK(format_events(ev) == "t,kind,magnitude_mps\n16.2,LockTrigger,-0.65\n");
}
