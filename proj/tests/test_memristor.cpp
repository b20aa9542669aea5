#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "rescomm/engine/rng.hpp"
#include "rescomm/error.hpp"
#include "rescomm/memristor.hpp"

using namespace rescomm;

namespace {

const MemristorParams kDefault{};

std::vector<IvSample> sine_sweep(double amplitude, double frequency, double dt = 1e-4) {
  return iv_sweep(kDefault, WaveformSpec::sine(amplitude, frequency), dt, 1.0 / frequency,
                  MemristorState::at_fraction(kDefault, 0.1));
}

}  // namespace

TEST_CASE("memristance at the boundaries and midpoint") {
  CHECK(memristance(kDefault, {kDefault.depth, 0, 0}) == doctest::Approx(100.0));
  CHECK(memristance(kDefault, {0.0, 0, 0}) == 16e3);
  CHECK(memristance(kDefault, {kDefault.depth / 2, 0, 0}) == doctest::Approx(8050.0));
}

TEST_CASE("parameter invariants") {
  CHECK_NOTHROW(kDefault.validate());
  CHECK_THROWS_AS((MemristorParams{200.0, 100.0, 1e-8, 1e-14}).validate(), InputError);
  CHECK_THROWS_AS((MemristorParams{0.0, 100.0, 1e-8, 1e-14}).validate(), InputError);
  CHECK_THROWS_AS((MemristorParams{100.0, 16e3, 0.0, 1e-14}).validate(), InputError);
  CHECK_THROWS_AS((MemristorParams{100.0, 16e3, 1e-8, -1.0}).validate(), InputError);
}

TEST_CASE("step_memristor: zero current leaves the state unchanged") {
  const MemristorState s{3e-9, 1e-6, 2e-3};
  for (double dt : {1e-9, 1e-3, 10.0}) {
    const auto n = step_memristor(kDefault, s, 0.0, dt);
    CHECK(n.w == s.w);
    CHECK(n.q == s.q);
    CHECK(n.phi == s.phi);
  }
}

TEST_CASE("step_memristor: one step equals many sub-steps while unclamped") {
  const MemristorState s = MemristorState::at_fraction(kDefault, 0.2);
  const double i = 1e-5;
  const double total = 1.0;
  const auto one = step_memristor(kDefault, s, i, total);
  MemristorState many = s;
  for (int k = 0; k < 1000; ++k) many = step_memristor(kDefault, many, i, total / 1000);
  CHECK(one.w == doctest::Approx(many.w).epsilon(1e-12));
  CHECK(one.q == doctest::Approx(many.q).epsilon(1e-12));
  CHECK(one.w > s.w);
  CHECK(one.w < kDefault.depth);
}

TEST_CASE("step_memristor: state is clamped to [0, depth]") {
  const auto up = step_memristor(kDefault, MemristorState::at_fraction(kDefault, 0.9), 1.0, 1.0);
  CHECK(up.w == kDefault.depth);
  const auto down = step_memristor(kDefault, MemristorState::at_fraction(kDefault, 0.1), -1.0, 1.0);
  CHECK(down.w == 0.0);
}

TEST_CASE("step_memristor: rejects non-finite current and bad dt") {
  const MemristorState s{};
  CHECK_THROWS_AS(step_memristor(kDefault, s, std::nan(""), 1.0), InputError);
  CHECK_THROWS_AS(step_memristor(kDefault, s, INFINITY, 1.0), InputError);
  CHECK_THROWS_AS(step_memristor(kDefault, s, 1.0, 0.0), InputError);
  CHECK_THROWS_AS(step_memristor(kDefault, s, 1.0, -1.0), InputError);
}

TEST_CASE("step_memristor: flux tracks M dq") {
  const MemristorState s = MemristorState::at_fraction(kDefault, 0.5);
  const auto n = step_memristor(kDefault, s, 2e-6, 0.5);
  CHECK(n.phi == doctest::Approx(memristance(kDefault, s) * 1e-6));
}

TEST_CASE("step_memristor: one period of sinusoidal current returns w to its start") {
  const double amp = 1e-5;
  const double omega = 2.0 * std::numbers::pi;
  const double dt = 1e-3;
  const MemristorState s0 = MemristorState::at_fraction(kDefault, 0.3);

  MemristorState s = s0;
  for (int k = 0; k < 1000; ++k) {
    const double t_mid = (k + 0.5) * dt;
    s = step_memristor(kDefault, s, amp * std::sin(omega * t_mid), dt);
  }

  // Fine-step explicit Euler reference at dt / 1000.
  double w_ref = s0.w;
  double w_max = s0.w;
  const double fine = dt / 1000.0;
  for (int k = 0; k < 1000 * 1000; ++k) {
    w_ref += kDefault.mobility * kDefault.r_on / kDefault.depth * amp * std::sin(omega * k * fine) * fine;
    w_max = std::max(w_max, w_ref);
  }
  REQUIRE(w_max < kDefault.depth);
  CHECK(std::abs(s.w - s0.w) < 1e-6 * kDefault.depth);
  CHECK(std::abs(s.w - w_ref) < 1e-6 * kDefault.depth);
}

TEST_CASE("charge determinism: reordering current samples leaves the final w unchanged") {
  const CounterRng rng(2024);
  std::vector<double> currents;
  for (std::uint64_t k = 0; k < 400; ++k) currents.push_back((rng.uniform_at(k) - 0.5) * 2e-6);
  const MemristorState s0 = MemristorState::at_fraction(kDefault, 0.5);

  auto run = [&](const std::vector<double>& seq) {
    MemristorState s = s0;
    for (double i : seq) s = step_memristor(kDefault, s, i, 1e-2);
    return s;
  };
  const auto forward = run(currents);
  auto reversed = currents;
  std::reverse(reversed.begin(), reversed.end());
  auto sorted = currents;
  std::sort(sorted.begin(), sorted.end());
  CHECK(run(reversed).w == doctest::Approx(forward.w).epsilon(1e-10));
  CHECK(run(sorted).w == doctest::Approx(forward.w).epsilon(1e-10));
  CHECK(run(sorted).q == doctest::Approx(forward.q).epsilon(1e-10));
}

TEST_CASE("memristance stays within [r_on, r_off] under random drive") {
  const CounterRng rng(7);
  MemristorState s = MemristorState::at_fraction(kDefault, 0.5);
  for (std::uint64_t k = 0; k < 5000; ++k) {
    s = step_memristor(kDefault, s, (rng.uniform_at(k) - 0.5) * 2e-3, 1e-2);
    const double m = memristance(kDefault, s);
    REQUIRE(m >= kDefault.r_on * (1 - 1e-12));
    REQUIRE(m <= kDefault.r_off * (1 + 1e-12));
  }
}

TEST_CASE("iv_sweep: zero amplitude gives (0, 0, M0) everywhere") {
  const auto samples = sine_sweep(0.0, 1.0);
  const double m0 = memristance(kDefault, MemristorState::at_fraction(kDefault, 0.1));
  CHECK(samples.size() == 10001);
  for (const auto& s : samples) {
    REQUIRE(s.v == 0.0);
    REQUIRE(s.i == 0.0);
    REQUIRE(s.m == m0);
  }
  CHECK(loop_area(samples) == 0.0);
}

TEST_CASE("iv_sweep: loop is pinched at the origin") {
  const double v0 = 1.0;
  const auto samples = sine_sweep(v0, 1.0);
  std::size_t near_zero = 0;
  for (const auto& s : samples) {
    if (std::abs(s.v) < 1e-3 * v0) {
      ++near_zero;
      CHECK(std::abs(s.i) < 1e-3 * v0 / kDefault.r_on);
    }
  }
  CHECK(near_zero >= 3);
  CHECK(pinch_residual(samples, 1e-3 * v0) < 1e-3 * v0 / kDefault.r_on);
}

TEST_CASE("iv_sweep: lobe area shrinks when the frequency doubles") {
  const double a1 = loop_area(sine_sweep(1.0, 1.0));
  const double a2 = loop_area(sine_sweep(1.0, 2.0, 5e-5));
  CHECK(a1 > 0.0);
  CHECK(a2 < a1);
  CHECK(loop_area(sine_sweep(1.0, 4.0, 2.5e-5)) < a2);
}

TEST_CASE("iv_sweep: lobe area converges under dt refinement") {
  const double coarse = loop_area(sine_sweep(1.0, 1.0, 2e-4));
  const double fine = loop_area(sine_sweep(1.0, 1.0, 5e-5));
  CHECK(coarse == doctest::Approx(fine).epsilon(1e-2));
}

TEST_CASE("iv_sweep: constant voltage follows the closed-form drift law") {
  const double v = 1.0;
  const double w0 = 0.1 * kDefault.depth;
  const double dt = 1e-4;
  const auto samples = iv_sweep(kDefault, WaveformSpec::constant(v), dt, 5.0, MemristorState{w0, 0.0, 0.0});
  double previous_m = samples.front().m;
  for (std::size_t k = 1; k < samples.size(); ++k) {
    const auto& s = samples[k];
    REQUIRE(s.m <= previous_m);
    previous_m = s.m;
    if (s.w < 0.9 * kDefault.depth) {
      const double w_ref =
          oracle::drift_width(kDefault.r_on, kDefault.r_off, kDefault.depth, kDefault.mobility, v, w0, s.t);
      REQUIRE(std::abs(s.w - w_ref) < 1e-9 * kDefault.depth);
    }
  }
  CHECK(samples.back().m == doctest::Approx(kDefault.r_on));
}

TEST_CASE("iv_sweep: rejects bad arguments") {
  const auto drive = WaveformSpec::sine(1.0, 1.0);
  CHECK_THROWS_AS(iv_sweep(kDefault, drive, 0.0, 1.0, {}), InputError);
  CHECK_THROWS_AS(iv_sweep(kDefault, drive, -1e-3, 1.0, {}), InputError);
  CHECK_THROWS_AS(iv_sweep(kDefault, drive, 1e-3, 0.0, {}), InputError);
  CHECK_THROWS_AS(iv_sweep(kDefault, WaveformSpec::sine(1.0, 0.0), 1e-3, 1.0, {}), InputError);
}

TEST_CASE("iv CSV layout") {
  const auto samples = iv_sweep(kDefault, WaveformSpec::constant(0.0), 0.5, 1.0, {});
  std::ostringstream os;
  write_iv_csv(os, samples);
  CHECK(os.str() == "t,v,i,m\n0,0,0,16000\n0.5,0,0,16000\n1,0,0,16000\n");
}
