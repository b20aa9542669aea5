#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "rescomm/error.hpp"
#include "rescomm/neuristor.hpp"

using namespace rescomm;

namespace {

const NeuristorParams kCell{};
constexpr double kDt = 1e-7;

/// Independent forward-Euler integration of the same circuit at a much
/// finer step, with the channel latch re-evaluated every step. Returns the
/// v_out samples.
std::vector<double> reference_output(const NeuristorParams& p, const WaveformSpec& drive, double dt, double duration) {
  const double a = 1.0 / p.r_load1;
  const double b = 1.0 / p.r_load2;
  const double g1 = 1.0 / p.ch1.r_ins;
  const double g2 = 1.0 / p.ch2.r_ins;
  // Cramer's rule on the DC node equations.
  const double m11 = a + b + g1, m12 = -b, m22 = b + g2;
  const double r1 = g1 * p.v_bias1, r2 = g2 * p.v_bias2;
  const double det = m11 * m22 - m12 * m12;
  double v1 = (r1 * m22 - m12 * r2) / det;
  double v2 = (m11 * r2 - m12 * r1) / det;
  double vo = v1;
  double x1 = 0.0, x2 = 0.0;
  bool on1 = false, on2 = false;

  std::vector<double> out;
  const auto n = static_cast<std::size_t>(std::llround(duration / dt));
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * dt;
    const double u1 = v1 - p.v_bias1;
    const double u2 = v2 - p.v_bias2;
    on1 = std::abs(u1) >= p.ch1.v_on ? true : (std::abs(u1) <= p.ch1.v_hold ? false : on1);
    on2 = std::abs(u2) >= p.ch2.v_on ? true : (std::abs(u2) <= p.ch2.v_hold ? false : on2);
    const double gm1 = x1 / p.ch1.r_met + (1 - x1) / p.ch1.r_ins;
    const double gm2 = x2 / p.ch2.r_met + (1 - x2) / p.ch2.r_ins;
    const double i_in = (-drive.value(t) - v1) / p.r_load1;
    const double i_12 = (v1 - v2) / p.r_load2;
    const double i_out = (v1 - vo) / p.r_out;
    const double dv1 = (i_in - i_12 - gm1 * u1 - i_out) / p.c1;
    const double dv2 = (i_12 - gm2 * u2) / p.c2;
    const double dvo = i_out / p.c_out;
    v1 += dt * dv1;
    v2 += dt * dv2;
    vo += dt * dvo;
    x1 += dt * ((on1 ? 1.0 : 0.0) - x1) / p.ch1.tau_switch;
    x2 += dt * ((on2 ? 1.0 : 0.0) - x2) / p.ch2.tau_switch;
    out.push_back(vo);
  }
  return out;
}

double threshold() {
  static const double t = find_threshold(kCell, kDt);
  return t;
}

double max_excursion(const NeuristorRun& run) {
  const auto v = run.trace.column(run.trace.channel_index("v_out"));
  return (v.array() - run.v_rest).abs().maxCoeff();
}

}  // namespace

TEST_CASE("rest state matches the DC node solution") {
  const auto s = rest_state(kCell);
  const auto ref = reference_output(kCell, WaveformSpec::constant(0.0), 1e-9, 1e-9);
  CHECK(s.v_out == doctest::Approx(ref.front()).epsilon(1e-9));
  CHECK(s.v_c1 == doctest::Approx(s.v_out - kCell.v_bias1));
  CHECK(std::abs(s.v_c1) < kCell.ch1.v_on);
  CHECK(std::abs(s.v_c2) < kCell.ch2.v_on);
  CHECK(s.x1 == 0.0);
  CHECK(s.x2 == 0.0);
}

TEST_CASE("a cell whose channel starts beyond v_on has no rest state") {
  NeuristorParams p = kCell;
  p.r_load1 = 1e3;
  p.r_load2 = 1e3;
  p.v_bias1 = 2.0;
  p.v_bias2 = -2.0;
  CHECK_THROWS_AS(rest_state(p), ModelError);
}

TEST_CASE("parameter invariants") {
  NeuristorParams p = kCell;
  p.v_bias2 = 1.2;
  CHECK_THROWS_AS(p.validate(), InputError);
  p = kCell;
  p.c_out = 0.0;
  CHECK_THROWS_AS(p.validate(), InputError);
  p = kCell;
  p.ch1.v_hold = 1.5;
  CHECK_THROWS_AS(p.validate(), InputError);
  p = kCell;
  p.ch2.r_met = 2e5;
  CHECK_THROWS_AS(p.validate(), InputError);
  CHECK(kCell.dt_max() == doctest::Approx(1e-7));
}

TEST_CASE("step size outside (0, dt_max] is rejected") {
  const auto s = rest_state(kCell);
  CHECK_THROWS_AS(step_neuristor(kCell, s, 0.0, 0.0), InputError);
  CHECK_THROWS_AS(step_neuristor(kCell, s, 0.0, -1e-8), InputError);
  CHECK_THROWS_AS(step_neuristor(kCell, s, 0.0, 2e-7), InputError);
  CHECK_NOTHROW(step_neuristor(kCell, s, 0.0, kCell.dt_max()));
}

TEST_CASE("non-finite state raises an integrity error") {
  auto s = rest_state(kCell);
  s.v_c2 = std::nan("");
  CHECK_THROWS_AS(step_neuristor(kCell, s, 0.0, kDt), IntegrityError);
}

TEST_CASE("unperturbed cell stays at rest") {
  const auto run = run_neuristor(kCell, WaveformSpec::constant(0.0), kDt, 1e-3);
  CHECK(run.spikes.empty());
  CHECK(run.trace.rows() == 10000);
  CHECK(max_excursion(run) < 1e-3);
}

TEST_CASE("threshold bracket: 0.99 T is silent and 1.01 T fires") {
  const double t = threshold();
  CHECK(t > 0.0);
  CHECK_FALSE(step_elicits_spike(kCell, 0.99 * t, kDt));
  CHECK(step_elicits_spike(kCell, 1.01 * t, kDt));
}

TEST_CASE("threshold is stable under dt halving") {
  CHECK(find_threshold(kCell, kDt / 2) == doctest::Approx(threshold()).epsilon(0.005));
}

TEST_CASE("threshold rises with v_on and ignores v_hold") {
  std::vector<double> by_on;
  for (double on : {1.0, 1.05, 1.1}) {
    NeuristorParams p = kCell;
    p.ch1.v_on = on;
    p.ch2.v_on = on;
    by_on.push_back(find_threshold(p, kDt));
  }
  CHECK(std::is_sorted(by_on.begin(), by_on.end()));
  CHECK(by_on.back() > 2.0 * by_on.front());

  for (double hold : {0.1, 0.2, 0.4}) {
    NeuristorParams p = kCell;
    p.ch1.v_hold = hold;
    p.ch2.v_hold = hold;
    CHECK(find_threshold(p, kDt) == doctest::Approx(threshold()).epsilon(2e-3));
  }
}

TEST_CASE("all-or-nothing amplitude over supra-threshold steps") {
  std::vector<double> amps;
  for (double f : {1.2, 1.5, 2.0, 3.0, 4.0}) {
    const auto run = run_neuristor(kCell, WaveformSpec::step(f * threshold(), 5e-6), kDt, 120e-6);
    REQUIRE_FALSE(run.spikes.empty());
    amps.push_back(run.spikes.front().amplitude);
  }
  const auto [lo, hi] = std::minmax_element(amps.begin(), amps.end());
  double mean = 0.0;
  for (double a : amps) mean += a / static_cast<double>(amps.size());
  CHECK((*hi - *lo) / mean <= 0.05);
}

TEST_CASE("spike amplitudes agree with a fine-step reference integration") {
  for (double f : {1.5, 3.0}) {
    const auto drive = WaveformSpec::step(f * threshold(), 5e-6);
    const auto run = run_neuristor(kCell, drive, kDt, 120e-6);
    REQUIRE_FALSE(run.spikes.empty());
    const auto ref = reference_output(kCell, drive, kDt / 100, 120e-6);
    // First local maximum above the detection level.
    double ref_peak = 0.0;
    for (std::size_t k = 1; k + 1 < ref.size(); ++k) {
      if (ref[k] > run.threshold && ref[k] >= ref[k - 1] && ref[k] > ref[k + 1]) {
        ref_peak = ref[k] - run.v_rest;
        break;
      }
    }
    CAPTURE(f);
    CHECK(run.spikes.front().amplitude == doctest::Approx(ref_peak).epsilon(0.02));
  }
}

TEST_CASE("sub-threshold inputs never spike and respond linearly") {
  const double t = threshold();
  for (double f : {0.25, 0.5, 0.9}) {
    CHECK(run_neuristor(kCell, WaveformSpec::step(f * t, 5e-6), kDt, 300e-6).spikes.empty());
  }
  const double quarter = max_excursion(run_neuristor(kCell, WaveformSpec::step(0.25 * t, 5e-6), kDt, 300e-6));
  const double half = max_excursion(run_neuristor(kCell, WaveformSpec::step(0.5 * t, 5e-6), kDt, 300e-6));
  CHECK(half / quarter == doctest::Approx(2.0).epsilon(0.10));
}

TEST_CASE("phase fractions stay in [0, 1]") {
  const auto run = run_neuristor(kCell, WaveformSpec::pulse_train(4.0 * threshold(), 5e-6, 20e-6, 150e-6), kDt, 600e-6);
  for (const char* ch : {"x1", "x2"}) {
    const auto x = run.trace.column(run.trace.channel_index(ch));
    CHECK(x.minCoeff() >= 0.0);
    CHECK(x.maxCoeff() <= 1.0);
  }
  CHECK(run.trace.column(run.trace.channel_index("x1")).maxCoeff() > 0.5);
}

TEST_CASE("refractory window: paired pulses") {
  const double amp = 6.0 * threshold();
  const double width = 20e-6;
  const double window = measure_refractory(kCell, amp, width, kDt);
  CHECK(window > width);
  CHECK(window < 1e-3);
  CHECK(paired_pulse_spikes(kCell, amp, width, 0.5 * (width + window), kDt) == 1);
  CHECK(paired_pulse_spikes(kCell, amp, width, window - 2 * kDt, kDt) == 1);
  CHECK(paired_pulse_spikes(kCell, amp, width, 2.0 * window, kDt) == 2);
}

TEST_CASE("a single supra-threshold pulse gives exactly one spike") {
  const auto run = run_neuristor(kCell, WaveformSpec::pulse(0.6, 10e-6, 20e-6), kDt, 300e-6);
  REQUIRE(run.spikes.size() == 1);
  const auto& s = run.spikes.front();
  CHECK(s.t_peak > 10e-6);
  CHECK(s.amplitude > run.threshold - run.v_rest);
  CHECK(s.width > 0.0);
}

TEST_CASE("periodic pulses slower than the refractory window give one spike each") {
  const double amp = 6.0 * threshold();
  const double window = measure_refractory(kCell, amp, 20e-6, kDt);
  const double period = 2.0 * window;
  const auto run = run_neuristor(kCell, WaveformSpec::pulse_train(amp, 5e-6, 20e-6, period, 4), kDt, 5e-6 + 4 * period);
  CHECK(run.spikes.size() == 4);
}

TEST_CASE("integration converges at fourth order between switching events") {
  // A fast sub-threshold sine keeps the truncation error well above roundoff.
  const double amp = 0.5 * threshold();
  auto final_out = [&](double dt) {
    auto s = rest_state(kCell);
    const auto steps = static_cast<int>(std::llround(10e-6 / dt));
    for (int k = 0; k < steps; ++k) {
      s = step_neuristor(kCell, s, [&](double t) { return amp * std::sin(2.0 * std::numbers::pi * 2e5 * t); }, k * dt,
                         dt);
    }
    REQUIRE_FALSE(s.metallic1);
    return s.v_out;
  };
  const double a = final_out(kDt);
  const double b = final_out(kDt / 2);
  const double c = final_out(kDt / 4);
  CHECK(std::log2(std::abs(a - b) / std::abs(b - c)) >= 3.5);
}

TEST_CASE("spike detector on a synthetic trace") {
  SpikeDetector det(0.0, 0.5, 10e-6);
  std::vector<PeakEvent> peaks;
  auto feed = [&](double t, double v) {
    if (auto p = det.feed(t, v)) peaks.push_back(*p);
  };
  // Two bumps 50 us apart, a third only 5 us after the second.
  for (int k = 0; k <= 1000; ++k) {
    const double t = k * 1e-7;
    auto bump = [&](double c) { return std::exp(-std::pow((t - c) / 2e-6, 2)); };
    feed(t, bump(20e-6) + bump(70e-6) + 0.8 * bump(75e-6));
  }
  det.finish();
  REQUIRE(peaks.size() == 2);
  CHECK(peaks[0].t_peak == doctest::Approx(20e-6).epsilon(1e-6));
  CHECK(peaks[0].amplitude == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(det.spikes().size() == 2);
  CHECK(det.spikes()[0].width > 0.0);
}

TEST_CASE("spike CSV layout") {
  std::ostringstream os;
  const std::vector<SpikeRecord> spikes{{1.5e-5, 0.75, 1e-5}};
  write_spikes_csv(os, spikes);
  CHECK(os.str() == "t_peak,amplitude,width\n1.5e-05,0.75,1e-05\n");
}
