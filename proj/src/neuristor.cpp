#include "rescomm/neuristor.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "rescomm/engine/csv.hpp"
#include "rescomm/engine/rk4.hpp"
#include "rescomm/error.hpp"

namespace rescomm {

namespace {

using Vec5 = Eigen::Matrix<double, 5, 1>;

bool positive_finite(double x) { return x > 0.0 && std::isfinite(x); }

bool next_latch(const MottChannelParams& ch, double v, bool latched) {
  const double mag = std::abs(v);
  if (mag >= ch.v_on) return true;
  if (mag <= ch.v_hold) return false;
  return latched;
}

std::size_t step_count(double duration, double dt) {
  return static_cast<std::size_t>(std::floor(duration / dt + 1e-9));
}

}  // namespace

void MottChannelParams::validate() const {
  if (!positive_finite(r_met) || !positive_finite(r_ins) || !(r_met < r_ins)) {
    throw InputError("mott channel: need 0 < r_met < r_ins");
  }
  if (!positive_finite(v_hold) || !std::isfinite(v_on) || !(v_hold < v_on)) {
    throw InputError("mott channel: need 0 < v_hold < v_on");
  }
  if (!positive_finite(tau_switch)) throw InputError("mott channel: tau_switch must be > 0");
}

void NeuristorParams::validate() const {
  ch1.validate();
  ch2.validate();
  if (!positive_finite(c1) || !positive_finite(c2) || !positive_finite(c_out)) {
    throw InputError("neuristor: capacitances must be > 0");
  }
  if (!positive_finite(r_load1) || !positive_finite(r_load2) || !positive_finite(r_out)) {
    throw InputError("neuristor: load and output resistances must be > 0");
  }
  if (!std::isfinite(v_bias1) || !std::isfinite(v_bias2) || !(v_bias1 * v_bias2 < 0.0)) {
    throw InputError("neuristor: bias sources must be non-zero with opposite polarity");
  }
}

double NeuristorParams::dt_max() const {
  const double fastest = std::min({ch1.tau_switch, ch2.tau_switch, ch1.r_met * c1, ch2.r_met * c2, r_out * c_out});
  return fastest / 10.0;
}

NeuristorState rest_state(const NeuristorParams& p) {
  p.validate();
  const double g1 = p.ch1.conductance(0.0);
  const double g2 = p.ch2.conductance(0.0);
  const double a = 1.0 / p.r_load1;
  const double b = 1.0 / p.r_load2;

  // Node equations at DC with zero input, unknowns (v1, v2).
  Eigen::Matrix2d m;
  m << a + b + g1, -b,
       -b, b + g2;
  const Eigen::Vector2d rhs(g1 * p.v_bias1, g2 * p.v_bias2);
  const Eigen::Vector2d v = m.partialPivLu().solve(rhs);

  NeuristorState s;
  s.v_c1 = v(0) - p.v_bias1;
  s.v_c2 = v(1) - p.v_bias2;
  s.v_out = v(0);
  if (std::abs(s.v_c1) >= p.ch1.v_on || std::abs(s.v_c2) >= p.ch2.v_on) {
    throw ModelError("neuristor: no resting state; a channel sits at or beyond v_on (|v_c1| = " +
                     csv::number(std::abs(s.v_c1)) + ", |v_c2| = " + csv::number(std::abs(s.v_c2)) + ")");
  }
  return s;
}

double rest_output(const NeuristorParams& p) { return rest_state(p).v_out; }

NeuristorState step_neuristor(const NeuristorParams& p, const NeuristorState& s, const InputSignal& v_in, double t,
                              double dt) {
  if (!std::isfinite(dt) || dt <= 0.0 || dt > p.dt_max() * (1.0 + 1e-9)) {
    throw InputError("step_neuristor: dt = " + csv::number(dt) + " outside (0, " + csv::number(p.dt_max()) + "]");
  }
  const Vec5 y0 = s.vector();
  if (!y0.allFinite()) throw IntegrityError("step_neuristor: non-finite state");

  const bool latch1 = next_latch(p.ch1, s.v_c1, s.metallic1);
  const bool latch2 = next_latch(p.ch2, s.v_c2, s.metallic2);
  const double target1 = latch1 ? 1.0 : 0.0;
  const double target2 = latch2 ? 1.0 : 0.0;

  auto rhs = [&](double tt, const Vec5& y) {
    const double v1 = y(0) + p.v_bias1;
    const double v2 = y(1) + p.v_bias2;
    const double i_in = (-v_in(tt) - v1) / p.r_load1;
    const double i_12 = (v1 - v2) / p.r_load2;
    const double i_m1 = p.ch1.conductance(y(3)) * y(0);
    const double i_m2 = p.ch2.conductance(y(4)) * y(1);
    const double i_out = (v1 - y(2)) / p.r_out;
    Vec5 d;
    d(0) = (i_in - i_12 - i_m1 - i_out) / p.c1;
    d(1) = (i_12 - i_m2) / p.c2;
    d(2) = i_out / p.c_out;
    d(3) = (target1 - y(3)) / p.ch1.tau_switch;
    d(4) = (target2 - y(4)) / p.ch2.tau_switch;
    return d;
  };

  const Vec5 y = rk4_step(rhs, y0, t, dt);
  if (!y.allFinite()) throw IntegrityError("step_neuristor: state became non-finite at t = " + csv::number(t + dt));

  NeuristorState next = s;
  next.v_c1 = y(0);
  next.v_c2 = y(1);
  next.v_out = y(2);
  next.x1 = std::clamp(y(3), 0.0, 1.0);
  next.x2 = std::clamp(y(4), 0.0, 1.0);
  next.metallic1 = latch1;
  next.metallic2 = latch2;
  return next;
}

NeuristorState step_neuristor(const NeuristorParams& p, const NeuristorState& s, double v_in, double dt) {
  return step_neuristor(p, s, [v_in](double) { return v_in; }, 0.0, dt);
}

SpikeDetector::SpikeDetector(double rest, double threshold, double min_separation)
    : rest_(rest), threshold_(threshold), min_separation_(min_separation) {}

std::optional<PeakEvent> SpikeDetector::feed(double t, double v) {
  std::optional<PeakEvent> out;

  if (have_prev_ && above_ && !peak_emitted_ && v < prev_v_) {
    peak_emitted_ = true;
    if (!merged_) {
      pending_ = PeakEvent{prev_t_, prev_v_ - rest_};
      last_peak_ = prev_t_;
      out = pending_;
    }
  }

  const bool now_above = v > threshold_;
  auto crossing = [&]() {
    if (!have_prev_ || v == prev_v_) return t;
    return prev_t_ + (threshold_ - prev_v_) / (v - prev_v_) * (t - prev_t_);
  };

  if (!above_ && now_above) {
    above_ = true;
    peak_emitted_ = false;
    cross_up_ = crossing();
    merged_ = last_peak_.has_value() && (cross_up_ - *last_peak_) < min_separation_;
  } else if (above_ && !now_above) {
    const double cross_down = crossing();
    if (!merged_ && pending_) spikes_.push_back(SpikeRecord{pending_->t_peak, pending_->amplitude, cross_down - cross_up_});
    pending_.reset();
    above_ = false;
  }

  have_prev_ = true;
  prev_t_ = t;
  prev_v_ = v;
  return out;
}

void SpikeDetector::finish() {
  if (!above_) return;
  if (!merged_) {
    if (!peak_emitted_) {
      pending_ = PeakEvent{prev_t_, prev_v_ - rest_};
      last_peak_ = prev_t_;
    }
    if (pending_) spikes_.push_back(SpikeRecord{pending_->t_peak, pending_->amplitude, prev_t_ - cross_up_});
  }
  pending_.reset();
  above_ = false;
}

NeuristorRun run_neuristor(const NeuristorParams& p, const WaveformSpec& stimulus, double dt, double duration,
                           const DetectionOptions& detection) {
  stimulus.validate();
  return run_neuristor(p, InputSignal([&stimulus](double t) { return stimulus.value(t); }), dt, duration, detection);
}

NeuristorRun run_neuristor(const NeuristorParams& p, const InputSignal& input, double dt, double duration,
                           const DetectionOptions& detection) {
  if (!std::isfinite(duration) || duration <= 0.0) throw InputError("run_neuristor: duration must be > 0");

  NeuristorState s = rest_state(p);
  const double v_rest = s.v_out;
  const double threshold = detection.threshold.value_or(v_rest + p.detect_offset());

  NeuristorRun run{v_rest, threshold, TraceRecorder({"v_c1", "v_c2", "v_out", "x1", "x2"}, dt), {}, {}};
  SpikeDetector detector(v_rest, threshold, detection.min_separation);
  detector.feed(0.0, s.v_out);

  const std::size_t n = step_count(duration, dt);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * dt;
    const double t_next = static_cast<double>(k + 1) * dt;
    s = step_neuristor(p, s, input, t, dt);
    run.trace.append(t_next, s.vector());
    if (auto peak = detector.feed(t_next, s.v_out)) s.t_last_spike = peak->t_peak;
  }
  detector.finish();
  run.spikes = detector.spikes();
  run.final_state = s;
  return run;
}

bool step_elicits_spike(const NeuristorParams& p, double amplitude, double dt, const ThresholdOptions& o) {
  const auto run = run_neuristor(p, WaveformSpec::step(amplitude, o.onset), dt, o.onset + o.window);
  return !run.spikes.empty();
}

double find_threshold(const NeuristorParams& p, double dt, const ThresholdOptions& o) {
  double lo = 0.0;
  double hi = 10.0 * p.ch1.v_on;
  if (step_elicits_spike(p, lo, dt, o)) throw ModelError("find_threshold: the cell spikes without input");
  if (!step_elicits_spike(p, hi, dt, o)) {
    throw ModelError("find_threshold: no spike at the upper bracket " + csv::number(hi) + " V");
  }
  while (hi - lo > o.rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    (step_elicits_spike(p, mid, dt, o) ? hi : lo) = mid;
  }
  return hi;
}

std::size_t paired_pulse_spikes(const NeuristorParams& p, double amplitude, double width, double separation, double dt,
                                const RefractoryOptions& o) {
  const auto stim = WaveformSpec::pulse_train(amplitude, o.onset, width, separation, 2);
  return run_neuristor(p, stim, dt, o.onset + separation + width + o.tail).spikes.size();
}

double measure_refractory(const NeuristorParams& p, double amplitude, double width, double dt,
                          const RefractoryOptions& o) {
  const auto single = run_neuristor(p, WaveformSpec::pulse(amplitude, o.onset, width), dt, o.onset + width + o.tail);
  if (single.spikes.empty()) throw ModelError("measure_refractory: a single pulse does not elicit a spike");

  double lo = width + dt;
  double hi = o.max_separation;
  if (paired_pulse_spikes(p, amplitude, width, lo, dt, o) >= 2) return lo;
  if (paired_pulse_spikes(p, amplitude, width, hi, dt, o) < 2) {
    throw ModelError("measure_refractory: no second spike even at separation " + csv::number(hi) + " s");
  }
  while (hi - lo > dt) {
    const double mid = 0.5 * (lo + hi);
    (paired_pulse_spikes(p, amplitude, width, mid, dt, o) >= 2 ? hi : lo) = mid;
  }
  return hi;
}

void write_spikes_csv(std::ostream& os, std::span<const SpikeRecord> spikes) {
  os << "t_peak,amplitude,width\n";
  for (const auto& s : spikes) csv::row(os, s.t_peak, s.amplitude, s.width);
}

}  // namespace rescomm
