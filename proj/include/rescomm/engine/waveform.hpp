#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace rescomm {

enum class WaveformKind { Constant, Step, Pulse, PulseTrain, Sine };

std::string_view to_string(WaveformKind kind);
/// Accepts "constant", "step", "pulse", "train" (or "pulse_train"), "sine".
WaveformKind parse_waveform_kind(std::string_view name);

/// Deterministic drive signal. Units follow the consumer: volts for the
/// neuristor and the memristor sweep, amperes for current-driven memristors.
///
/// Timing fields a kind does not use are ignored. A pulse train with
/// `jitter > 0` shifts pulse k later by `jitter * period * u_k`, where u_k is
/// draw k of the counter-based generator keyed by `seed`.
struct WaveformSpec {
  WaveformKind kind = WaveformKind::Constant;
  double amplitude = 0.0;
  double start = 0.0;
  double width = 0.0;
  double period = 0.0;
  double frequency = 0.0;
  double phase = 0.0;
  std::uint64_t count = 0;  // pulse-train length; 0 = unbounded
  double jitter = 0.0;      // fraction of the period, [0, 1)
  std::uint64_t seed = 0;

  static WaveformSpec constant(double amplitude);
  static WaveformSpec step(double amplitude, double start);
  static WaveformSpec pulse(double amplitude, double start, double width);
  static WaveformSpec pulse_train(double amplitude, double start, double width, double period,
                                  std::uint64_t count = 0);
  static WaveformSpec sine(double amplitude, double frequency, double phase = 0.0, double start = 0.0);

  /// Throws InputError when an invariant is violated (negative times,
  /// period <= width for trains, non-positive sine frequency, ...).
  void validate() const;

  double value(double t) const;

  /// Start time of pulse `k` of a train (includes jitter).
  double pulse_start(std::uint64_t k) const;
};

}  // namespace rescomm
