#include "rescomm/engine/waveform.hpp"

#include <cmath>
#include <numbers>

#include "rescomm/engine/rng.hpp"
#include "rescomm/error.hpp"

namespace rescomm {

std::string_view to_string(WaveformKind kind) {
  switch (kind) {
    case WaveformKind::Constant: return "constant";
    case WaveformKind::Step: return "step";
    case WaveformKind::Pulse: return "pulse";
    case WaveformKind::PulseTrain: return "train";
    case WaveformKind::Sine: return "sine";
  }
  return "?";
}

WaveformKind parse_waveform_kind(std::string_view name) {
  if (name == "constant") return WaveformKind::Constant;
  if (name == "step") return WaveformKind::Step;
  if (name == "pulse") return WaveformKind::Pulse;
  if (name == "train" || name == "pulse_train") return WaveformKind::PulseTrain;
  if (name == "sine") return WaveformKind::Sine;
  throw InputError("unknown waveform kind '" + std::string(name) + "'");
}

WaveformSpec WaveformSpec::constant(double amplitude) {
  WaveformSpec w;
  w.amplitude = amplitude;
  return w;
}

WaveformSpec WaveformSpec::step(double amplitude, double start) {
  WaveformSpec w;
  w.kind = WaveformKind::Step;
  w.amplitude = amplitude;
  w.start = start;
  return w;
}

WaveformSpec WaveformSpec::pulse(double amplitude, double start, double width) {
  WaveformSpec w;
  w.kind = WaveformKind::Pulse;
  w.amplitude = amplitude;
  w.start = start;
  w.width = width;
  return w;
}

WaveformSpec WaveformSpec::pulse_train(double amplitude, double start, double width, double period,
                                       std::uint64_t count) {
  WaveformSpec w;
  w.kind = WaveformKind::PulseTrain;
  w.amplitude = amplitude;
  w.start = start;
  w.width = width;
  w.period = period;
  w.count = count;
  return w;
}

WaveformSpec WaveformSpec::sine(double amplitude, double frequency, double phase, double start) {
  WaveformSpec w;
  w.kind = WaveformKind::Sine;
  w.amplitude = amplitude;
  w.frequency = frequency;
  w.phase = phase;
  w.start = start;
  return w;
}

void WaveformSpec::validate() const {
  auto fail = [this](const std::string& msg) {
    throw InputError(std::string(to_string(kind)) + " waveform: " + msg);
  };
  if (!std::isfinite(amplitude)) fail("amplitude must be finite");
  if (!std::isfinite(start) || start < 0.0) fail("start must be >= 0");
  switch (kind) {
    case WaveformKind::Constant:
    case WaveformKind::Step:
      break;
    case WaveformKind::Pulse:
      if (!std::isfinite(width) || width <= 0.0) fail("width must be > 0");
      break;
    case WaveformKind::PulseTrain:
      if (!std::isfinite(width) || width <= 0.0) fail("width must be > 0");
      if (!std::isfinite(period) || period <= width) fail("period must exceed width");
      if (!(jitter >= 0.0 && jitter < 1.0)) fail("jitter must lie in [0, 1)");
      if (width + jitter * period >= period) fail("width + jitter*period must stay below the period");
      break;
    case WaveformKind::Sine:
      if (!std::isfinite(frequency) || frequency <= 0.0) fail("frequency must be > 0");
      if (!std::isfinite(phase)) fail("phase must be finite");
      break;
  }
}

double WaveformSpec::pulse_start(std::uint64_t k) const {
  double s = start + static_cast<double>(k) * period;
  if (jitter > 0.0) s += jitter * period * CounterRng(seed).uniform_at(k);
  return s;
}

double WaveformSpec::value(double t) const {
  switch (kind) {
    case WaveformKind::Constant:
      return amplitude;
    case WaveformKind::Step:
      return t >= start ? amplitude : 0.0;
    case WaveformKind::Pulse:
      return (t >= start && t < start + width) ? amplitude : 0.0;
    case WaveformKind::PulseTrain: {
      if (t < start) return 0.0;
      const double k = std::floor((t - start) / period);
      const auto idx = static_cast<std::uint64_t>(k);
      if (count != 0 && idx >= count) return 0.0;
      const double s = pulse_start(idx);
      return (t >= s && t < s + width) ? amplitude : 0.0;
    }
    case WaveformKind::Sine:
      if (t < start) return 0.0;
      return amplitude * std::sin(2.0 * std::numbers::pi * frequency * (t - start) + phase);
  }
  return 0.0;
}

}  // namespace rescomm
