#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rescomm/engine/trace.hpp"
#include "rescomm/engine/waveform.hpp"

namespace rescomm {

/// First-order hysteretic Mott switch. The channel latches metallic when
/// |v| reaches v_on and insulating when |v| falls to v_hold; between the
/// two it keeps its previous phase. The phase fraction x relaxes toward the
/// latched phase with time constant tau_switch.
struct MottChannelParams {
  double r_ins = 100e3;       // ohm
  double r_met = 1e3;         // ohm
  double v_on = 1.0;          // V
  double v_hold = 0.3;        // V
  double tau_switch = 1e-6;   // s

  void validate() const;

  /// 1/R(x) = x/r_met + (1-x)/r_ins
  double conductance(double x) const noexcept { return x / r_met + (1.0 - x) / r_ins; }
};

/// Two-channel neuristor.
///
///   v_in --[-1]--r_load1--+--r_load2--+
///                         |           |
///                   M1 || C1    M2 || C2
///                         |           |
///                     v_bias1     v_bias2
///                         |
///                         +--r_out--+-- v_out
///                                   |
///                                 c_out
///
/// Each Mott channel sits in parallel with its capacitor between a node and
/// its bias source, so the capacitor voltage is the channel voltage. The
/// input stage inverts (a transistor stage), which makes a positive v_in
/// pull node 1 away from v_bias1 and toward the switching threshold.
/// Firing M1 drags node 1 to v_bias1; that swing, filtered by r_out/c_out,
/// is the output spike. Channel 2 loads node 1 from the opposite rail.
struct NeuristorParams {
  MottChannelParams ch1{};
  MottChannelParams ch2{};
  double c1 = 1e-9;         // F
  double c2 = 1e-9;         // F
  double v_bias1 = 1.2;     // V
  double v_bias2 = -1.2;    // V
  double r_load1 = 150e3;   // ohm
  double r_load2 = 82e3;    // ohm
  double r_out = 100e3;     // ohm
  double c_out = 10e-12;    // F

  void validate() const;

  /// Largest accepted step: a tenth of the fastest switching or RC constant.
  double dt_max() const;

  /// Default spike detection level relative to rest: 0.5 * |v_bias1|.
  double detect_offset() const { return 0.5 * std::abs(v_bias1); }
};

struct NeuristorState {
  double v_c1 = 0.0;   // V across C1 / M1
  double v_c2 = 0.0;   // V across C2 / M2
  double v_out = 0.0;  // V
  double x1 = 0.0;     // metallic fraction of M1
  double x2 = 0.0;
  bool metallic1 = false;  // latched phase of M1
  bool metallic2 = false;
  std::optional<double> t_last_spike;

  Eigen::Matrix<double, 5, 1> vector() const { return {v_c1, v_c2, v_out, x1, x2}; }
};

/// DC equilibrium with both channels insulating and zero input. Throws
/// ModelError when a channel would already sit at or beyond v_on (the cell
/// would oscillate instead of resting).
NeuristorState rest_state(const NeuristorParams& params);

/// Output voltage of the rest state.
double rest_output(const NeuristorParams& params);

using InputSignal = std::function<double(double)>;

/// One RK4 step from t to t+dt with the input evaluated at the stage times.
/// Channel phases are latched from the state at t and held for the step.
/// Throws InputError when dt is outside (0, dt_max] and IntegrityError when
/// the result is not finite.
NeuristorState step_neuristor(const NeuristorParams& params, const NeuristorState& state, const InputSignal& v_in,
                              double t, double dt);

/// Constant-input convenience overload.
NeuristorState step_neuristor(const NeuristorParams& params, const NeuristorState& state, double v_in, double dt);

struct SpikeRecord {
  double t_peak;     // s
  double amplitude;  // V above rest
  double width;      // s spent above the detection level
};

struct PeakEvent {
  double t_peak;
  double amplitude;
};

/// Streaming spike detector. A spike is the first local maximum of an
/// excursion above `threshold`; excursions that start within
/// `min_separation` of the previous peak belong to that spike.
class SpikeDetector {
 public:
  SpikeDetector(double rest, double threshold, double min_separation);

  /// Feed the next sample; returns the peak once it is confirmed (one
  /// sample later).
  std::optional<PeakEvent> feed(double t, double v);

  /// Closes an excursion still open at the end of the record.
  void finish();

  const std::vector<SpikeRecord>& spikes() const noexcept { return spikes_; }

 private:
  double rest_;
  double threshold_;
  double min_separation_;
  bool have_prev_ = false;
  double prev_t_ = 0.0;
  double prev_v_ = 0.0;
  bool above_ = false;
  bool merged_ = false;
  bool peak_emitted_ = false;
  double cross_up_ = 0.0;
  std::optional<PeakEvent> pending_;
  std::optional<double> last_peak_;
  std::vector<SpikeRecord> spikes_;
};

struct DetectionOptions {
  /// Absolute v_out level; defaults to rest + 0.5 * |v_bias1|.
  std::optional<double> threshold;
  double min_separation = 10e-6;
};

struct NeuristorRun {
  double v_rest;
  double threshold;
  TraceRecorder trace;  // channels v_c1, v_c2, v_out, x1, x2
  std::vector<SpikeRecord> spikes;
  NeuristorState final_state;
};

/// Integrates from rest for floor(duration/dt) steps.
NeuristorRun run_neuristor(const NeuristorParams& params, const WaveformSpec& stimulus, double dt, double duration,
                           const DetectionOptions& detection = {});

/// Same, driven by an arbitrary input signal.
NeuristorRun run_neuristor(const NeuristorParams& params, const InputSignal& input, double dt, double duration,
                           const DetectionOptions& detection = {});

struct ThresholdOptions {
  double onset = 5e-6;     // step start
  double window = 300e-6;  // observation time after the onset
  double rel_tol = 1e-3;
};

/// Smallest step amplitude that produces a spike within the observation
/// window, found by bisection on [0, 10 * ch1.v_on]. Throws ModelError when
/// the upper bracket does not spike or the cell spikes without input.
double find_threshold(const NeuristorParams& params, double dt, const ThresholdOptions& options = {});

/// True when a step of `amplitude` produces at least one spike.
bool step_elicits_spike(const NeuristorParams& params, double amplitude, double dt,
                        const ThresholdOptions& options = {});

struct RefractoryOptions {
  double onset = 5e-6;
  double tail = 300e-6;        // observation after the second pulse
  double max_separation = 2e-3;
};

/// Number of spikes elicited by two pulses whose starts are `separation` apart.
std::size_t paired_pulse_spikes(const NeuristorParams& params, double amplitude, double width, double separation,
                                double dt, const RefractoryOptions& options = {});

/// Smallest pulse separation at which a second pulse of the given shape
/// elicits a second spike (bisection, resolved to dt). Throws ModelError
/// when even max_separation yields a single spike or a single pulse does
/// not fire.
double measure_refractory(const NeuristorParams& params, double amplitude, double width, double dt,
                          const RefractoryOptions& options = {});

void write_spikes_csv(std::ostream& os, std::span<const SpikeRecord> spikes);

}  // namespace rescomm
