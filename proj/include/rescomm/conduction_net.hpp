#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rescomm/engine/event_queue.hpp"
#include "rescomm/engine/trace.hpp"
#include "rescomm/engine/waveform.hpp"
#include "rescomm/neuristor.hpp"

namespace rescomm {

/// Fastest conduction velocity accepted on an axon, m/s.
inline constexpr double kMaxConductionVelocity = 150.0;

enum class SynapseKind { Excitatory, Inhibitory, Modulating };

std::string_view to_string(SynapseKind kind);
SynapseKind parse_synapse_kind(std::string_view name);

/// A neuristor placed in a network. Its output is reported in a membrane
/// frame: v_m = v_rest + (v_out - v_out at circuit rest).
struct NeuronNodeParams {
  std::string id;
  NeuristorParams cell{};
  double v_rest = -0.070;
  std::optional<double> v_threshold;  // default v_rest + 0.5 * |v_bias1|

  double threshold() const { return v_threshold.value_or(v_rest + cell.detect_offset()); }
  void validate() const;
};

struct SynapseEdge {
  std::size_t src = 0;
  std::size_t dst = 0;
  SynapseKind kind = SynapseKind::Excitatory;
  double weight = 1.0;
  double axon_length = 0.0;  // m
  double velocity = kMaxConductionVelocity;

  double delay() const noexcept { return axon_length / velocity; }
  void validate() const;
};

struct Stimulus {
  std::size_t node = 0;
  WaveformSpec waveform;
};

struct NetworkConfig {
  std::vector<NeuronNodeParams> nodes;
  std::vector<SynapseEdge> edges;
  std::vector<Stimulus> stimuli;
  double dt = 1e-7;
  double duration = 1e-3;
  std::uint64_t seed = 0;
  double syn_width = 20e-6;             // s, length of the input pulse an event injects
  double modulation_duration = 200e-6;  // s, lifetime of a modulating gain
  double response_window = 50e-6;       // s, see link_events()
  double min_separation = 10e-6;        // s, spike detector merge window

  std::size_t node_index(std::string_view id) const;

  /// Throws ConfigError for dangling node ids, invalid node/edge/stimulus
  /// parameters, dt outside the cells' stable range, or a cycle made of
  /// zero-delay edges.
  void validate() const;
};

struct SpikeEvent {
  double t_deliver;
  std::size_t edge;
  double amplitude;  // V above rest at the source peak
  double t_emit;
};

struct Delivery {
  SpikeEvent event;
  double t_effective;    // grid time at which it was applied
  double contribution;   // V added to the destination input (0 for modulating)
};

struct SpikeLogEntry {
  double t_peak;
  std::size_t node;
  double amplitude;
};

struct NetworkResult {
  std::vector<TraceRecorder> traces;  // per node: v_c1, v_c2, v_out, x1, x2, v_m
  std::vector<SpikeLogEntry> spikes;
  std::vector<Delivery> deliveries;
};

/// Hybrid simulator: fixed-step RK4 for every cell plus an event queue for
/// axonal transmission, synchronised at step boundaries. Events due at or
/// before a step's start time are applied at that start time.
class Network {
 public:
  explicit Network(NetworkConfig config);

  const NetworkConfig& config() const noexcept { return config_; }

  /// Gain applied to synaptic input at `node` at time t (1 unless a
  /// modulating event is active).
  double gain(std::size_t node, double t) const;

  /// Applies an event at time `t_now` and returns the voltage added to the
  /// destination input. Excitatory: +w*A*gain, inhibitory: -w*A*gain,
  /// modulating: sets gain(dst) = w until t_now + modulation_duration and
  /// returns 0. Throws ConfigError for an unknown edge.
  double deliver(const SpikeEvent& event, double t_now);

  /// Schedules one event per outgoing edge of `src` at t_peak + delay and
  /// returns them. Incoming edges are never touched.
  std::vector<SpikeEvent> propagate_spike(std::size_t src, double t_peak, double amplitude);

  /// Synaptic input currently injected into `node` at time t.
  double synaptic_input(std::size_t node, double t) const;

  std::size_t pending_events() const noexcept { return queue_.size(); }

  /// Runs the whole configured duration from rest.
  NetworkResult run();

 private:
  struct Pulse {
    std::size_t node;
    double start;
    double end;
    double value;
  };
  struct Modulation {
    double gain;
    double expiry;
  };

  NetworkConfig config_;
  std::vector<std::vector<std::size_t>> outgoing_;
  EventQueue<SpikeEvent> queue_;
  std::unordered_map<std::size_t, Modulation> modulation_;
  std::vector<Pulse> pulses_;
};

NetworkResult run_network(const NetworkConfig& config);

/// Transmission events for one directed node pair. `sent` holds the source
/// spike times. A delivery on a src->dst edge counts as received when the
/// destination peaks within response_window after it; its timestamp is the
/// effective delivery time.
struct LinkEvents {
  std::vector<double> sent;
  std::vector<double> received;
};

LinkEvents link_events(const NetworkConfig& config, const NetworkResult& result, std::size_t src, std::size_t dst);

/// CSV `t_peak,node,amplitude` with node ids.
void write_spike_log_csv(std::ostream& os, const NetworkConfig& config, std::span<const SpikeLogEntry> spikes);

}  // namespace rescomm
