#include "rescomm/conduction_net.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>

#include "rescomm/engine/csv.hpp"
#include "rescomm/engine/rng.hpp"
#include "rescomm/error.hpp"

namespace rescomm {

namespace {

ConfigError invariant(const std::string& what) { return ConfigError(ConfigError::Kind::Invariant, 0, what); }

}  // namespace

std::string_view to_string(SynapseKind kind) {
  switch (kind) {
    case SynapseKind::Excitatory: return "excitatory";
    case SynapseKind::Inhibitory: return "inhibitory";
    case SynapseKind::Modulating: return "modulating";
  }
  return "?";
}

SynapseKind parse_synapse_kind(std::string_view name) {
  if (name == "excitatory" || name == "exc") return SynapseKind::Excitatory;
  if (name == "inhibitory" || name == "inh") return SynapseKind::Inhibitory;
  if (name == "modulating" || name == "mod") return SynapseKind::Modulating;
  throw InputError("unknown synapse kind '" + std::string(name) + "'");
}

void NeuronNodeParams::validate() const {
  cell.validate();
  if (!std::isfinite(v_rest)) throw InputError("node " + id + ": v_rest must be finite");
  if (!(threshold() > v_rest)) throw InputError("node " + id + ": v_threshold must exceed v_rest");
}

void SynapseEdge::validate() const {
  if (!(velocity > 0.0 && velocity <= kMaxConductionVelocity)) {
    throw InputError("edge: velocity must lie in (0, 150] m/s");
  }
  if (!(axon_length >= 0.0 && std::isfinite(axon_length))) throw InputError("edge: axon length must be >= 0");
  if (!(weight >= 0.0 && std::isfinite(weight))) throw InputError("edge: weight must be >= 0");
}

std::size_t NetworkConfig::node_index(std::string_view id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id == id) return i;
  }
  throw ConfigError(ConfigError::Kind::DanglingReference, 0, "unknown node '" + std::string(id) + "'");
}

void NetworkConfig::validate() const {
  if (!(dt > 0.0 && std::isfinite(dt))) throw invariant("dt must be > 0");
  if (!(duration >= dt && std::isfinite(duration))) throw invariant("duration must be >= dt");
  for (double x : {syn_width, modulation_duration, response_window}) {
    if (!(x > 0.0 && std::isfinite(x))) throw invariant("network timing parameters must be > 0");
  }
  if (!(min_separation >= 0.0)) throw invariant("min_separation must be >= 0");

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    try {
      nodes[i].validate();
      if (dt > nodes[i].cell.dt_max() * (1.0 + 1e-9)) {
        throw InputError("dt exceeds the stable step " + csv::number(nodes[i].cell.dt_max()) + " s");
      }
    } catch (const InputError& e) {
      throw invariant("node '" + nodes[i].id + "': " + e.what());
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (nodes[j].id == nodes[i].id) throw invariant("duplicate node id '" + nodes[i].id + "'");
    }
  }

  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto& edge = edges[e];
    if (edge.src >= nodes.size() || edge.dst >= nodes.size()) {
      throw ConfigError(ConfigError::Kind::DanglingReference, 0, "edge " + std::to_string(e) + " references a missing node");
    }
    try {
      edge.validate();
    } catch (const InputError& err) {
      throw invariant("edge " + std::to_string(e) + ": " + err.what());
    }
  }
  for (const auto& s : stimuli) {
    if (s.node >= nodes.size()) throw ConfigError(ConfigError::Kind::DanglingReference, 0, "stimulus references a missing node");
    try {
      s.waveform.validate();
    } catch (const InputError& err) {
      throw invariant(std::string("stimulus: ") + err.what());
    }
  }

  // Zero-delay cycles would deliver an unbounded number of events at one instant.
  std::vector<std::vector<std::size_t>> instant(nodes.size());
  for (const auto& e : edges) {
    if (e.delay() == 0.0) instant[e.src].push_back(e.dst);
  }
  std::vector<int> mark(nodes.size(), 0);  // 0 new, 1 on stack, 2 done
  std::function<void(std::size_t)> visit = [&](std::size_t n) {
    mark[n] = 1;
    for (std::size_t m : instant[n]) {
      if (mark[m] == 1) throw invariant("zero-delay cycle through node '" + nodes[m].id + "'");
      if (mark[m] == 0) visit(m);
    }
    mark[n] = 2;
  };
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    if (mark[n] == 0) visit(n);
  }
}

Network::Network(NetworkConfig config) : config_(std::move(config)) {
  config_.validate();
  outgoing_.resize(config_.nodes.size());
  for (std::size_t e = 0; e < config_.edges.size(); ++e) outgoing_[config_.edges[e].src].push_back(e);

  // Jittered stimuli draw from streams keyed by (run seed, stimulus index).
  const CounterRng keys(config_.seed);
  for (std::size_t i = 0; i < config_.stimuli.size(); ++i) config_.stimuli[i].waveform.seed = keys.at(i);
}

double Network::gain(std::size_t node, double t) const {
  auto it = modulation_.find(node);
  if (it == modulation_.end() || t >= it->second.expiry) return 1.0;
  return it->second.gain;
}

double Network::deliver(const SpikeEvent& event, double t_now) {
  if (event.edge >= config_.edges.size()) {
    throw ConfigError(ConfigError::Kind::DanglingReference, 0, "event references unknown edge " + std::to_string(event.edge));
  }
  const auto& edge = config_.edges[event.edge];
  if (edge.dst >= config_.nodes.size()) {
    throw ConfigError(ConfigError::Kind::DanglingReference, 0, "edge " + std::to_string(event.edge) + " has no destination");
  }

  double contribution = 0.0;
  switch (edge.kind) {
    case SynapseKind::Excitatory:
      contribution = edge.weight * event.amplitude * gain(edge.dst, t_now);
      break;
    case SynapseKind::Inhibitory:
      contribution = -edge.weight * event.amplitude * gain(edge.dst, t_now);
      break;
    case SynapseKind::Modulating:
      modulation_[edge.dst] = Modulation{edge.weight, t_now + config_.modulation_duration};
      return 0.0;
  }
  if (contribution != 0.0) pulses_.push_back(Pulse{edge.dst, t_now, t_now + config_.syn_width, contribution});
  return contribution;
}

std::vector<SpikeEvent> Network::propagate_spike(std::size_t src, double t_peak, double amplitude) {
  if (src >= config_.nodes.size()) throw InputError("propagate_spike: unknown source node");
  std::vector<SpikeEvent> scheduled;
  scheduled.reserve(outgoing_[src].size());
  for (std::size_t e : outgoing_[src]) {
    const SpikeEvent ev{t_peak + config_.edges[e].delay(), e, amplitude, t_peak};
    queue_.push(ev.t_deliver, ev);
    scheduled.push_back(ev);
  }
  return scheduled;
}

double Network::synaptic_input(std::size_t node, double t) const {
  double v = 0.0;
  for (const auto& p : pulses_) {
    if (p.node == node && t >= p.start && t < p.end) v += p.value;
  }
  return v;
}

NetworkResult Network::run() {
  const std::size_t n_nodes = config_.nodes.size();
  const double dt = config_.dt;

  std::vector<NeuristorState> state;
  std::vector<double> out_rest;
  std::vector<SpikeDetector> detectors;
  NetworkResult result;
  for (const auto& node : config_.nodes) {
    state.push_back(rest_state(node.cell));
    out_rest.push_back(state.back().v_out);
    detectors.emplace_back(node.v_rest, node.threshold(), config_.min_separation);
    detectors.back().feed(0.0, node.v_rest);
    result.traces.emplace_back(std::vector<std::string>{"v_c1", "v_c2", "v_out", "x1", "x2", "v_m"}, dt);
  }

  std::vector<std::vector<const WaveformSpec*>> drives(n_nodes);
  for (const auto& s : config_.stimuli) drives[s.node].push_back(&s.waveform);

  const auto steps = static_cast<std::size_t>(std::floor(config_.duration / dt + 1e-9));
  Eigen::Matrix<double, 6, 1> row;
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const double t_next = static_cast<double>(k + 1) * dt;

    while (auto entry = queue_.pop_until(t)) {
      const double c = deliver(entry->payload, t);
      result.deliveries.push_back(Delivery{entry->payload, t, c});
    }

    for (std::size_t n = 0; n < n_nodes; ++n) {
      const InputSignal input = [&, n](double tt) {
        double v = synaptic_input(n, tt);
        for (const auto* w : drives[n]) v += w->value(tt);
        return v;
      };
      state[n] = step_neuristor(config_.nodes[n].cell, state[n], input, t, dt);
      const double v_m = config_.nodes[n].v_rest + (state[n].v_out - out_rest[n]);
      row << state[n].vector(), v_m;
      result.traces[n].append(t_next, row);
      if (auto peak = detectors[n].feed(t_next, v_m)) {
        state[n].t_last_spike = peak->t_peak;
        result.spikes.push_back(SpikeLogEntry{peak->t_peak, n, peak->amplitude});
        propagate_spike(n, peak->t_peak, peak->amplitude);
      }
    }

    std::erase_if(pulses_, [t_next](const Pulse& p) { return p.end <= t_next; });
  }
  return result;
}

NetworkResult run_network(const NetworkConfig& config) { return Network(config).run(); }

LinkEvents link_events(const NetworkConfig& config, const NetworkResult& result, std::size_t src, std::size_t dst) {
  LinkEvents ev;
  std::vector<double> dst_peaks;
  for (const auto& s : result.spikes) {
    if (s.node == src) ev.sent.push_back(s.t_peak);
    if (s.node == dst) dst_peaks.push_back(s.t_peak);
  }
  for (const auto& d : result.deliveries) {
    const auto& edge = config.edges[d.event.edge];
    if (edge.src != src || edge.dst != dst) continue;
    const bool evoked = std::any_of(dst_peaks.begin(), dst_peaks.end(), [&](double tp) {
      return tp >= d.t_effective && tp <= d.t_effective + config.response_window;
    });
    if (evoked) ev.received.push_back(d.t_effective);
  }
  return ev;
}

void write_spike_log_csv(std::ostream& os, const NetworkConfig& config, std::span<const SpikeLogEntry> spikes) {
  os << "t_peak,node,amplitude\n";
  for (const auto& s : spikes) csv::row(os, s.t_peak, config.nodes[s.node].id, s.amplitude);
}

}  // namespace rescomm
