#include "rescomm/p1906.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "json.hpp"

#include "rescomm/engine/csv.hpp"
#include "rescomm/error.hpp"

namespace rescomm::p1906 {

std::string_view to_string(Carrier c) {
  return c == Carrier::ResistiveSpike ? "resistive_spike" : "molecule";
}

std::string_view to_string(Motion m) {
  return m == Motion::CircuitConduction ? "circuit_conduction" : "brownian_diffusion";
}

void NanoLinkDescriptor::validate() const {
  const bool spike = carrier == Carrier::ResistiveSpike && motion == Motion::CircuitConduction;
  const bool molecule = carrier == Carrier::Molecule && motion == Motion::BrownianDiffusion;
  if (!spike && !molecule) {
    throw InputError("link descriptor: carrier " + std::string(to_string(carrier)) + " cannot move by " +
                     std::string(to_string(motion)));
  }
}

NanoLinkDescriptor describe(const SynapseEdge& edge, const NeuronNodeParams& src, const NeuronNodeParams& dst) {
  edge.validate();
  src.validate();
  dst.validate();
  NanoLinkDescriptor d{Carrier::ResistiveSpike, Motion::CircuitConduction,
                       "set/reset of " + src.id + " (v_on=" + csv::number(src.cell.ch1.v_on) +
                           " V, v_hold=" + csv::number(src.cell.ch1.v_hold) + " V)",
                       "v_threshold of " + dst.id + " = " + csv::number(dst.threshold()) + " V",
                       "axon, " + csv::number(edge.axon_length) + " m at " + csv::number(edge.velocity) + " m/s"};
  d.validate();
  return d;
}

NanoLinkDescriptor describe(const DiffusionParams& channel, const OokLinkParams& link) {
  channel.validate();
  link.validate();
  NanoLinkDescriptor d{Carrier::Molecule, Motion::BrownianDiffusion,
                       "Q=" + csv::number(channel.q_molecules) + " molecules per emission",
                       "detect_threshold=" + csv::number(link.detect_threshold),
                       "none (isotropic unbounded medium, D=" + csv::number(channel.d_coeff) + " m^2/s)"};
  d.validate();
  return d;
}

LinkMetrics measure(std::span<const double> sent, std::span<const double> received, const MeasureOptions& o) {
  if (!(o.window > 0.0) || !(o.symbol_period > 0.0)) throw InputError("measure: window and symbol period must be > 0");
  if (!std::is_sorted(sent.begin(), sent.end())) throw InputError("measure: sent events are not time-ordered");
  if (!std::is_sorted(received.begin(), received.end())) throw InputError("measure: received events are not time-ordered");

  LinkMetrics m;
  m.sent = sent.size();
  double latency_sum = 0.0;
  std::size_t j = 0;
  for (double s : sent) {
    while (j < received.size() && received[j] < s) ++j;
    if (j < received.size() && received[j] - s <= o.window) {
      latency_sum += received[j] - s;
      ++m.matched;
      ++j;
    }
  }
  m.delivery_ratio = m.sent == 0 ? 0.0 : static_cast<double>(m.matched) / static_cast<double>(m.sent);
  m.latency_defined = m.matched > 0;
  m.mean_latency = m.latency_defined ? latency_sum / static_cast<double>(m.matched) : 0.0;

  std::size_t best = 0;
  std::size_t lo = 0;
  for (std::size_t hi = 0; hi < received.size(); ++hi) {
    while (received[hi] - received[lo] >= o.symbol_period) ++lo;
    best = std::max(best, hi - lo + 1);
  }
  m.peak_rate = static_cast<double>(best) / o.symbol_period;
  return m;
}

void write_metrics_text(std::ostream& os, const LinkMetrics& m, std::string_view prefix) {
  os << prefix << "sent=" << m.sent << '\n'
     << prefix << "matched=" << m.matched << '\n'
     << prefix << "delivery_ratio=" << csv::number(m.delivery_ratio) << '\n'
     << prefix << "mean_latency=" << (m.latency_defined ? csv::number(m.mean_latency) : std::string("undefined")) << '\n'
     << prefix << "peak_rate=" << csv::number(m.peak_rate) << '\n';
}

std::string metrics_json(const LinkMetrics& m, int indent) {
  nlohmann::ordered_json j;
  j["delivery_ratio"] = m.delivery_ratio;
  j["mean_latency"] = m.latency_defined ? nlohmann::ordered_json(m.mean_latency) : nlohmann::ordered_json(nullptr);
  j["peak_rate"] = m.peak_rate;
  j["sent"] = m.sent;
  j["matched"] = m.matched;
  return j.dump(indent);
}

}  // namespace rescomm::p1906
