#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include "rescomm/conduction_net.hpp"
#include "rescomm/diffusion.hpp"

namespace rescomm::p1906 {

enum class Carrier { ResistiveSpike, Molecule };
enum class Motion { CircuitConduction, BrownianDiffusion };

std::string_view to_string(Carrier c);
std::string_view to_string(Motion m);

/// Component vocabulary shared by both physical layers: what carries the
/// message, how it moves, what field guides it, what perturbs it into
/// existence and which rule detects it.
struct NanoLinkDescriptor {
  Carrier carrier;
  Motion motion;
  std::string perturbation;
  std::string specificity;
  std::string field;

  /// Rejects any carrier/motion pairing other than spike/conduction and
  /// molecule/diffusion with InputError.
  void validate() const;
};

NanoLinkDescriptor describe(const SynapseEdge& edge, const NeuronNodeParams& src, const NeuronNodeParams& dst);
NanoLinkDescriptor describe(const DiffusionParams& channel, const OokLinkParams& link);

struct LinkMetrics {
  std::size_t sent = 0;
  std::size_t matched = 0;
  double delivery_ratio = 0.0;
  bool latency_defined = false;
  double mean_latency = 0.0;  // s, 0 when undefined
  double peak_rate = 0.0;     // events per second
};

struct MeasureOptions {
  double window = 2e-3;         // s, longest accepted send-to-receive latency
  double symbol_period = 1e-3;  // s, sliding window for peak_rate
};

/// Greedy in-order matching: each sent event, in order, takes the earliest
/// unmatched received event at or after it and within `window`. peak_rate is
/// the largest number of received events inside any half-open window of one
/// symbol period, divided by that period. Throws InputError when either list
/// is not sorted or an option is not positive.
LinkMetrics measure(std::span<const double> sent, std::span<const double> received, const MeasureOptions& options = {});

/// Lines of `<prefix>key=value`.
void write_metrics_text(std::ostream& os, const LinkMetrics& m, std::string_view prefix = {});

/// One JSON object per link:
/// {"delivery_ratio": .., "mean_latency": ..|null, "peak_rate": .., "sent": .., "matched": ..}
std::string metrics_json(const LinkMetrics& m, int indent = -1);

}  // namespace rescomm::p1906
