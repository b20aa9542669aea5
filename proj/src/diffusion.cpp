#include "rescomm/diffusion.hpp"

#include <algorithm>
#include <ostream>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rescomm/engine/csv.hpp"

namespace rescomm {

void DiffusionParams::validate() const {
  if (!(q_molecules >= 0.0 && std::isfinite(q_molecules))) throw InputError("diffusion: Q must be >= 0");
  if (!(d_coeff > 0.0 && std::isfinite(d_coeff))) throw InputError("diffusion: D must be > 0");
  if (!(r >= 0.0 && std::isfinite(r))) throw InputError("diffusion: r must be >= 0");
}

double peak_time(const DiffusionParams& p) {
  p.validate();
  if (p.r == 0.0) throw InputError("peak_time: undefined at r = 0 (concentration decreases monotonically)");
  return p.r * p.r / (6.0 * p.d_coeff);
}

double total_mass(const DiffusionParams& p, double t) {
  p.validate();
  if (!(t > 0.0 && std::isfinite(t))) throw InputError("total_mass: t must be > 0");
  if (p.q_molecules == 0.0) return 0.0;

  const double r_max = 12.0 * std::sqrt(2.0 * p.d_coeff * t);
  auto shell = [&](double u) {
    const double r = u * r_max;
    return concentration<double>(p.q_molecules, p.d_coeff, r, t) * 4.0 * std::numbers::pi * r * r * r_max;
  };

  double error = 0.0;
  double l1 = 0.0;
  const double mass =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(shell, 0.0, 1.0, 20, 1e-13, &error, &l1);
  if (!std::isfinite(mass) || error > 1e-9 * l1) {
    throw NumericError("total_mass: quadrature did not converge (estimate " + csv::number(mass) + ", error " +
                       csv::number(error) + ", L1 " + csv::number(l1) + ", r_max " + csv::number(r_max) + ")");
  }
  return mass;
}

std::vector<ConcentrationSample> pulse_response(const DiffusionParams& p, double t_max, std::size_t n) {
  p.validate();
  if (!(t_max > 0.0 && std::isfinite(t_max))) throw InputError("pulse_response: t_max must be > 0");
  if (n < 2) throw InputError("pulse_response: need at least two samples");
  std::vector<ConcentrationSample> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = t_max * static_cast<double>(k) / static_cast<double>(n - 1);
    out.push_back({t, concentration(p, t)});
  }
  return out;
}

double superposed_concentration(const DiffusionParams& p, std::span<const double> emissions, double t) {
  double c = 0.0;
  for (double te : emissions) {
    if (te < t) c += concentration(p, t - te);
  }
  return c;
}

void OokLinkParams::validate() const {
  if (!(symbol_period > 0.0 && std::isfinite(symbol_period))) throw InputError("ook: symbol period must be > 0");
  if (samples_per_symbol < 1) throw InputError("ook: samples_per_symbol must be >= 1");
  if (!(detect_threshold > 0.0 && std::isfinite(detect_threshold))) throw InputError("ook: detect threshold must be > 0");
}

OokResult simulate_ook(const DiffusionParams& p, const OokLinkParams& link, std::span<const int> bits) {
  p.validate();
  link.validate();
  if (bits.empty()) throw InputError("simulate_ook: bit sequence is empty");

  OokResult res;
  std::vector<double> emissions;
  const double ts = link.symbol_period;
  const auto spp = static_cast<double>(link.samples_per_symbol);

  for (std::size_t k = 0; k < bits.size(); ++k) {
    if (bits[k] != 0 && bits[k] != 1) throw InputError("simulate_ook: bits must be 0 or 1");
    const double t0 = static_cast<double>(k) * ts;
    if (bits[k] == 1) emissions.push_back(t0);

    double peak = 0.0;
    for (std::size_t j = 0; j < link.samples_per_symbol; ++j) {
      const double t = t0 + static_cast<double>(j + 1) * ts / spp;
      peak = std::max(peak, superposed_concentration(p, emissions, t));
    }
    res.sent.push_back(bits[k]);
    res.received.push_back(peak >= link.detect_threshold ? 1 : 0);
    res.peak_c.push_back(peak);
  }
  return res;
}

void write_pulse_csv(std::ostream& os, std::span<const ConcentrationSample> samples) {
  os << "t,c\n";
  for (const auto& s : samples) csv::row(os, s.t, s.c);
}

void write_ook_csv(std::ostream& os, const OokResult& r) {
  os << "bit_index,sent,received,peak_c\n";
  for (std::size_t k = 0; k < r.sent.size(); ++k) csv::row(os, k, r.sent[k], r.received[k], r.peak_c[k]);
}

}  // namespace rescomm
