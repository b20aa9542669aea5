#pragma once

#include <cmath>
#include <iosfwd>
#include <numbers>
#include <span>
#include <vector>

#include "rescomm/error.hpp"

namespace rescomm {

/// Point release of q_molecules at the origin into an unbounded medium with
/// diffusion coefficient d_coeff, observed at distance r.
struct DiffusionParams {
  double q_molecules = 1e4;  // count
  double d_coeff = 1e-9;     // m^2/s
  double r = 1e-6;           // m

  void validate() const;
};

struct ConcentrationSample {
  double t;  // s
  double c;  // molecules / m^3
};

/// Fick point-source solution
///
///   c(r, t) = Q / (4 pi D t)^(3/2) * exp(-r^2 / (4 D t))
///
/// evaluated in the caller's scalar type. c(r > 0, 0) is the limit value 0.
/// Throws SingularityError at t = 0, r = 0 and InputError for t < 0.
template <typename Scalar>
Scalar concentration(Scalar q, Scalar d, Scalar r, Scalar t) {
  using std::exp;
  using std::pow;
  if (!(t >= Scalar(0))) throw InputError("concentration: t must be >= 0");
  if (t == Scalar(0)) {
    if (r == Scalar(0)) throw SingularityError("concentration: singular at r = 0, t = 0");
    return Scalar(0);
  }
  if (q == Scalar(0)) return Scalar(0);
  const Scalar four_dt = Scalar(4) * d * t;
  return q / pow(std::numbers::pi_v<Scalar> * four_dt, Scalar(1.5)) * exp(-(r * r) / four_dt);
}

inline double concentration(const DiffusionParams& p, double t) {
  return concentration<double>(p.q_molecules, p.d_coeff, p.r, t);
}

/// Time of the concentration maximum at distance r: r^2 / (6 D).
/// Throws InputError for r = 0, where c decreases monotonically in t.
double peak_time(const DiffusionParams& p);

/// Molecules inside the ball of radius 12*sqrt(2 D t), by adaptive
/// Gauss-Kronrod quadrature of c * 4 pi r^2. Should equal Q. Throws
/// NumericError when the error estimate does not converge.
double total_mass(const DiffusionParams& p, double t);

/// Samples c at t = k * t_max / (n - 1), k = 0..n-1.
std::vector<ConcentrationSample> pulse_response(const DiffusionParams& p, double t_max, std::size_t n);

/// Superposed concentration at time t from releases at `emissions`
/// (releases at or after t contribute nothing).
double superposed_concentration(const DiffusionParams& p, std::span<const double> emissions, double t);

struct OokLinkParams {
  double symbol_period = 5e-3;     // s
  double detect_threshold = 3.5e20;  // molecules / m^3, about half the default pulse peak
  std::size_t samples_per_symbol = 16;

  void validate() const;
};

struct OokResult {
  std::vector<int> sent;
  std::vector<int> received;
  std::vector<double> peak_c;
};

/// On-off keying over the noise-free channel. Bit k is released at
/// k*symbol_period when it is 1; the receiver samples at offsets
/// (j+1)*symbol_period/samples_per_symbol inside each symbol and decides 1
/// when the largest sample reaches the threshold.
OokResult simulate_ook(const DiffusionParams& p, const OokLinkParams& link, std::span<const int> bits);

void write_pulse_csv(std::ostream& os, std::span<const ConcentrationSample> samples);
void write_ook_csv(std::ostream& os, const OokResult& result);

}  // namespace rescomm
