#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "rescomm/engine/waveform.hpp"

namespace rescomm {

/// Linear dopant-drift memristor. Memristance interpolates between r_off
/// (w = 0) and r_on (w = depth); the state variable moves in proportion to
/// the charge passed, so flux and charge are tied by dphi = M(w) dq.
struct MemristorParams {
  double r_on = 100.0;        // ohm
  double r_off = 16e3;        // ohm
  double depth = 10e-9;       // m, full scale of w
  double mobility = 1e-14;    // m^2 s^-1 V^-1

  /// Throws InputError unless 0 < r_on < r_off, depth > 0, mobility > 0.
  void validate() const;

  /// dw/dq in m/C.
  double drift_per_coulomb() const noexcept { return mobility * r_on / depth; }
};

struct MemristorState {
  double w = 0.0;    // m
  double q = 0.0;    // C
  double phi = 0.0;  // V s

  static MemristorState at_fraction(const MemristorParams& p, double fraction) {
    return MemristorState{fraction * p.depth, 0.0, 0.0};
  }
};

double memristance(const MemristorParams& params, const MemristorState& state);

/// Current-driven explicit update over one interval of length dt. The
/// charge update is exact for a constant current; w is clamped to
/// [0, depth]. Throws InputError on non-finite current or dt <= 0.
MemristorState step_memristor(const MemristorParams& params, const MemristorState& state, double current,
                              double dt);

struct IvSample {
  double t;
  double v;
  double i;
  double m;
  double w;
};

/// Voltage-driven sweep. Integrates (w, q, phi) with RK4 on a fixed grid and
/// returns one sample per grid point, t = 0 included. Throws InputError on
/// dt <= 0, a non-positive duration or an invalid drive.
std::vector<IvSample> iv_sweep(const MemristorParams& params, const WaveformSpec& drive, double dt,
                               double duration, MemristorState initial);

/// Sum of the absolute shoelace areas of the lobes of a sampled I-V loop.
/// The trace is split where v changes sign; each segment is closed through
/// its endpoints.
double loop_area(std::span<const IvSample> samples);

/// Largest |i| among samples with |v| <= v_eps (0 if there are none).
double pinch_residual(std::span<const IvSample> samples, double v_eps);

/// CSV `t,v,i,m`.
void write_iv_csv(std::ostream& os, std::span<const IvSample> samples);

}  // namespace rescomm
