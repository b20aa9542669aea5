#include "rescomm/memristor.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <Eigen/Dense>

#include "rescomm/engine/csv.hpp"
#include "rescomm/engine/rk4.hpp"
#include "rescomm/error.hpp"

namespace rescomm {

void MemristorParams::validate() const {
  if (!(r_on > 0.0 && r_on < r_off && std::isfinite(r_off))) throw InputError("memristor: need 0 < r_on < r_off");
  if (!(depth > 0.0 && std::isfinite(depth))) throw InputError("memristor: depth must be > 0");
  if (!(mobility > 0.0 && std::isfinite(mobility))) throw InputError("memristor: mobility must be > 0");
}

double memristance(const MemristorParams& p, const MemristorState& s) {
  const double x = s.w / p.depth;
  return p.r_on * x + p.r_off * (1.0 - x);
}

MemristorState step_memristor(const MemristorParams& p, const MemristorState& s, double current, double dt) {
  if (!std::isfinite(current)) throw InputError("step_memristor: current must be finite");
  if (!std::isfinite(dt) || dt <= 0.0) throw InputError("step_memristor: dt must be finite and > 0");

  const double dq = current * dt;
  MemristorState next;
  next.q = s.q + dq;
  next.phi = s.phi + memristance(p, s) * dq;
  next.w = std::clamp(s.w + p.drift_per_coulomb() * dq, 0.0, p.depth);
  return next;
}

std::vector<IvSample> iv_sweep(const MemristorParams& p, const WaveformSpec& drive, double dt, double duration,
                               MemristorState initial) {
  p.validate();
  drive.validate();
  if (!std::isfinite(dt) || dt <= 0.0) throw InputError("iv_sweep: dt must be finite and > 0");
  if (!std::isfinite(duration) || duration <= 0.0) throw InputError("iv_sweep: duration must be finite and > 0");

  const double k = p.drift_per_coulomb();
  auto resistance_at = [&p](double w) {
    return memristance(p, MemristorState{std::clamp(w, 0.0, p.depth), 0.0, 0.0});
  };
  // y = (w, q, phi)
  auto rhs = [&](double t, const Eigen::Vector3d& y) {
    const double v = drive.value(t);
    const double i = v / resistance_at(y(0));
    return Eigen::Vector3d(k * i, i, v);
  };

  const auto steps = static_cast<long>(std::llround(duration / dt));
  std::vector<IvSample> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);

  Eigen::Vector3d y(std::clamp(initial.w, 0.0, p.depth), initial.q, initial.phi);
  auto record = [&](double t) {
    const double v = drive.value(t);
    const double m = resistance_at(y(0));
    out.push_back(IvSample{t, v, v / m, m, y(0)});
  };

  record(0.0);
  for (long n = 0; n < steps; ++n) {
    const double t = static_cast<double>(n) * dt;
    y = rk4_step(rhs, y, t, dt);
    y(0) = std::clamp(y(0), 0.0, p.depth);
    record(static_cast<double>(n + 1) * dt);
  }
  return out;
}

namespace {

double shoelace(std::span<const IvSample> seg) {
  double acc = 0.0;
  const std::size_t n = seg.size();
  for (std::size_t a = 0; a < n; ++a) {
    const auto& p = seg[a];
    const auto& q = seg[(a + 1) % n];
    acc += p.v * q.i - q.v * p.i;
  }
  return 0.5 * std::abs(acc);
}

}  // namespace

double loop_area(std::span<const IvSample> samples) {
  double total = 0.0;
  std::size_t begin = 0;
  auto sign = [](double v) { return (v > 0.0) - (v < 0.0); };
  int current = 0;
  for (std::size_t a = 0; a < samples.size(); ++a) {
    const int s = sign(samples[a].v);
    if (s == 0) continue;
    if (current == 0) {
      current = s;
      begin = a;
    } else if (s != current) {
      total += shoelace(samples.subspan(begin, a - begin));
      current = s;
      begin = a;
    }
  }
  if (current != 0) total += shoelace(samples.subspan(begin));
  return total;
}

double pinch_residual(std::span<const IvSample> samples, double v_eps) {
  double worst = 0.0;
  for (const auto& s : samples) {
    if (std::abs(s.v) <= v_eps) worst = std::max(worst, std::abs(s.i));
  }
  return worst;
}

void write_iv_csv(std::ostream& os, std::span<const IvSample> samples) {
  os << "t,v,i,m\n";
  for (const auto& s : samples) csv::row(os, s.t, s.v, s.i, s.m);
}

}  // namespace rescomm
