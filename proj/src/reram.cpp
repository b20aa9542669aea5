#include "rescomm/reram.hpp"

#include <algorithm>
#include <cmath>

#include "rescomm/error.hpp"

namespace rescomm {

std::string_view to_string(ReramPhase phase) {
  switch (phase) {
    case ReramPhase::Virgin: return "virgin";
    case ReramPhase::LRS: return "LRS";
    case ReramPhase::HRS: return "HRS";
  }
  return "?";
}

std::string_view to_string(ReramTransition t) {
  switch (t) {
    case ReramTransition::None: return "none";
    case ReramTransition::Forming: return "forming";
    case ReramTransition::Set: return "set";
    case ReramTransition::Reset: return "reset";
  }
  return "?";
}

void ReramParams::validate() const {
  const bool finite = std::isfinite(v_form) && std::isfinite(v_set) && std::isfinite(v_reset) &&
                      std::isfinite(r_hrs) && std::isfinite(r_lrs) && std::isfinite(i_cc) && std::isfinite(r_series);
  if (!finite) throw InputError("reram: parameters must be finite");
  if (!(0.0 < v_reset && v_reset < v_set && v_set < v_form)) {
    throw InputError("reram: thresholds must satisfy 0 < v_reset < v_set < v_form");
  }
  if (!(0.0 < r_lrs && r_lrs < r_hrs)) throw InputError("reram: need 0 < r_lrs < r_hrs");
  if (!(i_cc > 0.0)) throw InputError("reram: compliance current must be > 0");
  if (!(r_series >= 0.0)) throw InputError("reram: series resistance must be >= 0");
}

ReramParams ReramParams::make(double v_form, double v_set, double v_reset, double r_hrs, double r_lrs, double i_cc,
                              double r_series) {
  ReramParams p{v_form, v_set, v_reset, r_hrs, r_lrs, i_cc, r_series};
  p.validate();
  return p;
}

ReramStep step_reram(const ReramParams& p, ReramCellState state, double v) {
  if (!std::isfinite(v)) throw InputError("step_reram: applied voltage must be finite");

  const double mag = std::abs(v);
  ReramTransition t = ReramTransition::None;
  switch (state.phase) {
    case ReramPhase::Virgin:
      if (mag >= p.v_form) t = ReramTransition::Forming;
      break;
    case ReramPhase::LRS:
      if (mag >= p.v_reset) t = ReramTransition::Reset;
      break;
    case ReramPhase::HRS:
      if (mag >= p.v_set) t = ReramTransition::Set;
      break;
  }

  ReramCellState next = state;
  if (t == ReramTransition::Forming || t == ReramTransition::Set) next.phase = ReramPhase::LRS;
  if (t == ReramTransition::Reset) next.phase = ReramPhase::HRS;

  double i = v / (p.resistance(next.phase) + p.r_series);
  if (t == ReramTransition::Forming || t == ReramTransition::Set) i = std::clamp(i, -p.i_cc, p.i_cc);
  return ReramStep{next, i, t};
}

}  // namespace rescomm
