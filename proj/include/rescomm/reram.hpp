#pragma once

#include <string_view>

namespace rescomm {

enum class ReramPhase { Virgin, LRS, HRS };
enum class ReramTransition { None, Forming, Set, Reset };

std::string_view to_string(ReramPhase phase);
std::string_view to_string(ReramTransition transition);

/// Unipolar switching cell. Thresholds act on |v| only; a virgin cell is
/// treated as sitting at r_hrs until it is formed.
struct ReramParams {
  double v_form = 3.0;     // V
  double v_set = 1.5;      // V
  double v_reset = 0.8;    // V
  double r_hrs = 100e3;    // ohm
  double r_lrs = 1e3;      // ohm
  double i_cc = 1e-3;      // A, compliance during set/forming
  double r_series = 500.0; // ohm

  /// Throws InputError unless 0 < v_reset < v_set < v_form, 0 < r_lrs < r_hrs,
  /// i_cc > 0 and r_series >= 0.
  void validate() const;

  /// Validated construction; the only way the CLI and tests build cells.
  static ReramParams make(double v_form, double v_set, double v_reset, double r_hrs, double r_lrs, double i_cc,
                          double r_series);

  double resistance(ReramPhase phase) const noexcept { return phase == ReramPhase::LRS ? r_lrs : r_hrs; }
};

struct ReramCellState {
  ReramPhase phase = ReramPhase::Virgin;
};

struct ReramStep {
  ReramCellState state;
  double current;  // A
  ReramTransition transition;
};

/// Applies one voltage pulse. At most one transition fires per call.
/// The current is the series-divider solution for the phase after the
/// pulse, clamped to +/- i_cc when the pulse formed or set the cell.
ReramStep step_reram(const ReramParams& params, ReramCellState state, double v_applied);

}  // namespace rescomm
