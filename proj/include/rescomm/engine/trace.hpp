#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rescomm {

/// Column-oriented sample store. Row i is taken at t0 + (i+1)*dt unless
/// samples are appended with explicit times.
class TraceRecorder {
 public:
  TraceRecorder(std::vector<std::string> channels, double dt, double t0 = 0.0);

  void append(double t, const Eigen::Ref<const Eigen::VectorXd>& row);

  const std::vector<std::string>& channels() const noexcept { return channels_; }
  std::size_t rows() const noexcept { return times_.size(); }
  double dt() const noexcept { return dt_; }
  double t0() const noexcept { return t0_; }
  const std::vector<double>& times() const noexcept { return times_; }

  /// Sample (row, channel).
  double at(std::size_t row, std::size_t channel) const { return data_[row * channels_.size() + channel]; }
  Eigen::VectorXd column(std::size_t channel) const;
  std::size_t channel_index(const std::string& name) const;

  /// CSV with header `t,<channels...>`; every `stride`-th row is written.
  void write_csv(std::ostream& os, std::size_t stride = 1) const;

 private:
  std::vector<std::string> channels_;
  double dt_;
  double t0_;
  std::vector<double> times_;
  std::vector<double> data_;
};

}  // namespace rescomm
