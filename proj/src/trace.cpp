#include "rescomm/engine/trace.hpp"

#include <ostream>

#include "rescomm/engine/csv.hpp"
#include "rescomm/error.hpp"

namespace rescomm {

TraceRecorder::TraceRecorder(std::vector<std::string> channels, double dt, double t0)
    : channels_(std::move(channels)), dt_(dt), t0_(t0) {
  if (channels_.empty()) throw InputError("trace: at least one channel required");
}

void TraceRecorder::append(double t, const Eigen::Ref<const Eigen::VectorXd>& row) {
  if (static_cast<std::size_t>(row.size()) != channels_.size()) {
    throw InputError("trace: row length " + std::to_string(row.size()) + " does not match " +
                     std::to_string(channels_.size()) + " channels");
  }
  times_.push_back(t);
  data_.insert(data_.end(), row.data(), row.data() + row.size());
}

Eigen::VectorXd TraceRecorder::column(std::size_t channel) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows()));
  for (std::size_t i = 0; i < rows(); ++i) out(static_cast<Eigen::Index>(i)) = at(i, channel);
  return out;
}

std::size_t TraceRecorder::channel_index(const std::string& name) const {
  for (std::size_t i = 0; i < channels_.size(); ++i) {
    if (channels_[i] == name) return i;
  }
  throw InputError("trace: no channel named '" + name + "'");
}

void TraceRecorder::write_csv(std::ostream& os, std::size_t stride) const {
  if (stride == 0) stride = 1;
  os << 't';
  for (const auto& c : channels_) os << ',' << c;
  os << '\n';
  const std::size_t n = channels_.size();
  for (std::size_t i = 0; i < rows(); i += stride) {
    os << csv::number(times_[i]);
    for (std::size_t c = 0; c < n; ++c) os << ',' << csv::number(data_[i * n + c]);
    os << '\n';
  }
}

}  // namespace rescomm
