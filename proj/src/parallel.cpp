#include "kinfault/parallel.hpp"

#include <exception>

namespace kinfault {

const std::array<const char*, kChannelCount> kChannelNames{
    "rx_dot", "ry_dot", "omega_dot", "Rx_dot", "Ry_dot",
    "rx_ddot", "ry_ddot", "Rx_ddot", "Ry_ddot"};

int channel_order(std::size_t channel) {
  return channel < static_cast<std::size_t>(Channel::rx_ddot) ? 1 : 2;
}

DifferentiatorBank::DifferentiatorBank(const DifferentiatorSettings& single,
                                       const DifferentiatorSettings& dbl, double sample_time) {
  diffs_.reserve(kChannelCount);
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    const int order = channel_order(c);
    const auto& s = order == 1 ? single : dbl;
    diffs_.emplace_back(IntegratorModel::of_order(order, sample_time), s.rls, s.ase, s.init);
  }
}

ChannelArray DifferentiatorBank::step_serial(const ChannelArray& inputs) {
  ChannelArray out{};
  std::exception_ptr first;
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    try {
      out[c] = diffs_[c].step(inputs[c]);
    } catch (...) {
      if (!first) first = std::current_exception();
    }
  }
  if (first) std::rethrow_exception(first);
  return out;
}

ChannelArray DifferentiatorBank::step_parallel(const ChannelArray& inputs) {
  ChannelArray out{};
  std::array<std::exception_ptr, kChannelCount> errors{};
  const int n = static_cast<int>(kChannelCount);
#pragma omp parallel for schedule(static)
  for (int c = 0; c < n; ++c) {
    try {
      out[c] = diffs_[c].step(inputs[c]);
    } catch (...) {
      errors[c] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace kinfault
