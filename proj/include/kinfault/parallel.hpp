// The nine differentiator instances of a run, stepped either serially or
// across OpenMP threads. Instances share no state, so both paths produce
// bit-identical output.
#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "kinfault/config.hpp"
#include "kinfault/differentiator.hpp"

namespace kinfault {

enum class Channel : std::size_t {
  rx_dot, ry_dot, omega_dot, Rx_dot, Ry_dot,  // single
  rx_ddot, ry_ddot, Rx_ddot, Ry_ddot,         // double
};

inline constexpr std::size_t kChannelCount = 9;
extern const std::array<const char*, kChannelCount> kChannelNames;

/// Integrator order used by a channel.
int channel_order(std::size_t channel);

using ChannelArray = std::array<double, kChannelCount>;

class DifferentiatorBank {
 public:
  DifferentiatorBank(const DifferentiatorSettings& single, const DifferentiatorSettings& dbl,
                     double sample_time);

  /// Feeds one sample per channel and returns the nine estimates. The first
  /// exception thrown by any instance is rethrown after all have stepped.
  ChannelArray step_serial(const ChannelArray& inputs);
  ChannelArray step_parallel(const ChannelArray& inputs);
  ChannelArray step(const ChannelArray& inputs, bool parallel) {
    return parallel ? step_parallel(inputs) : step_serial(inputs);
  }

  const Differentiator& operator[](std::size_t channel) const { return diffs_[channel]; }

 private:
  std::vector<Differentiator> diffs_;
};

}  // namespace kinfault
