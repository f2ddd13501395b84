// Kinematic-consistency residuals, trailing-window error metrics, cutoffs
// and the single-fault diagnostic table.
#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "kinfault/kinematics.hpp"
#include "kinfault/simulator.hpp"

namespace kinfault {

/// The nine differentiated signals consumed at each step.
struct DerivativeSet {
  double rx_dot = 0.0, ry_dot = 0.0;
  double rx_ddot = 0.0, ry_ddot = 0.0;
  double omega_dot = 0.0;
  double Rx_dot = 0.0, Ry_dot = 0.0;
  double Rx_ddot = 0.0, Ry_ddot = 0.0;
};

/// Left and right sides of the three kinematic relations, body components.
///   s: earth-frame velocity vs single transport
///   d: accelerometer vs double transport
///   a: accelerometer vs differentiated earth-frame position
struct ResidualTerms {
  Vec3 L_s = Vec3::Zero(), R_s = Vec3::Zero();
  Vec3 L_d = Vec3::Zero(), R_d = Vec3::Zero();
  Vec3 L_a = Vec3::Zero(), R_a = Vec3::Zero();
};

/// Earth-frame position reconstructed from compass and radar.
Vec3 earth_position(const SensorSample& s);

ResidualTerms build_residual_terms(const SensorSample& s, const DerivativeSet& d);

/// Metric order used throughout: s_x, s_y, d_x, d_y, a_x, a_y.
inline constexpr std::size_t kMetricCount = 6;
using MetricArray = std::array<double, kMetricCount>;
using FlagArray = std::array<bool, kMetricCount>;
extern const std::array<const char*, kMetricCount> kMetricNames;

/// The six planar residuals L - R.
MetricArray planar_residuals(const ResidualTerms& t);

/// sqrt((1/delta) * sum of the last delta + 1 squared residuals).
class WindowedRms {
 public:
  explicit WindowedRms(std::size_t delta);

  void push(double residual);
  bool ready() const { return count_ > delta_; }
  /// Throws std::logic_error until delta + 1 residuals have been pushed.
  double value() const;
  std::size_t delta() const { return delta_; }

 private:
  void refresh();

  std::size_t delta_;
  std::vector<double> squares_;  // delta + 1 slots
  std::size_t head_ = 0;
  std::size_t count_ = 0;
  std::size_t since_refresh_ = 0;
  double sum_ = 0.0;
};

/// Cutoffs frozen at twice the metric values observed at the freeze step.
class Cutoffs {
 public:
  /// Throws std::logic_error if called twice.
  void freeze(const MetricArray& metrics_at_freeze);
  bool ready() const { return values_.has_value(); }
  /// Throws std::logic_error before freeze().
  const MetricArray& values() const;
  /// AC (true) when e > c.
  FlagArray flags(const MetricArray& metrics) const;

 private:
  std::optional<MetricArray> values_;
};

enum class Verdict {
  all_healthy,
  compass_faulty,
  radar_faulty,
  z_gyro_faulty,
  x_accel_faulty,
  y_accel_faulty,
  indeterminate,
};

std::string to_string(Verdict v);

/// Exact lookup of the six single-fault signatures; anything else is
/// indeterminate.
Verdict classify(const FlagArray& flags);

/// Six-character pattern, '1' = AC.
std::string flag_pattern(const FlagArray& flags);

/// Tracks the first step at which one non-healthy verdict has held for
/// `hold` consecutive classified steps.
class SustainedVerdict {
 public:
  explicit SustainedVerdict(std::size_t hold = 50) : hold_(hold) {}

  void observe(long k, Verdict v);
  std::optional<Verdict> verdict() const { return verdict_; }
  std::optional<long> step() const { return step_; }

 private:
  std::size_t hold_;
  Verdict current_ = Verdict::all_healthy;
  std::size_t run_ = 0;
  long run_start_ = 0;
  std::optional<Verdict> verdict_;
  std::optional<long> step_;
};

}  // namespace kinfault
