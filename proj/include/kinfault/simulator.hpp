// Figure-8 ground truth, noisy planar sensors and fault injection.
#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "kinfault/kinematics.hpp"

namespace kinfault {

inline constexpr double kGravity = 9.8;  // m/s^2

/// How the body x-axis is oriented along the path.
///   velocity: along the velocity vector, theta = atan2(ydot, xdot)
///   radial:   along the line of sight from the radar target, theta = atan2(y, x)
enum class HeadingMode { velocity, radial };

std::string to_string(HeadingMode mode);
HeadingMode parse_heading_mode(const std::string& text);

/// x(t) = 2 + sin 2t, y(t) = 2 + sin 2t cos 2t, sampled at t = k Ts.
struct TrajectoryConfig {
  double sample_time = 0.01;
  long k_first = 1;
  long k_last = 6000;
  HeadingMode heading = HeadingMode::radial;

  long steps() const { return k_last - k_first + 1; }
  void validate() const;
};

/// Sensor noise standard deviations. Accelerometer noise is stored in g.
struct NoiseConfig {
  double sigma_r = 0.01;        // m, per radar axis
  double sigma_omega = 0.001;   // rad/s
  double sigma_A_g = 0.1;       // g, per accelerometer axis
  double sigma_theta = 0.0;     // rad

  double sigma_A() const { return sigma_A_g * kGravity; }
  void validate() const;
};

enum class Sensor { compass, radar, z_gyro, x_accel, y_accel };
enum class FaultKind { bias, drift };

std::string to_string(Sensor sensor);
std::string to_string(FaultKind kind);
Sensor parse_sensor(const std::string& text);
FaultKind parse_fault_kind(const std::string& text);

/// Additive fault. Units of `magnitude`:
///   compass rad, radar m, z_gyro rad/s, accelerometers g (bias) or g/s (drift);
///   drift magnitudes are per second.
struct FaultSpec {
  Sensor sensor = Sensor::z_gyro;
  FaultKind kind = FaultKind::bias;
  double magnitude = 0.0;
  double start_time = 0.0;

  void validate() const;
};

struct TruthSample {
  long k = 0;
  double t = 0.0;
  Vec3 R = Vec3::Zero();        // position in the earth frame
  Vec3 R_dot = Vec3::Zero();
  Vec3 R_ddot = Vec3::Zero();
  double theta = 0.0;           // continuous heading
  double omega = 0.0;           // heading rate
  double omega_dot = 0.0;
  Vec3 r = Vec3::Zero();        // position resolved in the body frame
  Vec3 r_dot = Vec3::Zero();    // body-frame derivative of r, body components
  Vec3 r_ddot = Vec3::Zero();
  Vec3 A = Vec3::Zero();        // earth-frame acceleration in body components
};

struct SensorSample {
  long k = 0;
  double t = 0.0;
  double theta = 0.0;
  Vec3 r = Vec3::Zero();
  Vec3 omega = Vec3::Zero();
  Vec3 A = Vec3::Zero();
};

/// Throws std::domain_error if the heading is undefined at step k.
TruthSample figure8_truth(long k, const TrajectoryConfig& cfg);

/// Noise-free measurement of a truth sample.
SensorSample ideal_measurement(const TruthSample& truth);

/// Adds white Gaussian noise. Six standard normal draws are taken per call
/// in a fixed order (theta, r_x, r_y, omega_z, A_x, A_y) whatever the sigmas.
class SensorModel {
 public:
  SensorModel(NoiseConfig noise, std::uint64_t seed);
  SensorSample measure(const TruthSample& truth);

 private:
  NoiseConfig noise_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> unit_{0.0, 1.0};
};

/// Returns the sample with the fault applied when t >= start_time.
SensorSample inject_fault(SensorSample sample, const FaultSpec& fault);

}  // namespace kinfault
