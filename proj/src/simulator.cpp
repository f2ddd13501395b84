#include "kinfault/simulator.hpp"

#include <utility>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kinfault {

namespace {

struct Angle {
  double value;
  double rate;
  double accel;
};

// Direction angle of the planar vector (p, q) and its first two time
// derivatives, from the first two derivatives of p and q.
Angle direction_of(double p, double p1, double p2, double q, double q1, double q2) {
  const double D = p * p + q * q;
  if (!(D > 0.0)) throw std::domain_error("heading undefined: zero-length direction vector");
  const double N = p * q1 - q * p1;
  const double N1 = p * q2 - q * p2;
  const double D1 = 2.0 * (p * p1 + q * q1);
  return Angle{std::atan2(q, p), N / D, (N1 * D - N * D1) / (D * D)};
}

}  // namespace

std::string to_string(HeadingMode mode) {
  return mode == HeadingMode::velocity ? "velocity" : "radial";
}

HeadingMode parse_heading_mode(const std::string& text) {
  if (text == "velocity") return HeadingMode::velocity;
  if (text == "radial") return HeadingMode::radial;
  throw std::invalid_argument("unknown heading mode '" + text + "'");
}

void TrajectoryConfig::validate() const {
  if (!(sample_time > 0.0) || !std::isfinite(sample_time)) {
    throw std::invalid_argument("trajectory.sample_time must be positive");
  }
  if (k_first < 0 || k_last < k_first) {
    throw std::invalid_argument("trajectory step range is empty");
  }
}

void NoiseConfig::validate() const {
  const std::pair<const char*, double> sigmas[] = {
      {"sigma_r", sigma_r}, {"sigma_omega", sigma_omega}, {"sigma_A", sigma_A_g}, {"sigma_theta", sigma_theta}};
  for (const auto& [name, s] : sigmas) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw std::invalid_argument(std::string(name) + " must be finite and >= 0");
    }
  }
}

std::string to_string(Sensor sensor) {
  switch (sensor) {
    case Sensor::compass: return "compass";
    case Sensor::radar: return "radar";
    case Sensor::z_gyro: return "z_gyro";
    case Sensor::x_accel: return "x_accel";
    case Sensor::y_accel: return "y_accel";
  }
  return "?";
}

std::string to_string(FaultKind kind) { return kind == FaultKind::bias ? "bias" : "drift"; }

Sensor parse_sensor(const std::string& text) {
  for (Sensor s : {Sensor::compass, Sensor::radar, Sensor::z_gyro, Sensor::x_accel, Sensor::y_accel}) {
    if (to_string(s) == text) return s;
  }
  throw std::invalid_argument("unknown sensor '" + text + "'");
}

FaultKind parse_fault_kind(const std::string& text) {
  if (text == "bias") return FaultKind::bias;
  if (text == "drift") return FaultKind::drift;
  throw std::invalid_argument("unknown fault kind '" + text + "'");
}

void FaultSpec::validate() const {
  if (!std::isfinite(magnitude)) throw std::invalid_argument("fault magnitude must be finite");
  if (!(start_time >= 0.0) || !std::isfinite(start_time)) {
    throw std::invalid_argument("fault start_time must be >= 0");
  }
}

TruthSample figure8_truth(long k, const TrajectoryConfig& cfg) {
  const double t = static_cast<double>(k) * cfg.sample_time;
  const double s2 = std::sin(2.0 * t), c2 = std::cos(2.0 * t);
  const double s4 = std::sin(4.0 * t), c4 = std::cos(4.0 * t);

  TruthSample out;
  out.k = k;
  out.t = t;
  out.R = Vec3(2.0 + s2, 2.0 + s2 * c2, 0.0);
  out.R_dot = Vec3(2.0 * c2, 2.0 * c4, 0.0);
  out.R_ddot = Vec3(-4.0 * s2, -8.0 * s4, 0.0);
  const Vec3 jerk(-8.0 * c2, -32.0 * c4, 0.0);

  Angle h{};
  if (cfg.heading == HeadingMode::velocity) {
    h = direction_of(out.R_dot.x(), out.R_ddot.x(), jerk.x(),
                     out.R_dot.y(), out.R_ddot.y(), jerk.y());
    // xdot = 0 only where ydot = -2, so cutting the branch at +pi/2 keeps
    // the heading continuous along the whole path.
    if (h.value > std::numbers::pi / 2.0) h.value -= 2.0 * std::numbers::pi;
  } else {
    h = direction_of(out.R.x(), out.R_dot.x(), out.R_ddot.x(),
                     out.R.y(), out.R_dot.y(), out.R_ddot.y());
  }
  out.theta = h.value;
  out.omega = h.rate;
  out.omega_dot = h.accel;

  // r = O' R with O' = [c s; -s c]. Derivatives by the product rule.
  const double c = std::cos(out.theta), s = std::sin(out.theta);
  const double w = out.omega, wd = out.omega_dot;
  const double X = out.R.x(), Y = out.R.y();
  const double X1 = out.R_dot.x(), Y1 = out.R_dot.y();
  const double X2 = out.R_ddot.x(), Y2 = out.R_ddot.y();
  // d/dt [c s; -s c] = w [-s c; -c -s]
  // d2/dt2           = wd [-s c; -c -s] + w^2 [-c -s; s -c]
  out.r = Vec3(c * X + s * Y, -s * X + c * Y, 0.0);
  out.r_dot = Vec3(c * X1 + s * Y1 + w * (-s * X + c * Y),
                   -s * X1 + c * Y1 + w * (-c * X - s * Y), 0.0);
  out.r_ddot = Vec3(c * X2 + s * Y2 + 2.0 * w * (-s * X1 + c * Y1) +
                        wd * (-s * X + c * Y) + w * w * (-c * X - s * Y),
                    -s * X2 + c * Y2 + 2.0 * w * (-c * X1 - s * Y1) +
                        wd * (-c * X - s * Y) + w * w * (s * X - c * Y),
                    0.0);
  out.A = Vec3(c * X2 + s * Y2, -s * X2 + c * Y2, 0.0);
  return out;
}

SensorSample ideal_measurement(const TruthSample& truth) {
  SensorSample m;
  m.k = truth.k;
  m.t = truth.t;
  m.theta = truth.theta;
  m.r = truth.r;
  m.omega = Vec3(0.0, 0.0, truth.omega);
  m.A = truth.A;
  return m;
}

SensorModel::SensorModel(NoiseConfig noise, std::uint64_t seed) : noise_(noise), rng_(seed) {
  noise_.validate();
}

SensorSample SensorModel::measure(const TruthSample& truth) {
  SensorSample m = ideal_measurement(truth);
  const double n_theta = unit_(rng_);
  const double n_rx = unit_(rng_);
  const double n_ry = unit_(rng_);
  const double n_w = unit_(rng_);
  const double n_ax = unit_(rng_);
  const double n_ay = unit_(rng_);
  m.theta += noise_.sigma_theta * n_theta;
  m.r.x() += noise_.sigma_r * n_rx;
  m.r.y() += noise_.sigma_r * n_ry;
  m.omega.z() += noise_.sigma_omega * n_w;
  m.A.x() += noise_.sigma_A() * n_ax;
  m.A.y() += noise_.sigma_A() * n_ay;
  return m;
}

SensorSample inject_fault(SensorSample sample, const FaultSpec& fault) {
  if (!(sample.t >= fault.start_time)) return sample;
  double offset = fault.kind == FaultKind::bias ? fault.magnitude
                                                : fault.magnitude * (sample.t - fault.start_time);
  if (fault.sensor == Sensor::x_accel || fault.sensor == Sensor::y_accel) offset *= kGravity;
  switch (fault.sensor) {
    case Sensor::compass: sample.theta += offset; break;
    case Sensor::radar:
      sample.r.x() += offset;
      sample.r.y() += offset;
      break;
    case Sensor::z_gyro: sample.omega.z() += offset; break;
    case Sensor::x_accel: sample.A.x() += offset; break;
    case Sensor::y_accel: sample.A.y() += offset; break;
  }
  return sample;
}

}  // namespace kinfault
