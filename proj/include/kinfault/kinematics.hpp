// Planar frame rotations and the single/double transport theorems resolved
// in the vehicle body frame.
#pragma once

#include <Eigen/Dense>

namespace kinfault {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Orientation matrix O_{E/B}(theta): right-hand rotation about the Earth
/// z-axis by the azimuth theta. Its transpose is O_{B/E}(theta).
///
/// Throws std::invalid_argument if theta is not finite.
Mat3 rotation_about_z(double theta);

/// R|_E = O_{E/B}(theta) r|_B
Vec3 body_to_earth_position(double theta, const Vec3& r_body);

/// Right-hand side of the single transport theorem: r_dot + omega x r.
Vec3 single_transport_rhs(const Vec3& r, const Vec3& r_dot, const Vec3& omega);

/// Right-hand side of the double transport theorem:
///   r_ddot + 2 omega x r_dot + omega_dot x r + omega x (omega x r)
Vec3 double_transport_rhs(const Vec3& r, const Vec3& r_dot, const Vec3& r_ddot,
                          const Vec3& omega, const Vec3& omega_dot);

/// A|_B = O_{B/E}(theta) R_ddot|_E
Vec3 resolve_earth_accel_in_body(double theta, const Vec3& r_ddot_earth);

bool is_finite(const Vec3& v);

}  // namespace kinfault
