#include "kinfault/kinematics.hpp"

#include <cmath>
#include <stdexcept>

namespace kinfault {

Mat3 rotation_about_z(double theta) {
  if (!std::isfinite(theta)) {
    throw std::invalid_argument("rotation_about_z: non-finite angle");
  }
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Mat3 m;
  m << c, -s, 0.0,
       s,  c, 0.0,
       0.0, 0.0, 1.0;
  return m;
}

Vec3 body_to_earth_position(double theta, const Vec3& r_body) {
  return rotation_about_z(theta) * r_body;
}

Vec3 single_transport_rhs(const Vec3& r, const Vec3& r_dot, const Vec3& omega) {
  return r_dot + omega.cross(r);
}

Vec3 double_transport_rhs(const Vec3& r, const Vec3& r_dot, const Vec3& r_ddot,
                          const Vec3& omega, const Vec3& omega_dot) {
  const Vec3 coriolis = 2.0 * omega.cross(r_dot);
  const Vec3 euler = omega_dot.cross(r);
  const Vec3 centripetal = omega.cross(omega.cross(r));
  return r_ddot + coriolis + euler + centripetal;
}

Vec3 resolve_earth_accel_in_body(double theta, const Vec3& r_ddot_earth) {
  return rotation_about_z(theta).transpose() * r_ddot_earth;
}

bool is_finite(const Vec3& v) { return v.allFinite(); }

}  // namespace kinfault
