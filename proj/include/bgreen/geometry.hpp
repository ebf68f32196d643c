#pragma once
#include <cmath>

#include "bgreen/errors.hpp"

namespace bgreen {

struct Vec3 {
  double x = 0, y = 0, z = 0;

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3 normalized() const {
    const double n = norm();
    if (n == 0.0) throw DomainError("cannot normalize zero vector");
    return {x / n, y / n, z / n};
  }
};

/// Unit vector on S^2, stored as polar angle theta in [0,pi] and azimuth phi.
struct Direction {
  double theta = 0, phi = 0;

  Direction() = default;
  Direction(double theta_, double phi_) : theta(theta_), phi(phi_) {
    if (!(theta >= -1e-12 && theta <= M_PI + 1e-12))
      throw DomainError("Direction: theta outside [0, pi]");
    if (theta < 0) theta = 0;
    if (theta > M_PI) theta = M_PI;
    phi = std::fmod(phi, 2 * M_PI);
    if (phi < 0) phi += 2 * M_PI;
  }

  double mu() const { return std::cos(theta); }

  Vec3 unit() const {
    const double s = std::sin(theta);
    return {s * std::cos(phi), s * std::sin(phi), std::cos(theta)};
  }

  Direction opposite() const { return from_unit(-unit()); }

  static Direction from_unit(const Vec3& v) {
    const Vec3 u = v.normalized();
    double ct = u.z;
    if (ct > 1) ct = 1;
    if (ct < -1) ct = -1;
    double ph = std::atan2(u.y, u.x);
    return Direction(std::acos(ct), ph);
  }

  static Direction zhat() { return Direction(0.0, 0.0); }
};

/// Reference frame whose z-axis points along khat; the x-axis is the image of
/// the lab x-axis under Rz(phi_k) Ry(theta_k).  With this choice the expansion
/// of a rotated harmonic in lab harmonics has coefficients
/// e^{-i m' phi_k} d^l_{m'm}(theta_k).
struct RotatedFrame {
  Vec3 ez, ex, ey;

  explicit RotatedFrame(const Direction& khat) {
    const double ct = std::cos(khat.theta), st = std::sin(khat.theta);
    const double cp = std::cos(khat.phi), sp = std::sin(khat.phi);
    ez = {st * cp, st * sp, ct};
    ex = {ct * cp, ct * sp, -st};
    ey = {-sp, cp, 0.0};
  }

  double mu_of(const Vec3& w) const { return w.dot(ez); }

  /// Azimuth of w measured in the rotated frame; 0 when w is (anti)parallel to
  /// the frame axis (the associated Legendre factor vanishes there for m != 0).
  double phi_of(const Vec3& w) const {
    const double a = w.dot(ex), b = w.dot(ey);
    if (a == 0.0 && b == 0.0) return 0.0;
    return std::atan2(b, a);
  }
};

} // namespace bgreen
