// SPDX-FileCopyrightText: 2026 The walkin authors
// SPDX-License-Identifier: Apache-2.0

// Brute-force references shared by the unit and acceptance tests. The
// capsule samplers do not call into the library's geometry.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "walkin/fingers.hpp"
#include "walkin/math3d.hpp"

namespace walkin::test {

// Points on a capsule surface: a cylinder grid plus the two outward
// hemispheres. `resolution` is the largest distance from any surface point
// to its nearest sample.
struct SampledCapsule {
  std::vector<Vec3> surface;
  std::vector<Vec3> axis;
  double r = 0.0;
  double resolution = 0.0;
};

inline SampledCapsule sample_capsule(const Vec3& s, const Vec3& e, double r, int n_axial, int n_around) {
  const double pi = 3.14159265358979323846;
  const Vec3 d = e - s;
  const double len = std::sqrt(d.x * d.x + d.y * d.y + d.z * d.z);
  const Vec3 a{d.x / len, d.y / len, d.z / len};
  // Any unit vector orthogonal to a, then the third axis.
  Vec3 u = std::abs(a.x) < 0.9 ? Vec3{0, -a.z, a.y} : Vec3{a.z, 0, -a.x};
  const double un = std::sqrt(u.x * u.x + u.y * u.y + u.z * u.z);
  u = {u.x / un, u.y / un, u.z / un};
  const Vec3 v{a.y * u.z - a.z * u.y, a.z * u.x - a.x * u.z, a.x * u.y - a.y * u.x};

  SampledCapsule out;
  out.r = r;
  for (int i = 0; i <= n_axial; ++i) {
    const Vec3 c = s + d * (static_cast<double>(i) / n_axial);
    out.axis.push_back(c);
    for (int k = 0; k < n_around; ++k) {
      const double phi = 2 * pi * k / n_around;
      out.surface.push_back(c + (u * std::cos(phi) + v * std::sin(phi)) * r);
    }
  }
  const int n_polar = n_around / 4;
  for (int end = 0; end < 2; ++end) {
    const Vec3 c = end == 0 ? s : e;
    const double sign = end == 0 ? -1.0 : 1.0;
    for (int i = 1; i <= n_polar; ++i) {
      const double theta = 0.5 * pi * i / n_polar;  // from the rim to the pole
      for (int k = 0; k < n_around; ++k) {
        const double phi = 2 * pi * k / n_around;
        out.surface.push_back(c + (u * std::cos(phi) + v * std::sin(phi)) * (r * std::cos(theta)) +
                              a * (sign * r * std::sin(theta)));
      }
    }
  }
  const double axial = len / n_axial, around = 2 * pi * r / n_around;
  out.resolution = 0.5 * std::sqrt(axial * axial + around * around);
  return out;
}

inline double nearest_sample(const SampledCapsule& c, const Vec3& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const Vec3& q : c.surface) {
    const Vec3 d = p - q;
    best = std::min(best, d.x * d.x + d.y * d.y + d.z * d.z);
  }
  return std::sqrt(best);
}

// Inside when some axis sample's ball of radius r contains p. Points within
// the axial sampling gap of the surface can be misjudged; callers skip them.
inline bool inside_sampled(const SampledCapsule& c, const Vec3& p) {
  for (const Vec3& q : c.axis) {
    const Vec3 d = p - q;
    if (d.x * d.x + d.y * d.y + d.z * d.z < c.r * c.r) return true;
  }
  return false;
}

struct StencilCheck {
  int checked = 0;
  double worst = 0.0;
};

// Central-difference gradients from the library against a five-point
// stencil on random finger configurations around capsule `c`. Stencils that
// straddle a kink are skipped: a joint changing side of the surface, or a
// joint within 1 cm of the capsule axis, where the distance has a cone point.
inline StencilCheck compare_stencils(const HandModel& hand, const CapsuleShape& c, double h,
                                     std::uint64_t seed, int trials) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  StencilCheck out;
  for (int trial = 0; trial < trials; ++trial) {
    const std::size_t f = static_cast<std::size_t>(trial) % hand.fingers.size();
    const std::size_t n = hand.fingers[f].joints.size();
    std::vector<double> t(n);
    for (double& v : t) v = u(rng);
    const std::vector<double> g = objective_gradient(hand, f, t, c, {}, h);
    for (std::size_t k = 0; k < n; ++k) {
      double v[5];
      std::vector<bool> side0;
      bool kink = false;
      for (int s = -2; s <= 2; ++s) {
        std::vector<double> ts = t;
        ts[k] += s * h;
        v[s + 2] = finger_objective(hand, f, ts, c);
        std::vector<bool> side;
        for (const Vec3& p : finger_joint_positions(hand, f, ts)) {
          const double d = capsule_sdf(c, p);
          side.push_back(d < 0.0);
          kink = kink || d < 0.01 - c.r;
        }
        if (s == -2) side0 = side;
        kink = kink || side != side0;
      }
      if (kink) continue;
      const double five = (-v[4] + 8.0 * v[3] - 8.0 * v[1] + v[0]) / (12.0 * h);
      out.worst = std::max(out.worst, std::abs(g[k] - five));
      ++out.checked;
    }
  }
  return out;
}

}  // namespace walkin::test
