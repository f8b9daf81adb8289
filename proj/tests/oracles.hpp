// Test-only reference implementations, kept independent of the library code
// paths they check.
#pragma once
#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "polsim/jones.hpp"
#include "polsim/rng.hpp"

namespace oracles {

using polsim::JonesVector;
using polsim::StokesVector;

/// Rodrigues rotation of the (s1,s2,s3) part about a unit axis.
inline StokesVector rotate_stokes(const StokesVector& s,
                                  const std::array<double, 3>& axis,
                                  double angle) {
  const double c = std::cos(angle), si = std::sin(angle);
  const std::array<double, 3> v{s.s1, s.s2, s.s3};
  const double dot = axis[0] * v[0] + axis[1] * v[1] + axis[2] * v[2];
  const std::array<double, 3> cross{axis[1] * v[2] - axis[2] * v[1],
                                    axis[2] * v[0] - axis[0] * v[2],
                                    axis[0] * v[1] - axis[1] * v[0]};
  StokesVector out;
  out.s0 = s.s0;
  out.s1 = v[0] * c + cross[0] * si + axis[0] * dot * (1 - c);
  out.s2 = v[1] * c + cross[1] * si + axis[1] * dot * (1 - c);
  out.s3 = v[2] * c + cross[2] * si + axis[2] * dot * (1 - c);
  return out;
}

/// Brute-force complementary CDF by counting.
inline double ccdf_by_counting(const std::vector<double>& samples, double r) {
  long n = 0;
  for (double s : samples)
    if (s > r) ++n;
  return static_cast<double>(n) / static_cast<double>(samples.size());
}

/// Uniform random point on the Poincare sphere as a Stokes vector.
inline StokesVector random_sop(polsim::Rng& rng, double s0 = 1.0) {
  const double z = rng.uniform(-1.0, 1.0);
  const double phi = rng.uniform(0.0, 2.0 * M_PI);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {s0, s0 * r * std::cos(phi), s0 * r * std::sin(phi), s0 * z};
}

/// Random Jones vector with a random global phase (exercises phase freedom).
inline JonesVector random_jones(polsim::Rng& rng, double power = 1.0) {
  const StokesVector s = random_sop(rng, power);
  JonesVector v = polsim::stokes_to_jones(s);
  const polsim::Complex phase = std::polar(1.0, rng.uniform(0.0, 2.0 * M_PI));
  return {v.ex * phase, v.ey * phase};
}

inline double max_entry_diff(const polsim::JonesMatrix& a,
                             const polsim::JonesMatrix& b) {
  double m = 0.0;
  for (int i = 0; i < 4; ++i) m = std::max(m, std::abs(a.m[i] - b.m[i]));
  return m;
}

inline double stokes_diff(const StokesVector& a, const StokesVector& b) {
  return std::max({std::abs(a.s0 - b.s0), std::abs(a.s1 - b.s1),
                   std::abs(a.s2 - b.s2), std::abs(a.s3 - b.s3)});
}

}  // namespace oracles
