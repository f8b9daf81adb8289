#include "polsim/jones.hpp"

#include <algorithm>
#include <cmath>

#include "polsim/errors.hpp"

namespace polsim {

bool JonesVector::finite() const {
  return std::isfinite(ex.real()) && std::isfinite(ex.imag()) &&
         std::isfinite(ey.real()) && std::isfinite(ey.imag());
}

double StokesVector::dop() const {
  if (s0 <= 0.0) return 0.0;
  return std::sqrt(s1 * s1 + s2 * s2 + s3 * s3) / s0;
}

bool StokesVector::fully_polarized(double tol) const {
  return s0 > 0.0 && std::abs(dop() - 1.0) <= tol;
}

StokesVector StokesVector::normalized() const {
  if (s0 <= 0.0) throw NotFullyPolarized("cannot normalize zero-power Stokes vector");
  return {1.0, s1 / s0, s2 / s0, s3 / s0};
}

StokesVector antipode(const StokesVector& s) {
  return {s.s0, -s.s1, -s.s2, -s.s3};
}

JonesMatrix JonesMatrix::identity() {
  JonesMatrix r;
  r.m = {Complex{1, 0}, Complex{0, 0}, Complex{0, 0}, Complex{1, 0}};
  r.lossless = true;
  return r;
}

JonesMatrix JonesMatrix::operator*(const JonesMatrix& rhs) const {
  JonesMatrix r;
  r.m[0] = m[0] * rhs.m[0] + m[1] * rhs.m[2];
  r.m[1] = m[0] * rhs.m[1] + m[1] * rhs.m[3];
  r.m[2] = m[2] * rhs.m[0] + m[3] * rhs.m[2];
  r.m[3] = m[2] * rhs.m[1] + m[3] * rhs.m[3];
  r.lossless = lossless && rhs.lossless;
  return r;
}

double JonesMatrix::unitarity_defect() const {
  // M^dagger M entries
  const Complex a = std::conj(m[0]) * m[0] + std::conj(m[2]) * m[2];
  const Complex b = std::conj(m[0]) * m[1] + std::conj(m[2]) * m[3];
  const Complex c = std::conj(m[1]) * m[0] + std::conj(m[3]) * m[2];
  const Complex d = std::conj(m[1]) * m[1] + std::conj(m[3]) * m[3];
  return std::max({std::abs(a - 1.0), std::abs(b), std::abs(c),
                   std::abs(d - 1.0)});
}

JonesMatrix waveplate_matrix(const WaveplateStage& stage) {
  // R(phi) diag(e^{-i d/2}, e^{+i d/2}) R(-phi) written out:
  //   cos(d/2) I - i sin(d/2) [ cos 2phi   sin 2phi ;
  //                             sin 2phi  -cos 2phi ]
  const double ch = std::cos(stage.retardation_rad / 2.0);
  const double sh = std::sin(stage.retardation_rad / 2.0);
  const double c2 = std::cos(2.0 * stage.orientation_rad);
  const double s2 = std::sin(2.0 * stage.orientation_rad);
  JonesMatrix r;
  r.m[0] = Complex{ch, -sh * c2};
  r.m[1] = Complex{0.0, -sh * s2};
  r.m[2] = Complex{0.0, -sh * s2};
  r.m[3] = Complex{ch, sh * c2};
  r.lossless = true;
  return r;
}

JonesMatrix rotation_about_stokes_axis(const StokesVector& axis,
                                       double angle_rad) {
  const StokesVector n = axis.normalized();
  if (!axis.fully_polarized(1e-6))
    throw NotFullyPolarized("rotation axis must be a unit Stokes direction");
  // M = P_+ + e^{i angle} P_-, with P_+- the eigenprojectors of n.sigma.
  // Entrywise 2*pi-periodic in the angle, and M(0) = I exactly.
  const Complex e = std::polar(1.0, angle_rad);
  const Complex half_sum = (1.0 + e) * 0.5;
  const Complex half_diff = (1.0 - e) * 0.5;
  JonesMatrix r;
  r.m[0] = half_sum + half_diff * n.s1;
  r.m[1] = half_diff * Complex{n.s2, -n.s3};
  r.m[2] = half_diff * Complex{n.s2, n.s3};
  r.m[3] = half_sum - half_diff * n.s1;
  r.lossless = true;
  return r;
}

StokesVector jones_to_stokes(const JonesVector& v) {
  const double px = std::norm(v.ex);
  const double py = std::norm(v.ey);
  const Complex cross = std::conj(v.ex) * v.ey;
  return {px + py, px - py, 2.0 * cross.real(), 2.0 * cross.imag()};
}

JonesVector stokes_to_jones(const StokesVector& s) {
  if (!s.fully_polarized(1e-9))
    throw NotFullyPolarized("stokes_to_jones requires a fully polarized input");
  const double ex2 = (s.s0 + s.s1) / 2.0;
  // South-pole branch: the canonical-phase formula divides by ex.
  if (ex2 <= 1e-14 * s.s0) return {Complex{0, 0}, Complex{std::sqrt(s.s0), 0}};
  const double ex = std::sqrt(ex2);
  return {Complex{ex, 0}, Complex{s.s2 / (2.0 * ex), s.s3 / (2.0 * ex)}};
}

double sphere_angle(const StokesVector& a, const StokesVector& b) {
  if (!a.fully_polarized(1e-6) || !b.fully_polarized(1e-6))
    throw NotFullyPolarized("sphere_angle requires fully polarized inputs");
  const StokesVector na = a.normalized();
  const StokesVector nb = b.normalized();
  const double dot = na.s1 * nb.s1 + na.s2 * nb.s2 + na.s3 * nb.s3;
  return std::acos(std::clamp(dot, -1.0, 1.0));
}

double analyzer_power(const JonesVector& v, const StokesVector& axis) {
  const JonesVector a = stokes_to_jones(axis.normalized());
  const Complex amp = std::conj(a.ex) * v.ex + std::conj(a.ey) * v.ey;
  return std::norm(amp);
}

}  // namespace polsim
