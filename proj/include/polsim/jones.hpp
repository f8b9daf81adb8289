#pragma once
#include <array>
#include <complex>

namespace polsim {

// Sign conventions, fixed project-wide and asserted by the unit tests:
//   * time dependence e^{-i w t};
//   * s0 = |ex|^2 + |ey|^2,  s1 = |ex|^2 - |ey|^2,
//     s2 = 2 Re(ex* ey),     s3 = 2 Im(ex* ey);
//   * s3 > 0 ("right circular" in this project) is ey = +i ex;
//   * retarder: W(phi, delta) = R(phi) diag(e^{-i delta/2}, e^{+i delta/2}) R(-phi),
//     which rotates the Poincare sphere right-handed by delta about the
//     equatorial axis (cos 2 phi, sin 2 phi, 0).
// Any self-consistent set reproduces the physics; this one is frozen so that
// every expected value in the tests has a single meaning.

using Complex = std::complex<double>;

/// Transverse field amplitude, components in sqrt(W).
struct JonesVector {
  Complex ex{};
  Complex ey{};

  double power() const { return std::norm(ex) + std::norm(ey); }
  bool finite() const;
};

/// Observable polarization state; s0..s3 in W. Normalized (s0 = 1) vectors
/// are points of the Poincare sphere.
struct StokesVector {
  double s0{};
  double s1{};
  double s2{};
  double s3{};

  double dop() const;  // degree of polarization, |s_vec| / s0
  bool fully_polarized(double tol = 1e-9) const;
  StokesVector normalized() const;  // scaled to s0 = 1
};

/// Opposite point on the sphere (orthogonal polarization).
StokesVector antipode(const StokesVector& s);

/// 2x2 operator on Jones vectors, row-major. `lossless` records by
/// construction that the matrix is unitary (possibly times a scalar <= 1
/// amplitude factor when false).
struct JonesMatrix {
  std::array<Complex, 4> m{};  // [ m00 m01 ; m10 m11 ]
  bool lossless{true};

  static JonesMatrix identity();

  JonesVector operator*(const JonesVector& v) const {
    return {m[0] * v.ex + m[1] * v.ey, m[2] * v.ex + m[3] * v.ey};
  }
  JonesMatrix operator*(const JonesMatrix& rhs) const;

  double unitarity_defect() const;  // max |(M^dagger M - I)_ij|
};

/// Waveplate with unbounded orientation and retardation. The angles are raw
/// reals and are never wrapped or reset; trajectory continuity of these
/// values is what "endless" means throughout the project.
struct WaveplateStage {
  double orientation_rad{};
  double retardation_rad{};
};

JonesMatrix waveplate_matrix(const WaveplateStage& stage);

/// Unitary rotating the Poincare sphere right-handed by `angle_rad` about the
/// unit Stokes `axis`, normalized to the entrywise-periodic representative
/// (the +axis eigenstate is left untouched).
JonesMatrix rotation_about_stokes_axis(const StokesVector& axis,
                                       double angle_rad);

StokesVector jones_to_stokes(const JonesVector& v);

/// Canonical Jones representative (ex real >= 0) of a fully polarized state.
/// Throws NotFullyPolarized when dop deviates from 1 by more than 1e-9.
JonesVector stokes_to_jones(const StokesVector& s);

/// Great-circle angle between two fully polarized states, in [0, pi].
double sphere_angle(const StokesVector& a, const StokesVector& b);

/// Power transmitted through an ideal polarizer passing `axis`.
double analyzer_power(const JonesVector& v, const StokesVector& axis);

}  // namespace polsim
