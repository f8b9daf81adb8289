#include "polsim/channel.hpp"

#include <cmath>

#include "polsim/errors.hpp"

namespace polsim {

double ChirpProfile::offset_at(double slot_relative_ns) const {
  if (span_hz == 0.0) return 0.0;
  const double t = std::max(0.0, std::min(slot_relative_ns, pulse_ns));
  const double norm = 1.0 - std::exp(-pulse_ns / settle_ns);
  return span_hz * (1.0 - std::exp(-t / settle_ns)) / norm;
}

double ChirpedSource::peak_watts() const { return dbm_to_watts(launch_peak_dbm); }

double ChirpedSource::frequency_offset_at(double slot_relative_ns) const {
  return detune_hz + chirp.offset_at(slot_relative_ns);
}

JonesMatrix scrambler_matrix(const ScramblerModel& s, double t_s) {
  JonesMatrix m = JonesMatrix::identity();
  for (const auto& p : s.plates) {
    const WaveplateStage stage{p.orientation0_rad + p.rate_rad_s * t_s,
                               p.retardation_rad};
    m = waveplate_matrix(stage) * m;  // plates in propagation order
  }
  return m;
}

double calibrate_scrambler(const ScramblerModel& s, const StokesVector& probe,
                           double duration_s, double dt_s) {
  const JonesVector in = stokes_to_jones(probe.normalized());
  double arc = 0.0;
  StokesVector prev = jones_to_stokes(scrambler_matrix(s, 0.0) * in);
  const long steps = static_cast<long>(duration_s / dt_s);
  for (long k = 1; k <= steps; ++k) {
    const StokesVector cur =
        jones_to_stokes(scrambler_matrix(s, k * dt_s) * in);
    const double step_arc = sphere_angle(cur, prev);
    if (step_arc >= 0.5)
      throw StepTooCoarse("calibrate_scrambler: per-step arc >= 0.5 rad");
    arc += step_arc;
    prev = cur;
  }
  return arc / (steps * dt_s);
}

ScramblerModel make_scrambler(double target_rate_rad_s) {
  ScramblerModel s;
  // Quarter/half/quarter cascade; rate ratios chosen incommensurate so the
  // output trajectory fills the sphere instead of closing on itself.
  s.plates = {
      {0.1, M_PI / 2.0, 1.0},
      {0.9, M_PI, 0.6180339887498949},
      {0.4, M_PI / 2.0, 0.4142135623730951},
  };
  s.target_poincare_rate_rad_s = target_rate_rad_s;
  if (target_rate_rad_s == 0.0) {
    for (auto& p : s.plates) p.rate_rad_s = 0.0;
    return s;
  }
  // Mean arc rate scales linearly with a common factor on all plate rates,
  // so one measurement at unit scale fixes the calibration.
  const double unit_rate =
      calibrate_scrambler(s, StokesVector{1.0, 1.0, 0.0, 0.0}, 240.0, 0.02);
  const double scale = target_rate_rad_s / unit_rate;
  for (auto& p : s.plates) p.rate_rad_s *= scale;
  return s;
}

JonesMatrix dgd_matrix(const DgdElement& d, double freq_offset_hz) {
  if (d.tau_s == 0.0) return JonesMatrix::identity();
  const double angle = 2.0 * M_PI * freq_offset_hz * d.tau_s;
  return rotation_about_stokes_axis(d.psp_axis, angle);
}

void LinkModel::validate() const {
  double sum = 0.0;
  for (const auto& e : elements)
    if (const auto* loss = std::get_if<LossElement>(&e)) sum += loss->loss_db;
  if (std::abs(sum - total_loss_db) > 1e-9)
    throw SimError("LinkModel: total_loss_db does not match element sum");
}

JonesMatrix LinkModel::matrix_at(double t_s, double freq_offset_hz) const {
  JonesMatrix m = JonesMatrix::identity();
  double loss_db = 0.0;
  for (const auto& e : elements) {
    if (const auto* s = std::get_if<ScramblerModel>(&e)) {
      m = scrambler_matrix(*s, t_s) * m;
    } else if (const auto* d = std::get_if<DgdElement>(&e)) {
      m = dgd_matrix(*d, freq_offset_hz) * m;
    } else if (const auto* l = std::get_if<LossElement>(&e)) {
      loss_db += l->loss_db;
    } else if (const auto* u = std::get_if<StaticUnitary>(&e)) {
      m = u->matrix * m;
    }
  }
  if (loss_db != 0.0) {
    const double amp = db_to_amplitude(loss_db);
    for (auto& c : m.m) c *= amp;
    m.lossless = false;
  }
  return m;
}

JonesVector propagate(const LinkModel& link, const JonesVector& v, double t_s,
                      double freq_offset_hz) {
  return link.matrix_at(t_s, freq_offset_hz) * v;
}

}  // namespace polsim
