#pragma once
#include <variant>
#include <vector>

#include "polsim/jones.hpp"

namespace polsim {

/// Instantaneous frequency offset of a directly modulated laser pulse.
/// Exponential settling, normalized so the excursion across one pulse of
/// `pulse_ns` equals `span_hz` exactly; offset_at(0) = 0 by convention.
struct ChirpProfile {
  double span_hz{0.0};
  double settle_ns{150.0};
  double pulse_ns{600.0};

  double offset_at(double slot_relative_ns) const;
};

/// One gated laser: nominal frequency, peak launch power, transmit SOP and
/// the in-pulse chirp.
struct ChirpedSource {
  double center_frequency_hz{193.4e12};
  double launch_peak_dbm{0.0};
  StokesVector polarization{1.0, 1.0, 0.0, 0.0};
  double detune_hz{0.0};  // static offset from the link reference frequency
  ChirpProfile chirp{};
  bool always_on{false};

  double peak_watts() const;
  /// detune + chirp, with the chirp frozen at its end value past the pulse.
  double frequency_offset_at(double slot_relative_ns) const;
};

struct ScramblerPlate {
  double orientation0_rad{0.0};
  double retardation_rad{0.0};
  double rate_rad_s{0.0};  // physical plate rotation rate
};

/// Rotating-waveplate scrambler. The only contract against the real device
/// is the calibrated mean Poincare arc rate of its output.
struct ScramblerModel {
  std::vector<ScramblerPlate> plates;
  double target_poincare_rate_rad_s{0.0};
};

JonesMatrix scrambler_matrix(const ScramblerModel& s, double t_s);

/// Mean Poincare arc-length rate of the scrambled probe over `duration_s`.
/// Throws StepTooCoarse when any per-step arc reaches 0.5 rad.
double calibrate_scrambler(const ScramblerModel& s, const StokesVector& probe,
                           double duration_s, double dt_s);

/// Default quarter/half/quarter cascade with incommensurate plate rates,
/// scaled so the measured Poincare rate hits `target_rate_rad_s`.
ScramblerModel make_scrambler(double target_rate_rad_s);

/// First-order PMD element: differential group delay tau about a fixed
/// principal state.
struct DgdElement {
  double tau_s{0.0};
  StokesVector psp_axis{1.0, 0.0, 0.0, 1.0};
};

/// Sphere rotation about psp_axis by 2*pi*freq_offset*tau; identity at zero
/// offset and entrywise periodic in the offset with period 1/tau.
JonesMatrix dgd_matrix(const DgdElement& d, double freq_offset_hz);

struct LossElement {
  double loss_db{0.0};
};

/// Fixed unitary stand-in (static channel realizations in tests).
struct StaticUnitary {
  JonesMatrix matrix{JonesMatrix::identity()};
};

using LinkElement =
    std::variant<ScramblerModel, DgdElement, LossElement, StaticUnitary>;

/// Ordered optical path from the transmit combiner to the receiver input.
struct LinkModel {
  std::vector<LinkElement> elements;
  double total_loss_db{0.0};

  void validate() const;  // total_loss_db must match the element sum
  JonesMatrix matrix_at(double t_s, double freq_offset_hz) const;
};

JonesVector propagate(const LinkModel& link, const JonesVector& v, double t_s,
                      double freq_offset_hz);

inline double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w / 1e-3); }
inline double db_to_amplitude(double loss_db) { return std::pow(10.0, -loss_db / 20.0); }

}  // namespace polsim
