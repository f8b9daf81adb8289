#pragma once
#include <array>
#include <span>

#include "polsim/jones.hpp"
#include "polsim/rng.hpp"
#include "polsim/tdm.hpp"
#include "polsim/trace.hpp"

namespace polsim {

/// Receiver optics: 10% tap to a PBS analyzing 90/0 degrees, then a 20% tap
/// to a PBS whose blocked port analyzes -45 degrees, then the probe through
/// path. Analyzer axes are configurable to model mis-set control
/// polarizations; defaults follow the experimental setup.
struct TapPbsChain {
  double tap1_ratio{0.10};
  double tap2_ratio{0.20};
  double through_loss_db{4.0733};  // connector/IL stand-in on the probe path

  StokesVector pbs1_error_axis{1.0, -1.0, 0.0, 0.0};  // 90 deg -> I90
  StokesVector pbs1_pass_axis{1.0, 1.0, 0.0, 0.0};    //  0 deg -> I0
  StokesVector pbs2_error_axis{1.0, 0.0, -1.0, 0.0};  // -45 deg -> I45m

  /// Total probe-path insertion loss: both tap extractions plus the residual.
  double probe_path_loss_db() const;
};

/// Optical powers landing on the three photodiodes for one field sample.
struct AnalyzedPowers {
  double p90_w{0.0};
  double p0_w{0.0};
  double p45m_w{0.0};
};

AnalyzedPowers analyzed_powers(const JonesVector& field_at_rx,
                               const TapPbsChain& chain);

/// Avalanche photodiode as gain + additive noise + saturation. Noise is the
/// configured output-referred floor plus a multiplied shot term; one gaussian
/// draw per sample keeps traces reproducible under a fixed seed.
struct ApdModel {
  double responsivity_a_w{0.9};
  double gain{10.0};
  double noise_density_a_rthz{1.0e-10};
  double bandwidth_hz{5.0e8};
  double saturation_current_a{1.0e-4};
  double dark_current_a{1.0e-9};

  double mean_current_a(double optical_w) const;
  double noise_sigma_a(double mean_current) const;
  /// Clipped to [0, saturation]; pass rng = nullptr for the noiseless path.
  double current_a(double optical_w, Rng* rng) const;
};

struct DetectedFrame {
  PhotocurrentTrace i90;
  PhotocurrentTrace i0;
  PhotocurrentTrace i45m;
};

/// Detects one window of post-transformer field samples into the three
/// photocurrent traces.
DetectedFrame detect_frame(std::span<const JonesVector> field_at_rx,
                           const TapPbsChain& chain,
                           const std::array<ApdModel, 3>& apds, double dt_ns,
                           double t0_ns, Rng* rng);

/// Pointwise sum of the two PBS-1 photocurrents; the controller's replica of
/// the total incident power. Throws GridMismatch on different sampling.
PhotocurrentTrace total_power_replica(const PhotocurrentTrace& i90,
                                      const PhotocurrentTrace& i0);

/// Initial automated bias procedure: scales each APD gain so a pilot pulse
/// at `pilot_peak_dbm` fully routed onto that diode sits at 70% of
/// saturation. Throws PowerOutOfRange outside the documented
/// [-11.2, 0] dBm pilot peak window.
std::array<ApdModel, 3> autobias(std::array<ApdModel, 3> apds,
                                 const SlotSchedule& sched,
                                 double pilot_peak_dbm,
                                 const TapPbsChain& chain);

/// Mean optical power of the TDM frame given equal pilot peaks and a weak
/// probe. Throws NoPilotPower when both pilot slots are empty.
double mean_power_of_schedule(const SlotSchedule& sched, double pilot_peak_dbm);

}  // namespace polsim
