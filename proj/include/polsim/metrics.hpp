#pragma once
#include <array>
#include <span>
#include <string>
#include <vector>

#include "polsim/engine.hpp"

namespace polsim {

/// Empirical complementary distribution 1 - F(r): the fraction of samples
/// strictly above r. Nonincreasing, 1 below the minimum, 0 at the maximum.
class ComplementaryCdf {
 public:
  static ComplementaryCdf from_samples(std::vector<double> samples);

  double operator()(double r) const;
  const std::vector<double>& sorted_samples() const { return sorted_; }
  void write_csv(const std::string& path) const;

 private:
  std::vector<double> sorted_;
};

/// Gated polarimeter configuration (probe-slot Stokes sampling).
struct GatedPolarimeter {
  double sample_rate_hz{100e6};
  SlotId gate{SlotId::Probe};
};

/// Statistics of one probe SOP's gated sample cloud on the sphere. Spreads
/// are angular extents of the cloud along the differential-phase motion
/// direction (the great circle through +-45/circular when the pinned axis is
/// S1) and orthogonal to it.
struct SphereSpot {
  std::array<double, 3> mean_axis{1.0, 0.0, 0.0};
  double spread_along_rad{0.0};
  double spread_orth_rad{0.0};
  double max_deviation_rad{0.0};
  std::size_t count{0};

  double ellipticity() const;
};

/// Analyzes one SOP segment; `pinned_axis` is the Stokes direction held by
/// polarization control (+S1 by default). Throws InsufficientSamples below
/// `min_samples`.
SphereSpot analyze_spot(std::span<const std::array<double, 3>> samples,
                        const std::array<double, 3>& pinned_axis,
                        std::size_t min_samples = 100);

/// SOP arc length traced within one 0-deg pilot pulse measured directly
/// behind the last DGD element (before the controller). Requires a DGD
/// element in the link.
double chirp_excursion_report(const PlantConfig& cfg, double dt_ns = 0.5,
                              double t_start_s = 0.0);

struct SummaryStats {
  double max{0.0};
  double median{0.0};
  double p999{0.0};

  static SummaryStats from_samples(std::vector<double> samples);
};

/// The six cartesian probe SOPs transmitted sequentially for the sphere-spot
/// synopsis, in transmission order: +S1, -S1, +S2, -S2, +S3, -S3.
std::array<StokesVector, 6> cartesian_probe_sops();
std::array<std::string, 6> cartesian_probe_labels();

}  // namespace polsim
