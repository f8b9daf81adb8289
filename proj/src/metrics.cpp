#include "polsim/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "polsim/csv.hpp"
#include "polsim/errors.hpp"

namespace polsim {

ComplementaryCdf ComplementaryCdf::from_samples(std::vector<double> samples) {
  if (samples.empty())
    throw EmptySamples("ComplementaryCdf: at least one sample required");
  std::sort(samples.begin(), samples.end());
  ComplementaryCdf c;
  c.sorted_ = std::move(samples);
  return c;
}

double ComplementaryCdf::operator()(double r) const {
  // strict inequality: fraction of samples > r
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), r);
  return static_cast<double>(sorted_.end() - it) /
         static_cast<double>(sorted_.size());
}

void ComplementaryCdf::write_csv(const std::string& path) const {
  CsvWriter w(path, {"rie", "ccdf"});
  for (std::size_t i = 0; i < sorted_.size(); ++i) {
    if (i + 1 < sorted_.size() && sorted_[i + 1] == sorted_[i]) continue;
    w.row({sorted_[i], (*this)(sorted_[i])});
  }
}

double SphereSpot::ellipticity() const {
  if (spread_orth_rad <= 0.0)
    return spread_along_rad > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
  return spread_along_rad / spread_orth_rad;
}

namespace {

std::array<double, 3> normalize3(const std::array<double, 3>& v) {
  const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  if (n <= 0.0) return {1.0, 0.0, 0.0};
  return {v[0] / n, v[1] / n, v[2] / n};
}

std::array<double, 3> cross3(const std::array<double, 3>& a,
                             const std::array<double, 3>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

double dot3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

/// Extent of a set of angles, treating them as circular: 2*pi minus the
/// largest empty gap. Reduces to max - min for compact clouds.
double circular_extent(std::vector<double>& angles) {
  if (angles.size() < 2) return 0.0;
  std::sort(angles.begin(), angles.end());
  double max_gap = 2.0 * M_PI - (angles.back() - angles.front());
  for (std::size_t i = 1; i < angles.size(); ++i)
    max_gap = std::max(max_gap, angles[i] - angles[i - 1]);
  return 2.0 * M_PI - max_gap;
}

}  // namespace

SphereSpot analyze_spot(std::span<const std::array<double, 3>> samples,
                        const std::array<double, 3>& pinned_axis,
                        std::size_t min_samples) {
  if (samples.size() < min_samples)
    throw InsufficientSamples("analyze_spot: not enough gated samples");
  std::array<double, 3> mean_raw{0.0, 0.0, 0.0};
  for (const auto& s : samples)
    for (int i = 0; i < 3; ++i) mean_raw[i] += s[i];
  const std::array<double, 3> m = normalize3(mean_raw);
  const std::array<double, 3> pin = normalize3(pinned_axis);

  // Tangential direction of differential-phase motion at the spot centroid.
  std::array<double, 3> along = cross3(pin, m);
  const double along_norm = std::sqrt(dot3(along, along));
  if (along_norm < 1e-12) {
    // Spot centroid exactly on the pinned axis; any tangent direction works.
    const std::array<double, 3> aux =
        std::abs(pin[0]) < 0.9 ? std::array<double, 3>{1.0, 0.0, 0.0}
                               : std::array<double, 3>{0.0, 1.0, 0.0};
    along = normalize3(cross3(pin, aux));
  } else {
    along = {along[0] / along_norm, along[1] / along_norm,
             along[2] / along_norm};
  }
  const std::array<double, 3> orth = normalize3(cross3(m, along));

  SphereSpot spot;
  spot.mean_axis = m;
  spot.count = samples.size();
  std::vector<double> a_angles, b_angles;
  a_angles.reserve(samples.size());
  b_angles.reserve(samples.size());
  for (const auto& s : samples) {
    const double w = dot3(s, m);
    a_angles.push_back(std::atan2(dot3(s, along), w));
    b_angles.push_back(std::atan2(dot3(s, orth), w));
    spot.max_deviation_rad =
        std::max(spot.max_deviation_rad, std::acos(std::clamp(w, -1.0, 1.0)));
  }
  spot.spread_along_rad = circular_extent(a_angles);
  spot.spread_orth_rad = circular_extent(b_angles);
  return spot;
}

double chirp_excursion_report(const PlantConfig& cfg, double dt_ns,
                              double t_start_s) {
  // Truncate the link right behind the last DGD element.
  LinkModel truncated;
  std::size_t last_dgd = 0;
  bool found = false;
  for (std::size_t i = 0; i < cfg.link.elements.size(); ++i) {
    if (std::holds_alternative<DgdElement>(cfg.link.elements[i])) {
      last_dgd = i;
      found = true;
    }
  }
  if (!found)
    throw SimError("chirp_excursion_report: link holds no DGD element");
  truncated.elements.assign(cfg.link.elements.begin(),
                            cfg.link.elements.begin() + last_dgd + 1);
  for (const auto& e : truncated.elements)
    if (const auto* l = std::get_if<LossElement>(&e))
      truncated.total_loss_db += l->loss_db;

  const ChirpedSource& src = cfg.sources.pilot0;
  ChirpProfile chirp = src.chirp;
  chirp.pulse_ns = cfg.schedule.pilot0_ns;
  const JonesVector in = stokes_to_jones(src.polarization.normalized());

  double arc = 0.0;
  bool have_prev = false;
  StokesVector prev{};
  for (double u = 0.0; u <= cfg.schedule.pilot0_ns + 1e-9; u += dt_ns) {
    const double nu = src.detune_hz + chirp.offset_at(u);
    const JonesMatrix m = truncated.matrix_at(t_start_s + u * 1e-9, nu);
    const StokesVector out = jones_to_stokes(m * in);
    if (have_prev) arc += sphere_angle(out, prev);
    prev = out;
    have_prev = true;
  }
  return arc;
}

SummaryStats SummaryStats::from_samples(std::vector<double> samples) {
  if (samples.empty())
    throw EmptySamples("SummaryStats: at least one sample required");
  std::sort(samples.begin(), samples.end());
  SummaryStats s;
  s.max = samples.back();
  const std::size_t n = samples.size();
  s.median = (n % 2 == 1) ? samples[n / 2]
                          : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
  const std::size_t rank = static_cast<std::size_t>(std::ceil(0.999 * n));
  s.p999 = samples[std::min(n - 1, rank == 0 ? 0 : rank - 1)];
  return s;
}

std::array<StokesVector, 6> cartesian_probe_sops() {
  return {StokesVector{1, 1, 0, 0},  StokesVector{1, -1, 0, 0},
          StokesVector{1, 0, 1, 0},  StokesVector{1, 0, -1, 0},
          StokesVector{1, 0, 0, 1},  StokesVector{1, 0, 0, -1}};
}

std::array<std::string, 6> cartesian_probe_labels() {
  return {"s1p", "s1m", "s2p", "s2m", "s3p", "s3m"};
}

}  // namespace polsim
