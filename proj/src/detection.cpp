#include "polsim/detection.hpp"

#include <algorithm>
#include <cmath>

#include "polsim/channel.hpp"
#include "polsim/errors.hpp"

namespace polsim {

namespace {
constexpr double kElectronCharge = 1.602176634e-19;
constexpr double kAutobiasHeadroom = 0.70;
}  // namespace

double TapPbsChain::probe_path_loss_db() const {
  const double through = (1.0 - tap1_ratio) * (1.0 - tap2_ratio);
  return -10.0 * std::log10(through) + through_loss_db;
}

AnalyzedPowers analyzed_powers(const JonesVector& v, const TapPbsChain& chain) {
  AnalyzedPowers out;
  out.p90_w = chain.tap1_ratio * analyzer_power(v, chain.pbs1_error_axis);
  out.p0_w = chain.tap1_ratio * analyzer_power(v, chain.pbs1_pass_axis);
  const double tap2 = (1.0 - chain.tap1_ratio) * chain.tap2_ratio;
  out.p45m_w = tap2 * analyzer_power(v, chain.pbs2_error_axis);
  return out;
}

double ApdModel::mean_current_a(double optical_w) const {
  return gain * responsivity_a_w * optical_w + dark_current_a;
}

double ApdModel::noise_sigma_a(double mean_current) const {
  const double floor_var = noise_density_a_rthz * noise_density_a_rthz * bandwidth_hz;
  const double shot_var =
      2.0 * kElectronCharge * gain * std::max(mean_current, 0.0) * bandwidth_hz;
  return std::sqrt(floor_var + shot_var);
}

double ApdModel::current_a(double optical_w, Rng* rng) const {
  double i = mean_current_a(optical_w);
  if (rng) i += rng->gaussian(0.0, noise_sigma_a(i));
  return std::clamp(i, 0.0, saturation_current_a);
}

DetectedFrame detect_frame(std::span<const JonesVector> field_at_rx,
                           const TapPbsChain& chain,
                           const std::array<ApdModel, 3>& apds, double dt_ns,
                           double t0_ns, Rng* rng) {
  DetectedFrame out;
  out.i90 = {TraceChannel::I90, t0_ns, dt_ns, {}};
  out.i0 = {TraceChannel::I0, t0_ns, dt_ns, {}};
  out.i45m = {TraceChannel::I45m, t0_ns, dt_ns, {}};
  out.i90.current_a.reserve(field_at_rx.size());
  out.i0.current_a.reserve(field_at_rx.size());
  out.i45m.current_a.reserve(field_at_rx.size());
  for (const auto& v : field_at_rx) {
    const AnalyzedPowers p = analyzed_powers(v, chain);
    out.i90.current_a.push_back(apds[0].current_a(p.p90_w, rng));
    out.i0.current_a.push_back(apds[1].current_a(p.p0_w, rng));
    out.i45m.current_a.push_back(apds[2].current_a(p.p45m_w, rng));
  }
  return out;
}

PhotocurrentTrace total_power_replica(const PhotocurrentTrace& i90,
                                      const PhotocurrentTrace& i0) {
  if (i90.size() != i0.size() ||
      i90.sample_interval_ns != i0.sample_interval_ns ||
      i90.t0_ns != i0.t0_ns)
    throw GridMismatch("total_power_replica: traces on different sampling grids");
  PhotocurrentTrace out{TraceChannel::Replica, i90.t0_ns,
                        i90.sample_interval_ns, {}};
  out.current_a.resize(i90.size());
  for (std::size_t k = 0; k < i90.size(); ++k)
    out.current_a[k] = i90.current_a[k] + i0.current_a[k];
  return out;
}

std::array<ApdModel, 3> autobias(std::array<ApdModel, 3> apds,
                                 const SlotSchedule& sched,
                                 double pilot_peak_dbm,
                                 const TapPbsChain& chain) {
  sched.validate();
  if (pilot_peak_dbm < -11.2 - 1e-9 || pilot_peak_dbm > 0.0 + 1e-9)
    throw PowerOutOfRange("autobias: pilot peak power outside -11.2 .. 0 dBm");
  const double peak_w = dbm_to_watts(pilot_peak_dbm);
  // Worst case routes the full tapped pilot power onto one diode; biasing to
  // 70% of saturation there keeps every SOP on-slot current below clipping.
  const std::array<double, 3> tap_fraction = {
      chain.tap1_ratio, chain.tap1_ratio,
      (1.0 - chain.tap1_ratio) * chain.tap2_ratio};
  for (std::size_t k = 0; k < apds.size(); ++k) {
    auto& apd = apds[k];
    const double incident = tap_fraction[k] * peak_w;
    apd.gain = kAutobiasHeadroom * apd.saturation_current_a /
               (apd.responsivity_a_w * incident);
  }
  return apds;
}

double mean_power_of_schedule(const SlotSchedule& sched,
                              double pilot_peak_dbm) {
  sched.validate();
  const double on = sched.pilot0_ns + sched.pilot45_ns;
  if (on <= 0.0) throw NoPilotPower("mean_power_of_schedule: zero-length pilot slots");
  return pilot_peak_dbm + 10.0 * std::log10(on / sched.period_ns);
}

}  // namespace polsim
