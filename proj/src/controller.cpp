#include "polsim/controller.hpp"

#include <algorithm>
#include <cmath>

#include "polsim/errors.hpp"

namespace polsim {

namespace {
constexpr std::size_t kZeroPointWindowFrames = 1000;
constexpr double kTiny = 1e-300;
// Escape kick for exact stationary points that are not minima: fires only
// when both polarization slopes are flat while the error is clearly high.
constexpr double kStuckRie0 = 0.01;
}  // namespace

JonesMatrix transformer_matrix(const ActuatorState& a) {
  const JonesMatrix qwp = waveplate_matrix({a.phi_a_rad, M_PI / 2.0});
  const JonesMatrix hwp = waveplate_matrix({a.phi_b_rad, M_PI});
  const JonesMatrix phase = waveplate_matrix({0.0, a.delta_c_rad});
  return phase * hwp * qwp;
}

void ControlConfig::validate() const {
  if (dither_rad <= 0.0) throw SimError("ControlConfig: dither_rad must be positive");
  if (dither_rad >= max_step_rad)
    throw SimError("ControlConfig: dither_rad must stay below max_step_rad");
  if (step_gain <= 0.0) throw SimError("ControlConfig: step_gain must be positive");
}

RieReference make_rie_reference(const TapPbsChain& chain,
                                const std::array<ApdModel, 3>& apds) {
  const double resp0 = apds[0].responsivity_a_w * apds[0].gain;
  const double resp1 = apds[1].responsivity_a_w * apds[1].gain;
  if (std::abs(resp0 - resp1) > 1e-9 * std::max(resp0, resp1))
    throw SimError("make_rie_reference: PBS-1 diodes must be calibrated identically");
  const double resp45 = apds[2].responsivity_a_w * apds[2].gain;
  RieReference ref;
  ref.ref45_scale = (1.0 - chain.tap1_ratio) * chain.tap2_ratio * resp45 /
                    (chain.tap1_ratio * resp0);
  return ref;
}

RiePair compute_rie(const GatedFrame& g, const RieReference& ref) {
  const double i90 = g.i90_slot - ref.zero_a[0];
  const double i0 = g.i0_slot - ref.zero_a[1];
  const double sum0 = i90 + i0;
  if (sum0 <= 0.0)
    throw ZeroReferencePower("compute_rie: no pilot light behind PBS 1");
  const double i45 = g.i45m_slot - ref.zero_a[2];
  const double ref45 =
      ref.ref45_scale *
      (g.i01_pilot45_slot - ref.zero_a[0] - ref.zero_a[1]);
  if (ref45 <= 0.0)
    throw ZeroReferencePower("compute_rie: no pilot light during the 45-deg slot");
  RiePair r;
  r.rie0 = std::clamp(i90 / sum0, 0.0, 1.0);
  r.rie45 = std::clamp(i45 / ref45, 0.0, 1.0);
  return r;
}

Controller::Controller(const ControlConfig& cfg, const RieReference& ref,
                       const ActuatorState& initial)
    : cfg_(cfg), ref_(ref), state_(initial) {
  cfg_.validate();
}

RieReference Controller::reference() const {
  RieReference ref = ref_;
  if (!dark_history_.empty()) {
    const double n = static_cast<double>(dark_history_.size());
    for (int c = 0; c < 3; ++c) ref.zero_a[c] = dark_sum_[c] / n;
  }
  return ref;
}

void Controller::update_zero_points(const std::array<double, 3>& dark) {
  dark_history_.push_back(dark);
  for (int c = 0; c < 3; ++c) dark_sum_[c] += dark[c];
  if (dark_history_.size() > kZeroPointWindowFrames) {
    for (int c = 0; c < 3; ++c) dark_sum_[c] -= dark_history_.front()[c];
    dark_history_.pop_front();
  }
}

double Controller::normalized_error0(double i90, double i0) const {
  const RieReference ref = reference();
  const double a = i90 - ref.zero_a[0];
  const double b = i0 - ref.zero_a[1];
  return a / std::max(a + b, kTiny);
}

double Controller::normalized_error45(double i45m, double i01) const {
  const RieReference ref = reference();
  const double num = i45m - ref.zero_a[2];
  const double den =
      ref.ref45_scale * (i01 - ref.zero_a[0] - ref.zero_a[1]);
  return num / std::max(den, kTiny);
}

void Controller::apply_update(double& dof, double slope) {
  if (std::abs(slope) < cfg_.slope_deadband) return;
  const double step = std::clamp(cfg_.step_gain * slope, -cfg_.max_step_rad,
                                 cfg_.max_step_rad);
  dof -= step;
}

DitherPlan Controller::plan(const SlotSchedule& sched) const {
  DitherPlan p;
  p.nominal = state_;
  const double d = cfg_.dither_rad;
  if (cfg_.scheme == DitherScheme::SubSlot) {
    const double s0 = sched.slot_start_ns(SlotId::Pilot0);
    const double q = sched.pilot0_ns / 4.0;
    ActuatorState s = state_;
    s.phi_a_rad = state_.phi_a_rad - d;
    p.segments.push_back({s0, s0 + q, s});
    s.phi_a_rad = state_.phi_a_rad + d;
    p.segments.push_back({s0 + q, s0 + 2 * q, s});
    s = state_;
    s.phi_b_rad = state_.phi_b_rad - d;
    p.segments.push_back({s0 + 2 * q, s0 + 3 * q, s});
    s.phi_b_rad = state_.phi_b_rad + d;
    p.segments.push_back({s0 + 3 * q, s0 + 4 * q, s});
    if (!cfg_.freeze_phase_dof) {
      const double s45 = sched.slot_start_ns(SlotId::Pilot45);
      const double h = sched.pilot45_ns / 2.0;
      s = state_;
      s.delta_c_rad = state_.delta_c_rad - d;
      p.segments.push_back({s45, s45 + h, s});
      s.delta_c_rad = state_.delta_c_rad + d;
      p.segments.push_back({s45 + h, s45 + 2 * h, s});
    }
  } else {
    // One DOF at a time, minus then plus on consecutive frames, dithered for
    // the whole frame.
    const int dof = seq_phase_ / 2;
    const double sign = (seq_phase_ % 2 == 0) ? -1.0 : 1.0;
    ActuatorState s = state_;
    if (dof == 0) s.phi_a_rad += sign * d;
    if (dof == 1) s.phi_b_rad += sign * d;
    if (dof == 2) s.delta_c_rad += sign * d;
    p.segments.push_back({0.0, sched.period_ns, s});
  }
  return p;
}

StepOutcome Controller::step(const GatedFrame& g) {
  if (g.clock_confidence < cfg_.min_clock_confidence) {
    // Hold the trajectory; never reset. Zero points also hold, since the
    // dark gate cannot be trusted without the clock.
    return StepOutcome::HeldClockLost;
  }
  update_zero_points(g.dark);
  const double two_d = 2.0 * cfg_.dither_rad;

  if (cfg_.scheme == DitherScheme::SubSlot) {
    const double e_a_minus = normalized_error0(g.i90_quarters[0], g.i0_quarters[0]);
    const double e_a_plus = normalized_error0(g.i90_quarters[1], g.i0_quarters[1]);
    const double e_b_minus = normalized_error0(g.i90_quarters[2], g.i0_quarters[2]);
    const double e_b_plus = normalized_error0(g.i90_quarters[3], g.i0_quarters[3]);
    const double slope_a = (e_a_plus - e_a_minus) / two_d;
    const double slope_b = (e_b_plus - e_b_minus) / two_d;
    apply_update(state_.phi_a_rad, slope_a);
    apply_update(state_.phi_b_rad, slope_b);
    if (!cfg_.freeze_phase_dof) {
      const double e_c_minus = normalized_error45(g.i45m_halves[0], g.i01_halves[0]);
      const double e_c_plus = normalized_error45(g.i45m_halves[1], g.i01_halves[1]);
      apply_update(state_.delta_c_rad, (e_c_plus - e_c_minus) / two_d);
    }
    const double rie0_now = normalized_error0(g.i90_slot, g.i0_slot);
    if (std::abs(slope_a) < cfg_.slope_deadband &&
        std::abs(slope_b) < cfg_.slope_deadband && rie0_now > kStuckRie0) {
      state_.phi_a_rad += 0.5 * cfg_.max_step_rad;
    }
  } else {
    const int dof = seq_phase_ / 2;
    const double err = (dof == 2)
                           ? normalized_error45(g.i45m_slot, g.i01_pilot45_slot)
                           : normalized_error0(g.i90_slot, g.i0_slot);
    if (seq_phase_ % 2 == 0) {
      seq_minus_error_ = err;
    } else {
      const double slope = (err - seq_minus_error_) / two_d;
      if (dof == 0) apply_update(state_.phi_a_rad, slope);
      if (dof == 1) apply_update(state_.phi_b_rad, slope);
      if (dof == 2) apply_update(state_.delta_c_rad, slope);
    }
    const int phases = cfg_.freeze_phase_dof ? 4 : 6;
    seq_phase_ = (seq_phase_ + 1) % phases;
  }

  last_rie_ = compute_rie(g, reference());
  return StepOutcome::Updated;
}

}  // namespace polsim
