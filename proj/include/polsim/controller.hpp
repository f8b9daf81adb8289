#pragma once
#include <array>
#include <deque>
#include <vector>

#include "polsim/detection.hpp"
#include "polsim/jones.hpp"
#include "polsim/tdm.hpp"

namespace polsim {

/// The controller's three degrees of freedom: orientations of a quarter-wave
/// and a half-wave plate plus the retardation of a 0-degree-oriented variable
/// retarder (the differential-phase stage). All raw, unbounded reals; a
/// control step only ever moves them by bounded increments, which is the
/// representational basis of endless control.
struct ActuatorState {
  double phi_a_rad{0.0};
  double phi_b_rad{0.0};
  double delta_c_rad{0.0};
};

/// Receiver polarization transformer: QWP(phi_a) then HWP(phi_b) then the
/// endless phase stage at 0 degrees.
JonesMatrix transformer_matrix(const ActuatorState& a);

enum class DitherScheme {
  SubSlot,          // +- dither inside each pilot slot, all DOFs every frame
  FrameSequential,  // x-dither, x+dither on consecutive frames, one DOF at a time
};

struct ControlConfig {
  double dither_rad{0.05};
  double step_gain{0.5};
  double max_step_rad{0.15};
  double slope_deadband{0.0};        // |slope| below this holds the DOF
  double min_clock_confidence{0.5};  // below: ClockLost, hold everything
  double gate_guard_ns{10.0};        // skipped at the head of each gated window
  bool freeze_phase_dof{false};      // conventional 2-DOF polarization control
  DitherScheme scheme{DitherScheme::SubSlot};

  void validate() const;
};

/// Mean photocurrent over one gated interval, zero-point corrected by the
/// consumer. Small negative values are expected after correction.
struct ErrorSample {
  SlotId slot{SlotId::Pilot0};
  double value_a{0.0};
};

/// Gated slot means of one received frame, raw currents in A.
struct GatedFrame {
  long frame_index{0};
  std::array<double, 4> i90_quarters{};  // Pilot0 slot quarters
  std::array<double, 4> i0_quarters{};
  std::array<double, 2> i45m_halves{};   // Pilot45 slot halves
  std::array<double, 2> i01_halves{};    // i90 + i0 during the same halves
  double i90_slot{0.0};                  // whole Pilot0 slot
  double i0_slot{0.0};
  double i45m_slot{0.0};                 // whole Pilot45 slot
  double i01_pilot45_slot{0.0};
  std::array<double, 3> dark{};          // dark-slot means: i90, i0, i45m
  double clock_confidence{1.0};
};

/// Calibration context for turning gated currents into relative intensity
/// errors: per-channel zero points plus the chain/gain factor that converts
/// a PBS-1 current sum into the -45 port current a fully mis-phased 45
/// pilot would produce.
struct RieReference {
  std::array<double, 3> zero_a{0.0, 0.0, 0.0};
  double ref45_scale{1.0};
};

RieReference make_rie_reference(const TapPbsChain& chain,
                                const std::array<ApdModel, 3>& apds);

struct RiePair {
  double rie0{0.0};
  double rie45{0.0};
};

/// RIE_0 = I90/(I90+I0) over the Pilot0 slot, RIE_45 = I45m over the tap-2
/// total-power equivalent during the Pilot45 slot; zero-point corrected,
/// clamped to [0, 1]. Throws ZeroReferencePower when no reference light is
/// present.
RiePair compute_rie(const GatedFrame& g, const RieReference& ref);

/// One actuator setting held over a frame-relative interval.
struct DitherSegment {
  double start_ns{0.0};
  double end_ns{0.0};
  ActuatorState state{};
};

struct DitherPlan {
  ActuatorState nominal{};
  std::vector<DitherSegment> segments;  // outside segments the nominal holds
};

enum class StepOutcome { Updated, HeldClockLost };

/// Slot-gated dither-gradient controller. Strictly sequential: plan() for a
/// frame, then step() with that frame's gated means. Dark- and probe-slot
/// samples never influence the actuator trajectory.
class Controller {
 public:
  Controller(const ControlConfig& cfg, const RieReference& ref,
             const ActuatorState& initial = {});

  DitherPlan plan(const SlotSchedule& sched) const;
  StepOutcome step(const GatedFrame& g);

  const ActuatorState& state() const { return state_; }
  void set_state(const ActuatorState& s) { state_ = s; }
  RiePair last_rie() const { return last_rie_; }
  /// Reference with the current rolling zero-point estimate filled in.
  RieReference reference() const;

 private:
  void update_zero_points(const std::array<double, 3>& dark);
  void apply_update(double& dof, double slope);
  double normalized_error0(double i90, double i0) const;
  double normalized_error45(double i45m, double i01) const;

  ControlConfig cfg_;
  RieReference ref_;
  ActuatorState state_;
  RiePair last_rie_{};

  std::deque<std::array<double, 3>> dark_history_;
  std::array<double, 3> dark_sum_{0.0, 0.0, 0.0};

  // FrameSequential bookkeeping: which (dof, sign) the upcoming frame probes.
  int seq_phase_{0};
  double seq_minus_error_{0.0};
};

struct ConvergeCriteria {
  double rie0_max{1e-4};
  double rie45_max{1e-3};
};

}  // namespace polsim
