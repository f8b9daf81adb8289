#pragma once
#include "polsim/trace.hpp"

namespace polsim {

enum class SlotId { Pilot0, Pilot45, Probe, Dark };

/// TDM frame layout, fixed ordering Pilot0 -> Pilot45 -> Probe -> Dark with
/// half-open slot windows. Durations in ns.
struct SlotSchedule {
  double pilot0_ns{600.0};
  double pilot45_ns{600.0};
  double probe_ns{560.0};
  double dark_ns{40.0};
  double period_ns{1800.0};

  void validate() const;  // slots must tile the period; dark >= 40 ns
  double slot_start_ns(SlotId id) const;
  double slot_len_ns(SlotId id) const;
};

/// Turn-on/turn-off shape of a directly modulated laser gate. After the gate
/// closes the power falls to `fall_initial_level` within `fall_initial_ns`,
/// then decays exponentially with `tail_time_constant_ns`, clamped at the
/// extinction floor.
struct GateEnvelope {
  double rise_ns{5.0};
  double fall_initial_ns{10.0};
  double fall_initial_level{0.005};
  double tail_time_constant_ns{2.0};
  double off_floor_db{-80.0};

  /// Relative power in [floor, 1] at `t_rel_ns` past turn-on for a gate held
  /// open `on_len_ns`. Values before turn-on sit at the floor.
  double value(double t_rel_ns, double on_len_ns) const;
  /// Same without the extinction-floor clamp (tail analysis).
  double value_unclamped(double t_rel_ns, double on_len_ns) const;
  double floor() const;
};

/// Receiver's recovered alignment to the TDM frame.
struct FramePhase {
  double offset_ns{0.0};   // in [0, period)
  double confidence{0.0};  // dark/on contrast, in [0, 1]
};

double gate_envelope(const GateEnvelope& env, double slot_relative_ns,
                     double slot_len_ns);

SlotId slot_at(const SlotSchedule& sched, const FramePhase& phase, double t_ns);

/// Recovers the frame phase from the total-power replica: sliding
/// minimum-energy window of width dark_ns over one period, refined by the
/// falling-edge midpoint ahead of the dark window. Requires >= 2 periods of
/// trace and a sample interval <= dark_ns / 4. Throws NoDarkWindowFound when
/// the quietest window still holds more than half the mean power.
FramePhase recover_clock(const PhotocurrentTrace& total_power,
                         const SlotSchedule& sched);

}  // namespace polsim
