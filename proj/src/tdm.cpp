#include "polsim/tdm.hpp"

#include <algorithm>
#include <cmath>

#include "polsim/errors.hpp"

namespace polsim {

void SlotSchedule::validate() const {
  if (pilot0_ns < 0 || pilot45_ns < 0 || probe_ns < 0)
    throw SimError("SlotSchedule: negative slot length");
  const double sum = pilot0_ns + pilot45_ns + probe_ns + dark_ns;
  if (std::abs(sum - period_ns) > 1e-9)
    throw SimError("SlotSchedule: slots do not tile the period");
  if (dark_ns < 40.0)
    throw SimError("SlotSchedule: clock recovery needs a dark interval of at least 40 ns");
}

double SlotSchedule::slot_start_ns(SlotId id) const {
  switch (id) {
    case SlotId::Pilot0: return 0.0;
    case SlotId::Pilot45: return pilot0_ns;
    case SlotId::Probe: return pilot0_ns + pilot45_ns;
    case SlotId::Dark: return pilot0_ns + pilot45_ns + probe_ns;
  }
  return 0.0;
}

double SlotSchedule::slot_len_ns(SlotId id) const {
  switch (id) {
    case SlotId::Pilot0: return pilot0_ns;
    case SlotId::Pilot45: return pilot45_ns;
    case SlotId::Probe: return probe_ns;
    case SlotId::Dark: return dark_ns;
  }
  return 0.0;
}

double GateEnvelope::floor() const { return std::pow(10.0, off_floor_db / 10.0); }

double GateEnvelope::value_unclamped(double t, double on_len_ns) const {
  if (t < 0.0) return floor();
  if (t < rise_ns) return t / rise_ns;
  if (t <= on_len_ns) return 1.0;
  const double u = t - on_len_ns;
  if (u <= fall_initial_ns) {
    // structured fall down to fall_initial_level, exponential in shape
    return std::exp(std::log(fall_initial_level) * u / fall_initial_ns);
  }
  return fall_initial_level * std::exp(-(u - fall_initial_ns) / tail_time_constant_ns);
}

double GateEnvelope::value(double t, double on_len_ns) const {
  return std::clamp(value_unclamped(t, on_len_ns), floor(), 1.0);
}

double gate_envelope(const GateEnvelope& env, double slot_relative_ns,
                     double slot_len_ns) {
  return env.value(slot_relative_ns, slot_len_ns);
}

SlotId slot_at(const SlotSchedule& sched, const FramePhase& phase, double t_ns) {
  double rel = std::fmod(t_ns - phase.offset_ns, sched.period_ns);
  if (rel < 0.0) rel += sched.period_ns;
  if (rel < sched.pilot0_ns) return SlotId::Pilot0;
  if (rel < sched.pilot0_ns + sched.pilot45_ns) return SlotId::Pilot45;
  if (rel < sched.pilot0_ns + sched.pilot45_ns + sched.probe_ns)
    return SlotId::Probe;
  return SlotId::Dark;
}

FramePhase recover_clock(const PhotocurrentTrace& trace,
                         const SlotSchedule& sched) {
  const double dt = trace.sample_interval_ns;
  if (dt > sched.dark_ns / 4.0)
    throw SimError("recover_clock: sample interval coarser than dark_ns / 4");
  const auto np = static_cast<std::size_t>(std::llround(sched.period_ns / dt));
  if (trace.size() < 2 * np)
    throw SimError("recover_clock: need at least two periods of trace");
  const auto w = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(sched.dark_ns / dt)));

  // Sliding-window mean over one period of candidate starts.
  const auto& x = trace.current_a;
  double win = 0.0;
  for (std::size_t k = 0; k < w; ++k) win += x[k];
  double best = win;
  std::size_t best_s = 0;
  for (std::size_t s = 1; s < np; ++s) {
    win += x[s + w - 1] - x[s - 1];
    if (win < best) {
      best = win;
      best_s = s;
    }
  }
  const double dark_level = best / w;

  double total = 0.0;
  for (std::size_t k = 0; k < 2 * np; ++k) total += x[k];
  const double mean_level = total / (2.0 * np);
  if (!(dark_level <= 0.5 * mean_level))
    throw NoDarkWindowFound("recover_clock: no low-light window below half the mean power");

  // Falling-edge midpoint refinement just ahead of the dark window. The
  // window one period later is used when the minimum sits at the trace head.
  std::size_t s = best_s;
  const std::size_t lookback = std::max<std::size_t>(4, w / 2);
  if (s < lookback + 4) s += np;
  double on_ref = 0.0;
  for (std::size_t k = s - lookback - 2; k < s - 2; ++k) on_ref += x[k];
  on_ref /= lookback;
  double edge_time = s * dt;
  if (on_ref > dark_level) {
    const double level = 0.5 * (on_ref + dark_level);
    const std::size_t lo = s - 3;
    const std::size_t hi = std::min(s + 3, trace.size() - 2);
    for (std::size_t j = lo; j <= hi; ++j) {
      if (x[j] >= level && x[j + 1] < level) {
        const double frac = (x[j] - level) / (x[j] - x[j + 1]);
        edge_time = (j + frac) * dt;
        break;
      }
    }
  }

  const double dark_start_sched = sched.slot_start_ns(SlotId::Dark);
  double offset = std::fmod(trace.t0_ns + edge_time - dark_start_sched,
                            sched.period_ns);
  if (offset < 0.0) offset += sched.period_ns;

  FramePhase phase;
  phase.offset_ns = offset;
  phase.confidence =
      std::clamp(1.0 - dark_level / std::max(mean_level, 1e-300), 0.0, 1.0);
  return phase;
}

}  // namespace polsim
