#include "polsim/engine.hpp"

#include <algorithm>
#include <cmath>

#include "polsim/errors.hpp"

namespace polsim {

namespace {

// Contributions this far below a source's peak sit several orders under the
// APD noise floor and are skipped.
constexpr double kEnvelopeCutoff = 1e-7;
// Head fraction of the dark slot excluded from the zero-point gate so the
// probe gate tail has decayed.
constexpr double kDarkGateFraction = 0.6;

double wrap_into_period(double t_ns, double period_ns) {
  double r = std::fmod(t_ns, period_ns);
  if (r < 0.0) r += period_ns;
  return r;
}

struct MeanAccum {
  double sum{0.0};
  long n{0};
  void add(double v) {
    sum += v;
    ++n;
  }
  double mean() const { return n ? sum / n : 0.0; }
};

double fast_analyzer_power(const JonesVector& axis_jones, const JonesVector& v) {
  const Complex amp =
      std::conj(axis_jones.ex) * v.ex + std::conj(axis_jones.ey) * v.ey;
  return std::norm(amp);
}

}  // namespace

FrameSimulator::FrameSimulator(const PlantConfig& cfg) : cfg_(cfg) {
  cfg_.schedule.validate();
  cfg_.link.validate();
  // In-pulse chirp excursions are normalized to the actual gate lengths.
  cfg_.sources.pilot0.chirp.pulse_ns = cfg_.schedule.pilot0_ns;
  cfg_.sources.pilot45.chirp.pulse_ns = cfg_.schedule.pilot45_ns;
  if (!cfg_.sources.probe.always_on)
    cfg_.sources.probe.chirp.pulse_ns = cfg_.schedule.probe_ns;
  source_jones_[0] = stokes_to_jones(cfg_.sources.pilot0.polarization.normalized());
  source_jones_[1] = stokes_to_jones(cfg_.sources.pilot45.polarization.normalized());
  source_jones_[2] = stokes_to_jones(cfg_.sources.probe.polarization.normalized());
}

void FrameSimulator::set_probe_sop(const StokesVector& sop) {
  cfg_.sources.probe.polarization = sop;
  source_jones_[2] = stokes_to_jones(sop.normalized());
}

FrameResult FrameSimulator::simulate_frame(long frame_index,
                                           double frame_start_ns,
                                           const DitherPlan& plan,
                                           const FrameOptions& opt) {
  const SlotSchedule& sched = cfg_.schedule;
  const double period = sched.period_ns;
  const double dt = cfg_.dt_ns;
  const auto n_samples = static_cast<long>(std::llround(period / dt));

  // Per-segment transformer matrices; nominal in the gaps.
  const JonesMatrix nominal_m = transformer_matrix(plan.nominal);
  std::vector<JonesMatrix> segment_m;
  segment_m.reserve(plan.segments.size());
  for (const auto& seg : plan.segments)
    segment_m.push_back(transformer_matrix(seg.state));

  // Analyzer Jones representatives, and per-channel tap scaling.
  const TapPbsChain& chain = cfg_.receiver.chain;
  const JonesVector a90 = stokes_to_jones(chain.pbs1_error_axis.normalized());
  const JonesVector a0 = stokes_to_jones(chain.pbs1_pass_axis.normalized());
  const JonesVector a45 = stokes_to_jones(chain.pbs2_error_axis.normalized());
  const double tap2_frac = (1.0 - chain.tap1_ratio) * chain.tap2_ratio;

  const ChirpedSource* sources[3] = {&cfg_.sources.pilot0, &cfg_.sources.pilot45,
                                     &cfg_.sources.probe};
  const SlotId source_slot[3] = {SlotId::Pilot0, SlotId::Pilot45, SlotId::Probe};
  double source_peak_w[3];
  double source_on_ns[3];
  for (int s = 0; s < 3; ++s) {
    source_peak_w[s] = sources[s]->peak_watts();
    source_on_ns[s] = sched.slot_len_ns(source_slot[s]);
  }

  // Slot geometry for gating, frame-relative.
  const double s0 = sched.slot_start_ns(SlotId::Pilot0);
  const double len0 = sched.pilot0_ns;
  const double quarter = len0 / 4.0;
  const double s45 = sched.slot_start_ns(SlotId::Pilot45);
  const double len45 = sched.pilot45_ns;
  const double half = len45 / 2.0;
  const double sp = sched.slot_start_ns(SlotId::Probe);
  const double sd = sched.slot_start_ns(SlotId::Dark);
  const double dark_gate_start = sd + kDarkGateFraction * sched.dark_ns;
  const double guard = opt.gate_guard_ns;

  MeanAccum q90[4], q0[4], h45[2], h01[2], dark[3];

  FrameResult out;
  out.gated.frame_index = frame_index;
  if (opt.collect_traces) {
    out.traces.i90 = {TraceChannel::I90, frame_start_ns, dt, {}};
    out.traces.i0 = {TraceChannel::I0, frame_start_ns, dt, {}};
    out.traces.i45m = {TraceChannel::I45m, frame_start_ns, dt, {}};
    out.traces.i90.current_a.reserve(n_samples);
    out.traces.i0.current_a.reserve(n_samples);
    out.traces.i45m.current_a.reserve(n_samples);
  }

  const long pol_stride = std::max<long>(
      1, std::llround(1e9 / (cfg_.polarimeter_rate_hz * dt)));
  long probe_sample_count = 0;

  std::size_t seg_idx = 0;

  for (long k = 0; k < n_samples; ++k) {
    const double t_rel = (k + 0.5) * dt;
    const double t_abs = frame_start_ns + t_rel;

    while (seg_idx < plan.segments.size() &&
           t_rel >= plan.segments[seg_idx].end_ns)
      ++seg_idx;
    const bool in_seg = seg_idx < plan.segments.size() &&
                        t_rel >= plan.segments[seg_idx].start_ns;
    const JonesMatrix& transformer = in_seg ? segment_m[seg_idx] : nominal_m;

    const double link_t_s =
        link_time_override_ ? *link_time_override_ : t_abs * 1e-9;

    AnalyzedPowers p;
    bool probe_active = false;
    JonesVector probe_out;
    for (int s = 0; s < 3; ++s) {
      if (s == 2 && !cfg_.sources.probe_enabled) continue;
      const ChirpedSource& src = *sources[s];
      double env = 1.0;
      double u = 0.0;
      if (!(s == 2 && src.always_on)) {
        u = wrap_into_period(t_abs - cfg_.tx_offset_ns -
                                 sched.slot_start_ns(source_slot[s]),
                             period);
        env = cfg_.gate.value(u, source_on_ns[s]);
        if (env < kEnvelopeCutoff) continue;
      }
      const double nu = src.frequency_offset_at(std::min(u, source_on_ns[s]));
      const JonesMatrix link_m = cfg_.link.matrix_at(link_t_s, nu);
      const double amp = std::sqrt(source_peak_w[s] * env);
      JonesVector v{source_jones_[s].ex * amp, source_jones_[s].ey * amp};
      v = link_m * v;
      v = transformer * v;
      p.p90_w += chain.tap1_ratio * fast_analyzer_power(a90, v);
      p.p0_w += chain.tap1_ratio * fast_analyzer_power(a0, v);
      p.p45m_w += tap2_frac * fast_analyzer_power(a45, v);
      if (s == 2) {
        probe_active = true;
        probe_out = v;
      }
    }

    // Which slot this sample belongs to under the receiver's alignment.
    SlotId slot = SlotId::Dark;
    if (t_rel < s45)
      slot = SlotId::Pilot0;
    else if (t_rel < sp)
      slot = SlotId::Pilot45;
    else if (t_rel < sd)
      slot = SlotId::Probe;

    if (opt.perturbation &&
        (slot == SlotId::Probe || slot == SlotId::Dark))
      (*opt.perturbation)(slot, t_rel, p);

    const auto& apds = cfg_.receiver.apds;
    const double i90 = apds[0].current_a(p.p90_w, opt.noise_rng);
    const double i0 = apds[1].current_a(p.p0_w, opt.noise_rng);
    const double i45m = apds[2].current_a(p.p45m_w, opt.noise_rng);

    switch (slot) {
      case SlotId::Pilot0: {
        const int qi = std::min(3, static_cast<int>((t_rel - s0) / quarter));
        if (t_rel - s0 - qi * quarter >= guard) {
          q90[qi].add(i90);
          q0[qi].add(i0);
        }
        break;
      }
      case SlotId::Pilot45: {
        const int hi = (t_rel - s45 >= half) ? 1 : 0;
        if (t_rel - s45 - hi * half >= guard) {
          h45[hi].add(i45m);
          h01[hi].add(i90 + i0);
        }
        break;
      }
      case SlotId::Probe:
        if (opt.collect_polarimeter && probe_active) {
          if (probe_sample_count % pol_stride == 0) {
            const StokesVector st = jones_to_stokes(probe_out).normalized();
            out.probe_sop.push_back({st.s1, st.s2, st.s3});
          }
          ++probe_sample_count;
        }
        break;
      case SlotId::Dark:
        if (t_rel >= dark_gate_start) {
          dark[0].add(i90);
          dark[1].add(i0);
          dark[2].add(i45m);
        }
        break;
    }

    if (opt.collect_traces) {
      out.traces.i90.current_a.push_back(i90);
      out.traces.i0.current_a.push_back(i0);
      out.traces.i45m.current_a.push_back(i45m);
    }
  }

  GatedFrame& g = out.gated;
  double slot_sum90 = 0.0, slot_sum0 = 0.0;
  long slot_n = 0;
  for (int q = 0; q < 4; ++q) {
    g.i90_quarters[q] = q90[q].mean();
    g.i0_quarters[q] = q0[q].mean();
    slot_sum90 += q90[q].sum;
    slot_sum0 += q0[q].sum;
    slot_n += q90[q].n;
  }
  g.i90_slot = slot_n ? slot_sum90 / slot_n : 0.0;
  g.i0_slot = slot_n ? slot_sum0 / slot_n : 0.0;
  double slot_sum45 = 0.0, slot_sum01 = 0.0;
  long slot45_n = 0;
  for (int h = 0; h < 2; ++h) {
    g.i45m_halves[h] = h45[h].mean();
    g.i01_halves[h] = h01[h].mean();
    slot_sum45 += h45[h].sum;
    slot_sum01 += h01[h].sum;
    slot45_n += h45[h].n;
  }
  g.i45m_slot = slot45_n ? slot_sum45 / slot45_n : 0.0;
  g.i01_pilot45_slot = slot45_n ? slot_sum01 / slot45_n : 0.0;
  for (int c = 0; c < 3; ++c) g.dark[c] = dark[c].mean();
  g.clock_confidence = 1.0;
  return out;
}

ControlLoop::ControlLoop(const PlantConfig& plant, const ControlConfig& control,
                         std::uint64_t seed)
    : sim_(plant),
      control_cfg_(control),
      controller_(control,
                  make_rie_reference(plant.receiver.chain, plant.receiver.apds)),
      rng_(seed) {}

void ControlLoop::acquire() {
  const SlotSchedule& sched = sim_.config().schedule;
  const double period = sched.period_ns;
  const DitherPlan idle{controller_.state(), {}};

  PhotocurrentTrace replica{TraceChannel::Replica, 0.0,
                            sim_.config().dt_ns, {}};
  for (int f = 0; f < 2; ++f) {
    FrameOptions opt;
    Rng frame_rng = rng_.child(frame_counter_);
    opt.noise_rng = sim_.config().receiver.noise_enabled ? &frame_rng : nullptr;
    opt.collect_traces = true;
    opt.gate_guard_ns = control_cfg_.gate_guard_ns;
    FrameResult res =
        sim_.simulate_frame(frame_counter_, frame_counter_ * period, idle, opt);
    const PhotocurrentTrace sum =
        total_power_replica(res.traces.i90, res.traces.i0);
    replica.current_a.insert(replica.current_a.end(), sum.current_a.begin(),
                             sum.current_a.end());
    ++frame_counter_;
  }
  phase_ = recover_clock(replica, sched);
  locked_ = true;
}

void ControlLoop::relock() { locked_ = false; }

void ControlLoop::run(long frames) {
  if (!locked_) acquire();
  const SlotSchedule& sched = sim_.config().schedule;
  const double period = sched.period_ns;
  for (long i = 0; i < frames; ++i) {
    const DitherPlan plan = controller_.plan(sched);
    FrameOptions opt;
    Rng frame_rng = rng_.child(frame_counter_);
    opt.noise_rng = sim_.config().receiver.noise_enabled ? &frame_rng : nullptr;
    opt.collect_polarimeter = sim_.config().polarimeter_enabled;
    opt.gate_guard_ns = control_cfg_.gate_guard_ns;
    opt.perturbation = perturb_ ? &perturb_ : nullptr;
    FrameResult res = sim_.simulate_frame(
        frame_counter_, frame_counter_ * period + phase_.offset_ns, plan, opt);
    res.gated.clock_confidence = phase_.confidence;
    const StepOutcome outcome = controller_.step(res.gated);
    const RiePair rie = controller_.last_rie();
    log_.push_back({frame_counter_, controller_.state(), rie.rie0, rie.rie45,
                    phase_.confidence, outcome});
    if (!res.probe_sop.empty())
      probe_samples_.insert(probe_samples_.end(), res.probe_sop.begin(),
                            res.probe_sop.end());
    ++frame_counter_;
    ++controlled_frames_;
  }
}

ConvergeResult converge(const ActuatorState& initial, const StaticPlant& plant,
                        const ControlConfig& cfg, int max_iters,
                        const ConvergeCriteria& crit) {
  PlantConfig pc = plant.plant;
  pc.receiver.noise_enabled = false;
  pc.polarimeter_enabled = false;
  FrameSimulator sim(pc);
  sim.set_link_time_override(plant.frozen_time_s);
  const RieReference base =
      make_rie_reference(pc.receiver.chain, pc.receiver.apds);
  Controller ctl(cfg, base, initial);
  const SlotSchedule& sched = pc.schedule;
  const double period = sched.period_ns;
  FrameOptions opt;
  opt.gate_guard_ns = cfg.gate_guard_ns;

  ConvergeResult r;
  r.state = initial;
  for (int it = 0;; ++it) {
    const double start = it * period + pc.tx_offset_ns;
    const DitherPlan nominal{ctl.state(), {}};
    const FrameResult probe = sim.simulate_frame(it, start, nominal, opt);
    RieReference ref = base;
    ref.zero_a = probe.gated.dark;
    const RiePair rie = compute_rie(probe.gated, ref);
    r.history.push_back(rie);
    r.final_rie = rie;
    r.state = ctl.state();
    r.iterations = it;
    if (rie.rie0 <= crit.rie0_max && rie.rie45 <= crit.rie45_max) {
      r.converged = true;
      return r;
    }
    if (it >= max_iters) return r;  // MaxItersExceeded; final RIEs reported
    const DitherPlan plan = ctl.plan(sched);
    FrameResult meas = sim.simulate_frame(it, start, plan, opt);
    meas.gated.clock_confidence = 1.0;
    ctl.step(meas.gated);
  }
}

}  // namespace polsim
