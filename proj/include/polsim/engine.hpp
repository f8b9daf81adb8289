#pragma once
#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "polsim/channel.hpp"
#include "polsim/controller.hpp"
#include "polsim/detection.hpp"
#include "polsim/rng.hpp"
#include "polsim/tdm.hpp"

namespace polsim {

/// The three gated transmitters. Pilot SOPs default to 0 and 45 degrees;
/// the probe SOP is scenario-controlled.
struct SourceBank {
  ChirpedSource pilot0{193.4e12, 0.0, {1.0, 1.0, 0.0, 0.0}};
  ChirpedSource pilot45{193.4e12, 0.0, {1.0, 0.0, 1.0, 0.0}};
  ChirpedSource probe{193.4e12, -25.0, {1.0, 1.0, 0.0, 0.0}};
  bool probe_enabled{true};
};

struct ReceiverModel {
  TapPbsChain chain{};
  std::array<ApdModel, 3> apds{};
  bool noise_enabled{true};
};

/// Everything the discrete-time plant needs: TDM layout, gate shapes,
/// sources, optical link and the receive chain.
struct PlantConfig {
  SlotSchedule schedule{};
  GateEnvelope gate{};
  SourceBank sources{};
  LinkModel link{};
  ReceiverModel receiver{};
  double dt_ns{1.0};
  double tx_offset_ns{0.0};
  bool polarimeter_enabled{false};
  double polarimeter_rate_hz{100e6};
};

/// Test hook: lets a caller rewrite the analyzed optical powers of samples
/// falling in the Probe or Dark slots. Control gating must be insensitive to
/// anything it does.
using PowerPerturbation =
    std::function<void(SlotId slot, double frame_rel_ns, AnalyzedPowers&)>;

struct FrameResult {
  GatedFrame gated{};
  DetectedFrame traces{};  // filled only when requested
  std::vector<std::array<double, 3>> probe_sop;
};

struct FrameOptions {
  Rng* noise_rng{nullptr};  // null: noiseless detection
  bool collect_traces{false};
  bool collect_polarimeter{false};
  double gate_guard_ns{10.0};
  const PowerPerturbation* perturbation{nullptr};
};

/// Simulates one RX-aligned frame window: transmit gating and chirp, link
/// propagation at the per-sample optical frequency, the receiver transformer
/// held piecewise at the dither-plan settings, detection, and slot gating.
class FrameSimulator {
 public:
  explicit FrameSimulator(const PlantConfig& cfg);

  FrameResult simulate_frame(long frame_index, double frame_start_ns,
                             const DitherPlan& plan, const FrameOptions& opt);

  void set_probe_sop(const StokesVector& sop);
  /// Freezes the link's time argument (static-plant evaluation).
  void set_link_time_override(std::optional<double> t_s) { link_time_override_ = t_s; }

  const PlantConfig& config() const { return cfg_; }

 private:
  PlantConfig cfg_;
  std::array<JonesVector, 3> source_jones_;  // unit-power SOP representatives
  std::optional<double> link_time_override_;
};

struct LoopRecord {
  long frame_index{0};
  ActuatorState state{};
  double rie0{0.0};
  double rie45{0.0};
  double clock_confidence{0.0};
  StepOutcome outcome{StepOutcome::Updated};
};

/// Closed control loop: clock acquisition from the total-power replica on
/// two idle frames, then one controller step per frame, flywheel timing in
/// between (the simulated clocks do not drift; re-lock stays available to
/// callers via relock()).
class ControlLoop {
 public:
  ControlLoop(const PlantConfig& plant, const ControlConfig& control,
              std::uint64_t seed);

  void run(long frames);
  void relock();

  void set_perturbation(PowerPerturbation p) { perturb_ = std::move(p); }
  void set_probe_sop(const StokesVector& sop) { sim_.set_probe_sop(sop); }

  const std::vector<LoopRecord>& log() const { return log_; }
  std::vector<std::array<double, 3>>& probe_samples() { return probe_samples_; }
  const FramePhase& phase() const { return phase_; }
  Controller& controller() { return controller_; }
  FrameSimulator& simulator() { return sim_; }
  long frames_run() const { return controlled_frames_; }

 private:
  void acquire();

  FrameSimulator sim_;
  ControlConfig control_cfg_;
  Controller controller_;
  Rng rng_;
  FramePhase phase_{};
  bool locked_{false};
  long frame_counter_{0};
  long controlled_frames_{0};
  std::vector<LoopRecord> log_;
  std::vector<std::array<double, 3>> probe_samples_;
  PowerPerturbation perturb_;
};

/// Static channel + detection, evaluated noiselessly with the link frozen at
/// one instant. What converge() descends on.
struct StaticPlant {
  PlantConfig plant{};
  double frozen_time_s{0.0};
};

struct ConvergeResult {
  ActuatorState state{};
  std::vector<RiePair> history;  // nominal-state RIE per iteration
  bool converged{false};
  int iterations{0};
  RiePair final_rie{};
};

/// Runs the dither controller on a static plant until the nominal-state
/// errors reach the criteria (defaults: RIE_0 <= 1e-4, RIE_45 <= 1e-3), or
/// max_iters frames pass.
ConvergeResult converge(const ActuatorState& initial, const StaticPlant& plant,
                        const ControlConfig& cfg, int max_iters,
                        const ConvergeCriteria& crit = {});

}  // namespace polsim
