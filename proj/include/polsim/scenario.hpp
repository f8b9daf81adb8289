#pragma once
#include <array>
#include <map>
#include <string>
#include <vector>

#include "polsim/engine.hpp"
#include "polsim/metrics.hpp"

namespace polsim {

/// One simulation scenario, bijective with the flat key-value scenario file.
/// Identical (config, seed) pairs produce byte-identical artifacts.
struct ScenarioConfig {
  // [run]
  double duration_ms{50.0};
  double dt_ns{1.0};
  std::uint64_t seed{1};
  long warmup_frames{500};
  std::vector<std::string> outputs{"log", "rie", "ccdf", "summary"};

  // [schedule]
  SlotSchedule schedule{};
  double tx_offset_ns{0.0};

  // [gate]
  GateEnvelope gate{};

  // [pilot] (both pilots share peak power and chirp)
  double pilot_peak_dbm{-2.0};
  double chirp_span_mhz{700.0};
  double chirp_settle_ns{150.0};

  // [probe]
  bool probe_enabled{true};
  bool probe_always_on{false};
  double probe_peak_dbm{-25.0};
  std::array<double, 3> probe_sop{1.0, 0.0, 0.0};
  std::string probe_sequence{};  // "" or "axes6"
  double probe_segment_s{0.005};

  // [link]
  double scrambler1_rate_rad_s{20000.0};
  double scrambler2_rate_rad_s{100.0};
  double dgd_ps{35.0};
  std::array<double, 3> psp{0.36, 0.48, 0.80};
  double loss_db{3.0};

  // [receiver]
  TapPbsChain chain{};
  bool autobias_enabled{true};
  bool noise_enabled{true};

  // [control]
  ControlConfig control{};

  // [polarimeter]
  bool polarimeter_enabled{false};
  double polarimeter_msps{100.0};

  void validate() const;
  PlantConfig to_plant() const;
  long frames() const;
};

ScenarioConfig default_scenario();
ScenarioConfig parse_scenario_file(const std::string& path);
std::string serialize_scenario(const ScenarioConfig& cfg);

struct RunArtifacts {
  std::vector<double> rie0;   // measured frames (after warmup)
  std::vector<double> rie45;
  std::vector<LoopRecord> log;  // all controlled frames including warmup
  long measured_offset{0};      // index of first measured frame in `log`
  std::map<std::string, std::vector<std::array<double, 3>>> spot_samples;
  SummaryStats stats0{};
  SummaryStats stats45{};
  std::vector<std::string> files_written;
};

/// Runs one scenario; when `out_dir` is nonempty, writes the selected CSV
/// artifacts there. Deterministic under (config, seed).
RunArtifacts run_scenario(const ScenarioConfig& cfg, const std::string& out_dir);

struct SweepRow {
  std::string axis;
  double value{0.0};
  std::uint64_t seed{0};
  long frames{0};
  SummaryStats rie0{};
  SummaryStats rie45{};
  bool ok{false};
  std::string error;
};

/// One run per grid value with derived seeds; per-run failures are recorded
/// and the sweep continues. Valid axes: "scrambling_rate" (rad/s), "dgd" (ps).
std::vector<SweepRow> sweep(const ScenarioConfig& base, const std::string& axis,
                            const std::vector<double>& values,
                            const std::string& out_dir);

/// Fig.2-style transmit waveform: summed relative gate power over one frame.
std::vector<std::pair<double, double>> envelope_table(const ScenarioConfig& cfg,
                                                      double dt_ns);

void write_sweep_summary(const std::vector<SweepRow>& rows,
                         const std::string& path);

}  // namespace polsim
