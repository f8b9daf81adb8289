// Scenario runner for the TDM pilot polarization/phase control simulator.
//
//   polsim run <scenario.scn> [--seed N] [--duration MS] [--out DIR]
//   polsim sweep <scenario.scn> --axis scrambling_rate --values 100,10000,20000
//   polsim envelope [scenario.scn] [--fine-dt] [--out DIR]
//   polsim report --out DIR
//
// Exit codes: 0 success, 2 configuration error, 3 runtime error.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "polsim/csv.hpp"
#include "polsim/errors.hpp"
#include "polsim/scenario.hpp"

namespace {

using namespace polsim;

ScenarioConfig load_or_default(const std::string& path) {
  if (path.empty()) return default_scenario();
  return parse_scenario_file(path);
}

void apply_overrides(ScenarioConfig& cfg, bool seed_set, std::uint64_t seed,
                     bool duration_set, double duration_ms) {
  if (seed_set) cfg.seed = seed;
  if (duration_set) cfg.duration_ms = duration_ms;
}

void print_stats(const char* tag, const SummaryStats& s) {
  std::printf("%-6s max %-12.6g median %-12.6g p99.9 %-12.6g\n", tag, s.max,
              s.median, s.p999);
}

int run_command(const std::string& scenario, bool seed_set, std::uint64_t seed,
                bool duration_set, double duration_ms, std::string out_dir) {
  ScenarioConfig cfg = load_or_default(scenario);
  apply_overrides(cfg, seed_set, seed, duration_set, duration_ms);
  if (out_dir.empty()) out_dir = "out";
  std::filesystem::create_directories(out_dir);
  const RunArtifacts art = run_scenario(cfg, out_dir);
  std::printf("frames measured: %zu\n", art.rie0.size());
  print_stats("RIE0", art.stats0);
  print_stats("RIE45", art.stats45);
  for (const auto& f : art.files_written) std::printf("wrote %s\n", f.c_str());
  return 0;
}

int sweep_command(const std::string& scenario, const std::string& axis,
                  const std::vector<double>& values, bool seed_set,
                  std::uint64_t seed, bool duration_set, double duration_ms,
                  std::string out_dir) {
  ScenarioConfig cfg = load_or_default(scenario);
  apply_overrides(cfg, seed_set, seed, duration_set, duration_ms);
  if (out_dir.empty()) out_dir = "out";
  std::filesystem::create_directories(out_dir);
  const auto rows = sweep(cfg, axis, values, out_dir);
  bool all_ok = true;
  for (const auto& r : rows) {
    if (r.ok) {
      std::printf("%s=%-10g rie45 max %-10.4g median %-10.4g\n", r.axis.c_str(),
                  r.value, r.rie45.max, r.rie45.median);
    } else {
      std::printf("%s=%-10g FAILED: %s\n", r.axis.c_str(), r.value,
                  r.error.c_str());
      all_ok = false;
    }
  }
  std::printf("wrote %s/summary.csv\n", out_dir.c_str());
  return all_ok ? 0 : 3;
}

int envelope_command(const std::string& scenario, bool fine_dt,
                     std::string out_dir) {
  ScenarioConfig cfg = load_or_default(scenario);
  if (out_dir.empty()) out_dir = "out";
  std::filesystem::create_directories(out_dir);
  const double dt = fine_dt ? 0.1 : 1.0;
  const auto table = envelope_table(cfg, dt);
  CsvWriter w(out_dir + "/envelope.csv", {"t_ns", "relative_power"});
  for (const auto& [t, p] : table) w.row({t, p});
  std::printf("wrote %s/envelope.csv (%zu samples at %.1f ns)\n",
              out_dir.c_str(), table.size(), dt);
  return 0;
}

int report_command(const std::string& out_dir) {
  const std::string path = out_dir + "/rie_samples.csv";
  std::ifstream in(path);
  if (!in) throw SimError("cannot open " + path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<double> rie0, rie45;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    std::getline(ss, cell, ',');
    rie0.push_back(std::stod(cell));
    std::getline(ss, cell, ',');
    rie45.push_back(std::stod(cell));
  }
  if (rie0.empty()) throw SimError("no samples in " + path);
  const SummaryStats s0 = SummaryStats::from_samples(rie0);
  const SummaryStats s45 = SummaryStats::from_samples(rie45);
  std::printf("samples: %zu\n", rie0.size());
  print_stats("RIE0", s0);
  print_stats("RIE45", s45);
  CsvWriter w(out_dir + "/summary.csv",
              {"frames", "rie0_max", "rie0_median", "rie0_p999", "rie45_max",
               "rie45_median", "rie45_p999"});
  w.row({static_cast<double>(rie0.size()), s0.max, s0.median, s0.p999, s45.max,
         s45.median, s45.p999});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TDM pilot polarization and phase control simulator"};
  app.require_subcommand(1);

  std::string scenario, out_dir, axis;
  std::uint64_t seed = 0;
  double duration_ms = 0.0;
  std::vector<double> values;
  bool fine_dt = false;

  auto* run = app.add_subcommand("run", "run one scenario");
  run->add_option("scenario", scenario, "scenario file (defaults when omitted)");
  auto* run_seed = run->add_option("--seed", seed, "seed override");
  auto* run_dur = run->add_option("--duration", duration_ms, "duration override, ms");
  run->add_option("--out", out_dir, "output directory (default: out)");

  auto* sw = app.add_subcommand("sweep", "run a parameter sweep");
  sw->add_option("scenario", scenario, "base scenario file");
  sw->add_option("--axis", axis, "scrambling_rate | dgd")->required();
  sw->add_option("--values", values, "grid values")->required()->delimiter(',');
  auto* sw_seed = sw->add_option("--seed", seed, "seed override");
  auto* sw_dur = sw->add_option("--duration", duration_ms, "duration override, ms");
  sw->add_option("--out", out_dir, "output directory (default: out)");

  auto* env = app.add_subcommand("envelope", "dump the transmit gate waveform");
  env->add_option("scenario", scenario, "scenario file (defaults when omitted)");
  env->add_flag("--fine-dt", fine_dt, "0.1 ns resolution");
  env->add_option("--out", out_dir, "output directory (default: out)");

  auto* rep = app.add_subcommand("report", "summarize rie_samples.csv of a run");
  rep->add_option("--out", out_dir, "run output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return run_command(scenario, run_seed->count() > 0, seed,
                         run_dur->count() > 0, duration_ms, out_dir);
    if (sw->parsed())
      return sweep_command(scenario, axis, values, sw_seed->count() > 0, seed,
                           sw_dur->count() > 0, duration_ms, out_dir);
    if (env->parsed()) return envelope_command(scenario, fine_dt, out_dir);
    if (rep->parsed()) return report_command(out_dir);
  } catch (const polsim::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
