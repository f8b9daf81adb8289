#include "polsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "polsim/csv.hpp"
#include "polsim/errors.hpp"

namespace polsim {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

/// Minimal flat INI reader with unknown-key detection.
class IniFile {
 public:
  static IniFile load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file: " + path);
    IniFile f;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find_first_of("#;");
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw ConfigError("scenario line " + std::to_string(lineno) +
                            ": malformed section header");
        section = trim(line.substr(1, line.size() - 2));
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError("scenario line " + std::to_string(lineno) +
                          ": expected key = value");
      const std::string key = trim(line.substr(0, eq));
      f.values_[section][key] = trim(line.substr(eq + 1));
    }
    return f;
  }

  bool has(const std::string& sec, const std::string& key) const {
    const auto s = values_.find(sec);
    return s != values_.end() && s->second.count(key) > 0;
  }

  std::string get_string(const std::string& sec, const std::string& key,
                         const std::string& def) {
    consumed_[sec].insert(key);
    if (!has(sec, key)) return def;
    return values_.at(sec).at(key);
  }

  double get_double(const std::string& sec, const std::string& key, double def) {
    const std::string raw = get_string(sec, key, "");
    if (raw.empty()) return def;
    try {
      std::size_t pos = 0;
      const double v = std::stod(raw, &pos);
      if (pos != raw.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("[" + sec + "] " + key + ": not a number: " + raw);
    }
  }

  long get_long(const std::string& sec, const std::string& key, long def) {
    const double v = get_double(sec, key, static_cast<double>(def));
    return static_cast<long>(std::llround(v));
  }

  bool get_bool(const std::string& sec, const std::string& key, bool def) {
    std::string raw = get_string(sec, key, "");
    if (raw.empty()) return def;
    std::transform(raw.begin(), raw.end(), raw.begin(), ::tolower);
    if (raw == "true" || raw == "1" || raw == "yes" || raw == "on") return true;
    if (raw == "false" || raw == "0" || raw == "no" || raw == "off") return false;
    throw ConfigError("[" + sec + "] " + key + ": not a boolean: " + raw);
  }

  std::array<double, 3> get_triple(const std::string& sec,
                                   const std::string& key,
                                   const std::array<double, 3>& def) {
    const std::string raw = get_string(sec, key, "");
    if (raw.empty()) return def;
    std::array<double, 3> out{};
    std::stringstream ss(raw);
    std::string item;
    int i = 0;
    while (std::getline(ss, item, ',')) {
      if (i >= 3) break;
      try {
        out[i++] = std::stod(trim(item));
      } catch (const std::exception&) {
        throw ConfigError("[" + sec + "] " + key + ": not a number triple: " + raw);
      }
    }
    if (i != 3)
      throw ConfigError("[" + sec + "] " + key + ": expected three comma-separated values");
    return out;
  }

  std::vector<std::string> get_list(const std::string& sec,
                                    const std::string& key,
                                    const std::vector<std::string>& def) {
    const std::string raw = get_string(sec, key, "");
    if (raw.empty()) return def;
    std::vector<std::string> out;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
  }

  void ensure_all_consumed() const {
    for (const auto& [sec, keys] : values_) {
      const auto c = consumed_.find(sec);
      for (const auto& [key, value] : keys) {
        if (c == consumed_.end() || c->second.count(key) == 0)
          throw ConfigError("[" + sec + "] " + key + ": unknown key");
      }
    }
  }

 private:
  std::map<std::string, std::map<std::string, std::string>> values_;
  std::map<std::string, std::set<std::string>> consumed_;
};

std::string bool_str(bool b) { return b ? "true" : "false"; }

std::string scheme_str(DitherScheme s) {
  return s == DitherScheme::SubSlot ? "subslot" : "frame_sequential";
}

DitherScheme parse_scheme(const std::string& raw) {
  if (raw == "subslot") return DitherScheme::SubSlot;
  if (raw == "frame_sequential") return DitherScheme::FrameSequential;
  throw ConfigError("[control] scheme: unknown scheme: " + raw);
}

bool wants(const ScenarioConfig& cfg, const std::string& name) {
  return std::find(cfg.outputs.begin(), cfg.outputs.end(), name) !=
         cfg.outputs.end();
}

}  // namespace

void ScenarioConfig::validate() const {
  schedule.validate();
  if (duration_ms <= 0.0) throw ConfigError("[run] duration_ms: must be positive");
  if (dt_ns <= 0.0) throw ConfigError("[run] dt_ns: must be positive");
  if (dt_ns > schedule.dark_ns / 4.0)
    throw ConfigError("[run] dt_ns: must not exceed dark_ns / 4 (clock recovery)");
  if (warmup_frames < 0) throw ConfigError("[run] warmup_frames: must be >= 0");
  static const std::set<std::string> known = {"log",   "rie",    "ccdf",
                                              "spots", "traces", "summary"};
  for (const auto& o : outputs)
    if (!known.count(o)) throw ConfigError("[run] outputs: unknown artifact: " + o);
  if (!probe_sequence.empty() && probe_sequence != "axes6")
    throw ConfigError("[probe] sequence: unknown sequence: " + probe_sequence);
  if (dgd_ps < 0.0) throw ConfigError("[link] dgd_ps: must be >= 0");
  if (loss_db < 0.0) throw ConfigError("[link] loss_db: must be >= 0");
  try {
    control.validate();
  } catch (const SimError& e) {
    throw ConfigError(std::string("[control] ") + e.what());
  }
}

long ScenarioConfig::frames() const {
  return static_cast<long>(duration_ms * 1e6 / schedule.period_ns);
}

PlantConfig ScenarioConfig::to_plant() const {
  validate();
  PlantConfig p;
  p.schedule = schedule;
  p.gate = gate;
  p.dt_ns = dt_ns;
  p.tx_offset_ns = tx_offset_ns;
  p.polarimeter_enabled = polarimeter_enabled;
  p.polarimeter_rate_hz = polarimeter_msps * 1e6;

  const ChirpProfile chirp{chirp_span_mhz * 1e6, chirp_settle_ns, schedule.pilot0_ns};
  p.sources.pilot0.launch_peak_dbm = pilot_peak_dbm;
  p.sources.pilot0.chirp = chirp;
  p.sources.pilot45.launch_peak_dbm = pilot_peak_dbm;
  p.sources.pilot45.chirp = chirp;
  p.sources.probe_enabled = probe_enabled;
  p.sources.probe.launch_peak_dbm = probe_peak_dbm;
  p.sources.probe.always_on = probe_always_on;
  p.sources.probe.polarization = {1.0, probe_sop[0], probe_sop[1], probe_sop[2]};
  p.sources.probe.chirp = probe_always_on ? ChirpProfile{} : chirp;

  if (scrambler1_rate_rad_s > 0.0)
    p.link.elements.push_back(make_scrambler(scrambler1_rate_rad_s));
  if (dgd_ps > 0.0)
    p.link.elements.push_back(
        DgdElement{dgd_ps * 1e-12, StokesVector{1.0, psp[0], psp[1], psp[2]}});
  if (scrambler2_rate_rad_s > 0.0)
    p.link.elements.push_back(make_scrambler(scrambler2_rate_rad_s));
  if (loss_db > 0.0) p.link.elements.push_back(LossElement{loss_db});
  p.link.total_loss_db = loss_db;

  p.receiver.chain = chain;
  p.receiver.noise_enabled = noise_enabled;
  p.receiver.apds = {ApdModel{}, ApdModel{}, ApdModel{}};
  if (autobias_enabled) {
    const double received_peak_dbm = pilot_peak_dbm - loss_db;
    try {
      p.receiver.apds =
          autobias(p.receiver.apds, schedule, received_peak_dbm, chain);
    } catch (const PowerOutOfRange& e) {
      throw ConfigError(std::string("[pilot] peak_dbm: ") + e.what());
    }
  }
  return p;
}

ScenarioConfig default_scenario() { return ScenarioConfig{}; }

ScenarioConfig parse_scenario_file(const std::string& path) {
  IniFile f = IniFile::load(path);
  ScenarioConfig c;

  c.duration_ms = f.get_double("run", "duration_ms", c.duration_ms);
  c.dt_ns = f.get_double("run", "dt_ns", c.dt_ns);
  c.seed = static_cast<std::uint64_t>(f.get_long("run", "seed", static_cast<long>(c.seed)));
  c.warmup_frames = f.get_long("run", "warmup_frames", c.warmup_frames);
  c.outputs = f.get_list("run", "outputs", c.outputs);

  c.schedule.pilot0_ns = f.get_double("schedule", "pilot0_ns", c.schedule.pilot0_ns);
  c.schedule.pilot45_ns = f.get_double("schedule", "pilot45_ns", c.schedule.pilot45_ns);
  c.schedule.probe_ns = f.get_double("schedule", "probe_ns", c.schedule.probe_ns);
  c.schedule.dark_ns = f.get_double("schedule", "dark_ns", c.schedule.dark_ns);
  c.schedule.period_ns = f.get_double("schedule", "period_ns", c.schedule.period_ns);
  c.tx_offset_ns = f.get_double("schedule", "tx_offset_ns", c.tx_offset_ns);

  c.gate.rise_ns = f.get_double("gate", "rise_ns", c.gate.rise_ns);
  c.gate.fall_initial_ns = f.get_double("gate", "fall_initial_ns", c.gate.fall_initial_ns);
  c.gate.fall_initial_level =
      f.get_double("gate", "fall_initial_level", c.gate.fall_initial_level);
  c.gate.tail_time_constant_ns =
      f.get_double("gate", "tail_constant_ns", c.gate.tail_time_constant_ns);
  c.gate.off_floor_db = f.get_double("gate", "off_floor_db", c.gate.off_floor_db);

  c.pilot_peak_dbm = f.get_double("pilot", "peak_dbm", c.pilot_peak_dbm);
  c.chirp_span_mhz = f.get_double("pilot", "chirp_span_mhz", c.chirp_span_mhz);
  c.chirp_settle_ns = f.get_double("pilot", "chirp_settle_ns", c.chirp_settle_ns);

  c.probe_enabled = f.get_bool("probe", "enabled", c.probe_enabled);
  c.probe_always_on = f.get_bool("probe", "always_on", c.probe_always_on);
  c.probe_peak_dbm = f.get_double("probe", "peak_dbm", c.probe_peak_dbm);
  c.probe_sop = f.get_triple("probe", "sop", c.probe_sop);
  c.probe_sequence = f.get_string("probe", "sequence", c.probe_sequence);
  c.probe_segment_s = f.get_double("probe", "segment_s", c.probe_segment_s);

  c.scrambler1_rate_rad_s =
      f.get_double("link", "scrambler1_rate_rad_s", c.scrambler1_rate_rad_s);
  c.scrambler2_rate_rad_s =
      f.get_double("link", "scrambler2_rate_rad_s", c.scrambler2_rate_rad_s);
  c.dgd_ps = f.get_double("link", "dgd_ps", c.dgd_ps);
  c.psp = f.get_triple("link", "psp", c.psp);
  c.loss_db = f.get_double("link", "loss_db", c.loss_db);

  c.chain.tap1_ratio = f.get_double("receiver", "tap1_ratio", c.chain.tap1_ratio);
  c.chain.tap2_ratio = f.get_double("receiver", "tap2_ratio", c.chain.tap2_ratio);
  c.chain.through_loss_db =
      f.get_double("receiver", "through_loss_db", c.chain.through_loss_db);
  c.autobias_enabled = f.get_bool("receiver", "autobias", c.autobias_enabled);
  c.noise_enabled = f.get_bool("receiver", "noise", c.noise_enabled);

  c.control.scheme = parse_scheme(
      f.get_string("control", "scheme", scheme_str(c.control.scheme)));
  c.control.dither_rad = f.get_double("control", "dither_rad", c.control.dither_rad);
  c.control.step_gain = f.get_double("control", "step_gain", c.control.step_gain);
  c.control.max_step_rad =
      f.get_double("control", "max_step_rad", c.control.max_step_rad);
  c.control.slope_deadband =
      f.get_double("control", "slope_deadband", c.control.slope_deadband);
  c.control.min_clock_confidence = f.get_double(
      "control", "min_clock_confidence", c.control.min_clock_confidence);
  c.control.gate_guard_ns =
      f.get_double("control", "gate_guard_ns", c.control.gate_guard_ns);
  c.control.freeze_phase_dof =
      f.get_bool("control", "freeze_phase_dof", c.control.freeze_phase_dof);

  c.polarimeter_enabled = f.get_bool("polarimeter", "enabled", c.polarimeter_enabled);
  c.polarimeter_msps =
      f.get_double("polarimeter", "sample_rate_msps", c.polarimeter_msps);

  f.ensure_all_consumed();
  c.validate();
  return c;
}

std::string serialize_scenario(const ScenarioConfig& c) {
  std::ostringstream o;
  o << "[run]\n";
  o << "duration_ms = " << csv_num(c.duration_ms) << "\n";
  o << "dt_ns = " << csv_num(c.dt_ns) << "\n";
  o << "seed = " << c.seed << "\n";
  o << "warmup_frames = " << c.warmup_frames << "\n";
  o << "outputs = ";
  for (std::size_t i = 0; i < c.outputs.size(); ++i)
    o << (i ? "," : "") << c.outputs[i];
  o << "\n\n[schedule]\n";
  o << "pilot0_ns = " << csv_num(c.schedule.pilot0_ns) << "\n";
  o << "pilot45_ns = " << csv_num(c.schedule.pilot45_ns) << "\n";
  o << "probe_ns = " << csv_num(c.schedule.probe_ns) << "\n";
  o << "dark_ns = " << csv_num(c.schedule.dark_ns) << "\n";
  o << "period_ns = " << csv_num(c.schedule.period_ns) << "\n";
  o << "tx_offset_ns = " << csv_num(c.tx_offset_ns) << "\n";
  o << "\n[gate]\n";
  o << "rise_ns = " << csv_num(c.gate.rise_ns) << "\n";
  o << "fall_initial_ns = " << csv_num(c.gate.fall_initial_ns) << "\n";
  o << "fall_initial_level = " << csv_num(c.gate.fall_initial_level) << "\n";
  o << "tail_constant_ns = " << csv_num(c.gate.tail_time_constant_ns) << "\n";
  o << "off_floor_db = " << csv_num(c.gate.off_floor_db) << "\n";
  o << "\n[pilot]\n";
  o << "peak_dbm = " << csv_num(c.pilot_peak_dbm) << "\n";
  o << "chirp_span_mhz = " << csv_num(c.chirp_span_mhz) << "\n";
  o << "chirp_settle_ns = " << csv_num(c.chirp_settle_ns) << "\n";
  o << "\n[probe]\n";
  o << "enabled = " << bool_str(c.probe_enabled) << "\n";
  o << "always_on = " << bool_str(c.probe_always_on) << "\n";
  o << "peak_dbm = " << csv_num(c.probe_peak_dbm) << "\n";
  o << "sop = " << csv_num(c.probe_sop[0]) << "," << csv_num(c.probe_sop[1])
    << "," << csv_num(c.probe_sop[2]) << "\n";
  o << "sequence = " << c.probe_sequence << "\n";
  o << "segment_s = " << csv_num(c.probe_segment_s) << "\n";
  o << "\n[link]\n";
  o << "scrambler1_rate_rad_s = " << csv_num(c.scrambler1_rate_rad_s) << "\n";
  o << "scrambler2_rate_rad_s = " << csv_num(c.scrambler2_rate_rad_s) << "\n";
  o << "dgd_ps = " << csv_num(c.dgd_ps) << "\n";
  o << "psp = " << csv_num(c.psp[0]) << "," << csv_num(c.psp[1]) << ","
    << csv_num(c.psp[2]) << "\n";
  o << "loss_db = " << csv_num(c.loss_db) << "\n";
  o << "\n[receiver]\n";
  o << "tap1_ratio = " << csv_num(c.chain.tap1_ratio) << "\n";
  o << "tap2_ratio = " << csv_num(c.chain.tap2_ratio) << "\n";
  o << "through_loss_db = " << csv_num(c.chain.through_loss_db) << "\n";
  o << "autobias = " << bool_str(c.autobias_enabled) << "\n";
  o << "noise = " << bool_str(c.noise_enabled) << "\n";
  o << "\n[control]\n";
  o << "scheme = " << scheme_str(c.control.scheme) << "\n";
  o << "dither_rad = " << csv_num(c.control.dither_rad) << "\n";
  o << "step_gain = " << csv_num(c.control.step_gain) << "\n";
  o << "max_step_rad = " << csv_num(c.control.max_step_rad) << "\n";
  o << "slope_deadband = " << csv_num(c.control.slope_deadband) << "\n";
  o << "min_clock_confidence = " << csv_num(c.control.min_clock_confidence) << "\n";
  o << "gate_guard_ns = " << csv_num(c.control.gate_guard_ns) << "\n";
  o << "freeze_phase_dof = " << bool_str(c.control.freeze_phase_dof) << "\n";
  o << "\n[polarimeter]\n";
  o << "enabled = " << bool_str(c.polarimeter_enabled) << "\n";
  o << "sample_rate_msps = " << csv_num(c.polarimeter_msps) << "\n";
  return o.str();
}

RunArtifacts run_scenario(const ScenarioConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  RunArtifacts art;
  const PlantConfig plant = cfg.to_plant();
  ControlLoop loop(plant, cfg.control, cfg.seed);

  loop.run(cfg.warmup_frames);
  loop.probe_samples().clear();
  art.measured_offset = static_cast<long>(loop.log().size());

  const long measured = std::max<long>(1, cfg.frames());
  if (cfg.probe_sequence == "axes6") {
    const auto sops = cartesian_probe_sops();
    const auto labels = cartesian_probe_labels();
    const long seg_frames = std::max<long>(
        1, static_cast<long>(cfg.probe_segment_s * 1e9 / cfg.schedule.period_ns));
    for (int i = 0; i < 6; ++i) {
      loop.set_probe_sop(sops[i]);
      loop.run(seg_frames);
      art.spot_samples[labels[i]] = std::move(loop.probe_samples());
      loop.probe_samples().clear();
    }
  } else {
    loop.run(measured);
    if (!loop.probe_samples().empty())
      art.spot_samples["probe"] = std::move(loop.probe_samples());
  }

  art.log = loop.log();
  for (std::size_t i = art.measured_offset; i < art.log.size(); ++i) {
    art.rie0.push_back(art.log[i].rie0);
    art.rie45.push_back(art.log[i].rie45);
  }
  art.stats0 = SummaryStats::from_samples(art.rie0);
  art.stats45 = SummaryStats::from_samples(art.rie45);

  if (out_dir.empty()) return art;
  const std::string dir = out_dir + "/";

  if (wants(cfg, "log")) {
    CsvWriter w(dir + "controller_log.csv",
                {"frame_index", "phi_a", "phi_b", "delta_c", "rie0", "rie45",
                 "clock_confidence"});
    for (const auto& r : art.log)
      w.row({static_cast<double>(r.frame_index), r.state.phi_a_rad,
             r.state.phi_b_rad, r.state.delta_c_rad, r.rie0, r.rie45,
             r.clock_confidence});
    art.files_written.push_back(dir + "controller_log.csv");
  }
  if (wants(cfg, "rie")) {
    CsvWriter w(dir + "rie_samples.csv", {"frame_index", "rie0", "rie45"});
    for (std::size_t i = art.measured_offset; i < art.log.size(); ++i)
      w.row({static_cast<double>(art.log[i].frame_index), art.log[i].rie0,
             art.log[i].rie45});
    art.files_written.push_back(dir + "rie_samples.csv");
  }
  if (wants(cfg, "ccdf")) {
    ComplementaryCdf::from_samples(art.rie0).write_csv(dir + "ccdf_rie0.csv");
    ComplementaryCdf::from_samples(art.rie45).write_csv(dir + "ccdf_rie45.csv");
    art.files_written.push_back(dir + "ccdf_rie0.csv");
    art.files_written.push_back(dir + "ccdf_rie45.csv");
  }
  if (wants(cfg, "spots")) {
    for (const auto& [label, samples] : art.spot_samples) {
      CsvWriter w(dir + "spots_" + label + ".csv", {"s1", "s2", "s3"});
      for (const auto& s : samples) w.row({s[0], s[1], s[2]});
      art.files_written.push_back(dir + "spots_" + label + ".csv");
    }
  }
  if (wants(cfg, "traces")) {
    // Debug dump: the first frames of an identically seeded loop.
    ControlLoop dbg(plant, cfg.control, cfg.seed);
    dbg.run(0);  // acquires the clock
    FrameOptions opt;
    Rng rng(cfg.seed);
    Rng frame_rng = rng.child(2);
    opt.noise_rng = plant.receiver.noise_enabled ? &frame_rng : nullptr;
    opt.collect_traces = true;
    opt.gate_guard_ns = cfg.control.gate_guard_ns;
    const DitherPlan idle{dbg.controller().state(), {}};
    const FrameResult res = dbg.simulator().simulate_frame(
        2, 2 * cfg.schedule.period_ns + dbg.phase().offset_ns, idle, opt);
    const PhotocurrentTrace rep =
        total_power_replica(res.traces.i90, res.traces.i0);
    CsvWriter w(dir + "traces.csv", {"t_ns", "i90", "i0", "i45m", "replica"});
    for (std::size_t k = 0; k < res.traces.i90.size(); ++k)
      w.row({res.traces.i90.time_ns(k), res.traces.i90.current_a[k],
             res.traces.i0.current_a[k], res.traces.i45m.current_a[k],
             rep.current_a[k]});
    art.files_written.push_back(dir + "traces.csv");
  }
  if (wants(cfg, "summary")) {
    CsvWriter w(dir + "summary.csv",
                {"frames", "rie0_max", "rie0_median", "rie0_p999", "rie45_max",
                 "rie45_median", "rie45_p999"});
    w.row({static_cast<double>(art.rie0.size()), art.stats0.max,
           art.stats0.median, art.stats0.p999, art.stats45.max,
           art.stats45.median, art.stats45.p999});
    art.files_written.push_back(dir + "summary.csv");
  }
  return art;
}

std::vector<SweepRow> sweep(const ScenarioConfig& base, const std::string& axis,
                            const std::vector<double>& values,
                            const std::string& out_dir) {
  if (axis != "scrambling_rate" && axis != "dgd")
    throw ConfigError("sweep axis must be scrambling_rate or dgd");
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < values.size(); ++i) {
    ScenarioConfig cfg = base;
    if (axis == "scrambling_rate")
      cfg.scrambler1_rate_rad_s = values[i];
    else
      cfg.dgd_ps = values[i];
    cfg.seed = base.seed + 0x9e3779b9u * (i + 1);
    SweepRow row;
    row.axis = axis;
    row.value = values[i];
    row.seed = cfg.seed;
    try {
      std::string run_dir;
      if (!out_dir.empty()) {
        std::ostringstream name;
        name << out_dir << "/" << axis << "_" << csv_num(values[i]);
        run_dir = name.str();
        std::filesystem::create_directories(run_dir);
      }
      const RunArtifacts art = run_scenario(cfg, run_dir);
      row.frames = static_cast<long>(art.rie0.size());
      row.rie0 = art.stats0;
      row.rie45 = art.stats45;
      row.ok = true;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
    rows.push_back(row);
  }
  if (!out_dir.empty()) write_sweep_summary(rows, out_dir + "/summary.csv");
  return rows;
}

void write_sweep_summary(const std::vector<SweepRow>& rows,
                         const std::string& path) {
  std::ofstream out(path);
  if (!out) throw SimError("cannot open output file: " + path);
  out << "axis,value,seed,frames,rie0_max,rie0_median,rie0_p999,"
         "rie45_max,rie45_median,rie45_p999,status\n";
  for (const auto& r : rows) {
    out << r.axis << ',' << csv_num(r.value) << ',' << r.seed << ','
        << r.frames << ',';
    if (r.ok) {
      out << csv_num(r.rie0.max) << ',' << csv_num(r.rie0.median) << ','
          << csv_num(r.rie0.p999) << ',' << csv_num(r.rie45.max) << ','
          << csv_num(r.rie45.median) << ',' << csv_num(r.rie45.p999) << ",ok\n";
    } else {
      out << ",,,,,,error: " << r.error << "\n";
    }
  }
}

std::vector<std::pair<double, double>> envelope_table(const ScenarioConfig& cfg,
                                                      double dt_ns) {
  const SlotSchedule& sched = cfg.schedule;
  const double pilot_peak = dbm_to_watts(cfg.pilot_peak_dbm);
  struct Gate {
    double start, len, rel_peak;
    bool always_on;
  };
  const std::vector<Gate> gates = {
      {sched.slot_start_ns(SlotId::Pilot0), sched.pilot0_ns, 1.0, false},
      {sched.slot_start_ns(SlotId::Pilot45), sched.pilot45_ns, 1.0, false},
      {sched.slot_start_ns(SlotId::Probe), sched.probe_ns,
       cfg.probe_enabled ? dbm_to_watts(cfg.probe_peak_dbm) / pilot_peak : 0.0,
       cfg.probe_always_on},
  };
  std::vector<std::pair<double, double>> table;
  const auto n = static_cast<long>(sched.period_ns / dt_ns);
  table.reserve(n);
  for (long k = 0; k < n; ++k) {
    const double t = k * dt_ns;
    double total = 0.0;
    for (const auto& g : gates) {
      if (g.rel_peak == 0.0) continue;
      if (g.always_on) {
        total += g.rel_peak;
        continue;
      }
      double u = std::fmod(t - g.start, sched.period_ns);
      if (u < 0) u += sched.period_ns;
      total += g.rel_peak * cfg.gate.value(u, g.len);
    }
    table.emplace_back(t, total);
  }
  return table;
}

}  // namespace polsim
