#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <map>
#include <optional>

#include "desync/config.hpp"
#include "desync/desync_pipeline.hpp"
#include "desync/detection_eval.hpp"
#include "desync/errors.hpp"
#include "desync/index_scoring.hpp"
#include "desync/phase_connectivity.hpp"
#include "desync/recording.hpp"
#include "desync/spectral.hpp"
#include "desync/synth.hpp"
#include "desync/text_io.hpp"
#include "desync/windowing.hpp"
#include "reports.hpp"

#ifndef DESYNC_VERSION
#define DESYNC_VERSION "0.0.0"
#endif

namespace desync::cli {

const char* tool_version() { return DESYNC_VERSION; }

namespace {

namespace fs = std::filesystem;

struct Options {
  std::vector<std::string> recs;
  std::vector<std::string> anns;
  std::string format = "native";
  double csv_fs = 0.0;
  std::string config_path;
  unsigned threads = 0;
  bool bipolar = false;
  std::string out;
  std::string tensor_in;
  std::string dump;
  std::string sweep = "1:100";
  std::string source = "ei";
  std::string scenario;
  long long benchmark_seed = -1;
  std::string event = "desync-cut";
  std::string out_rec, out_ann;
  std::vector<std::pair<std::string, std::string>> overrides;
  bool m_flag = false, m_pct_flag = false;
};

// Output files are staged and only written once the command has succeeded.
class Outputs {
 public:
  void add(std::string path, std::string contents) { files_.emplace_back(std::move(path), std::move(contents)); }
  void commit() const {
    for (auto& [path, contents] : files_) {
      auto parent = fs::path(path).parent_path();
      std::error_code ec;
      if (!parent.empty()) fs::create_directories(parent, ec);
      if (ec) throw RuntimeError("cannot create directory '" + parent.string() + "'");
      write_file_atomic(path, contents);
    }
  }

 private:
  std::vector<std::pair<std::string, std::string>> files_;
};

struct Patient {
  std::string label;
  MultichannelRecording rec;
  std::optional<EpochAnnotation> ann;
};

struct Context {
  AnalysisConfig cfg;
  std::uint64_t input_hash = 1469598103934665603ULL;
  std::string extra_config;  // command arguments that shape the output

  void hash_input(std::string_view bytes) { input_hash = fnv1a64(bytes, input_hash); }
  Provenance provenance(const std::string& command) const {
    return {command, hex64(fnv1a64(cfg.canonical() + extra_config)), hex64(input_hash)};
  }
};

std::string in_dir(const Options& o, const std::string& name) {
  if (o.out.empty()) throw ValidationError("--out is required");
  return (fs::path(o.out) / name).string();
}

AnalysisConfig build_config(const Options& o, Context& ctx) {
  AnalysisConfig cfg;
  if (!o.config_path.empty()) {
    auto text = read_file(o.config_path);
    cfg = parse_config(text);
  }
  for (auto& [k, v] : o.overrides) cfg.set(k, v);
  if (o.m_flag) cfg.m_pct.reset();
  if (o.m_pct_flag) cfg.m.reset();
  cfg.validate();
  (void)ctx;
  return cfg;
}

Patient load_patient(const Options& o, Context& ctx, std::size_t i, bool need_ann) {
  const auto& path = o.recs.at(i);
  auto format = parse_recording_format(o.format);
  if (format == RecordingFormat::csv && !(o.csv_fs > 0.0)) throw ValidationError("--fs is required for CSV input");
  auto bytes = read_file(path);
  ctx.hash_input(bytes);
  auto rec = format == RecordingFormat::native ? parse_native_recording(bytes) : parse_csv_recording(bytes, o.csv_fs);
  std::optional<EpochAnnotation> ann;
  if (i < o.anns.size()) {
    auto text = read_file(o.anns[i]);
    ctx.hash_input(text);
    ann = parse_annotation(text, rec.duration_s(), ctx.cfg.t_base_offset_s);
    ann->validate(rec);
  } else if (need_ann) {
    throw ValidationError("--ann is required");
  }
  ctx.cfg.validate(rec.fs());

  if (ann) rec = exclude_channels(rec, *ann);
  if (ctx.cfg.comb_hz > 0.0) rec = apply_comb_filter(rec, ctx.cfg.filter());
  if (o.bipolar) rec = bipolar_montage(rec, electrode_groups_from_names(rec.channel_names()));
  if (ann) {
    ann->excluded_channels.clear();
    ann->epoch_duration_s = rec.duration_s();
    ann->validate(rec);
  }
  return {fs::path(path).stem().string(), std::move(rec), std::move(ann)};
}

struct Analysis {
  WindowPlan plan;
  EiRun ei;
  DiRun di;
};

std::optional<ConnectivityTensor> load_tensor_arg(const Options& o, Context& ctx) {
  if (o.tensor_in.empty()) return std::nullopt;
  auto bytes = read_file(o.tensor_in);
  ctx.hash_input(bytes);
  return parse_tensor(bytes);
}

void check_tensor(const ConnectivityTensor& t, const MultichannelRecording& rec, const WindowPlan& plan,
                  const AnalysisConfig& cfg) {
  if (t.channels() != rec.channel_names()) throw ValidationError("tensor channels differ from the recording");
  if (t.window_count() != plan.size()) throw ValidationError("tensor windows differ from the window plan");
  auto grid = make_lag_grid(cfg.tau_max_s, cfg.lag_step_s, rec.fs());
  if (t.grid().lags != grid.lags) throw ValidationError("tensor lag grid differs from the configuration");
}

DiRun di_for(const Patient& p, const WindowPlan& plan, const Context& ctx, unsigned threads,
             const std::optional<ConnectivityTensor>& tensor, ConnectivityTensor* keep = nullptr) {
  auto params = ctx.cfg.di_params(p.rec.channel_count(), threads);
  const EpochTimes epoch{p.ann->t_base_s, p.ann->t_start_s, p.ann->t_end_s};
  if (tensor) {
    check_tensor(*tensor, p.rec, plan, ctx.cfg);
    return run_di_from_tensor(*tensor, epoch, plan.shift_s, params);
  }
  return run_di(p.rec, plan, *p.ann, params, keep);
}

Analysis analyse(const Patient& p, const Context& ctx, unsigned threads,
                 const std::optional<ConnectivityTensor>& tensor) {
  Analysis a;
  a.plan = build_plan(p.rec, ctx.cfg.window_s, ctx.cfg.shift_s);
  a.ei = run_ei(p.rec, a.plan, *p.ann, ctx.cfg.bands, ctx.cfg.index_params(p.rec.channel_count()), threads);
  a.di = di_for(p, a.plan, ctx, threads, tensor);
  return a;
}

DetectionSets detection_sets(const Analysis& a, double eta) {
  DetectionSets s;
  s.ei = classify(normalize_scores(a.ei.table, Detector::ei), eta);
  s.di = classify(normalize_scores(a.di.table, Detector::di), eta);
  s.both = fuse(s.ei, s.di, FuseMode::and_);
  s.any = fuse(s.ei, s.di, FuseMode::or_);
  return s;
}

void require_single(const Options& o) {
  if (o.recs.size() != 1) throw ValidationError("exactly one --rec is required");
  if (o.anns.size() > 1) throw ValidationError("at most one --ann is allowed");
}

// ---- commands -------------------------------------------------------------

void cmd_ingest(const Options& o, Context& ctx, Outputs& outs, std::ostream& out) {
  require_single(o);
  auto p = load_patient(o, ctx, 0, false);
  if (o.out.empty()) throw ValidationError("--out is required");
  outs.add(o.out, serialize_native_recording(p.rec));
  out << "channels=" << p.rec.channel_count() << "\nsamples=" << p.rec.sample_count()
      << "\nfs_hz=" << format_double(p.rec.fs()) << "\nduration_s=" << format_double(p.rec.duration_s()) << "\n";
}

void cmd_energy(const Options& o, Context& ctx, Outputs& outs) {
  require_single(o);
  auto p = load_patient(o, ctx, 0, false);
  auto plan = build_plan(p.rec, ctx.cfg.window_s, ctx.cfg.shift_s);
  auto series = energy_series(p.rec, plan, ctx.cfg.bands, o.threads);
  outs.add(in_dir(o, "energy_series.csv"), energy_csv(ctx.provenance("energy-series"), series, plan.window_times));
}

void cmd_charts(const Options& o, Context& ctx, Outputs& outs) {
  require_single(o);
  if (o.source != "ei" && o.source != "di" && o.source != "both")
    throw ValidationError("--source must be ei, di or both");
  auto tensor = load_tensor_arg(o, ctx);
  auto p = load_patient(o, ctx, 0, true);
  auto plan = build_plan(p.rec, ctx.cfg.window_s, ctx.cfg.shift_s);
  auto prov = ctx.provenance("charts");
  if (o.source != "di") {
    auto ei = run_ei(p.rec, plan, *p.ann, ctx.cfg.bands, ctx.cfg.index_params(p.rec.channel_count()), o.threads);
    outs.add(in_dir(o, "charts_ei.csv"), charts_csv(prov, "cusum_E", ei.charts));
  }
  if (o.source != "ei") {
    auto di = di_for(p, plan, ctx, o.threads, tensor);
    outs.add(in_dir(o, "charts_di.csv"), charts_csv(prov, "cusum_D", di.charts));
    outs.add(in_dir(o, "network_stats.csv"), network_stats_csv(prov, di.stats, plan.window_times));
  }
}

void cmd_pte(const Options& o, Context& ctx, Outputs& outs, std::ostream& out) {
  require_single(o);
  auto p = load_patient(o, ctx, 0, false);
  auto plan = build_plan(p.rec, ctx.cfg.window_s, ctx.cfg.shift_s);
  ConnectivityOptions opt{ctx.cfg.tau_max_s, ctx.cfg.lag_step_s, ctx.cfg.bin_rule, o.threads};
  auto tensor = connectivity_tensor(p.rec, plan, opt);
  auto stats = network_stats(tensor, ctx.cfg.alpha);
  auto prov = ctx.provenance("pte");
  outs.add(in_dir(o, "network_stats.csv"), network_stats_csv(prov, stats, plan.window_times));
  if (!o.dump.empty()) outs.add(o.dump, serialize_tensor(tensor));
  Summary s(prov);
  s.add("windows", plan.size());
  s.add("channels", tensor.channel_count());
  s.add("pairs_per_window", tensor.channel_count() * (tensor.channel_count() - 1));
  s.add("lags", tensor.grid().lags.size());
  s.add("bins", phase_bins(plan.window_samples, ctx.cfg.bin_rule).bin_count);
  outs.add(in_dir(o, "pte_report.txt"), s.text());
  out << s.text();
}

void cmd_ei(const Options& o, Context& ctx, Outputs& outs) {
  require_single(o);
  auto p = load_patient(o, ctx, 0, true);
  auto plan = build_plan(p.rec, ctx.cfg.window_s, ctx.cfg.shift_s);
  auto ei = run_ei(p.rec, plan, *p.ann, ctx.cfg.bands, ctx.cfg.index_params(p.rec.channel_count()), o.threads);
  auto prov = ctx.provenance("ei");
  outs.add(in_dir(o, "ei_scores.csv"), scores_csv(prov, ei.table));
  Summary s(prov);
  s.add("channels", p.rec.channel_count());
  s.add("windows", plan.size());
  summarize_table(s, "EI", ei.table);
  outs.add(in_dir(o, "ei_report.txt"), s.text());
}

void cmd_di(const Options& o, Context& ctx, Outputs& outs) {
  require_single(o);
  auto tensor = load_tensor_arg(o, ctx);
  auto p = load_patient(o, ctx, 0, true);
  auto plan = build_plan(p.rec, ctx.cfg.window_s, ctx.cfg.shift_s);
  ConnectivityTensor computed;
  auto di = di_for(p, plan, ctx, o.threads, tensor, &computed);
  auto prov = ctx.provenance("di");
  outs.add(in_dir(o, "di_scores.csv"), scores_csv(prov, di.table));
  outs.add(in_dir(o, "di_series.csv"), di_series_csv(prov, di.desync, plan.window_times));
  if (!o.dump.empty()) outs.add(o.dump, serialize_tensor(tensor ? *tensor : computed));
  Summary s(prov);
  s.add("channels", p.rec.channel_count());
  s.add("windows", plan.size());
  std::size_t guarded = 0;
  for (auto g : di.desync.guarded) guarded += g;
  s.add("guarded_channel_windows", guarded);
  summarize_table(s, "DI", di.table);
  outs.add(in_dir(o, "di_report.txt"), s.text());
}

void cmd_detect(const Options& o, Context& ctx, Outputs& outs, std::ostream& out) {
  require_single(o);
  auto tensor = load_tensor_arg(o, ctx);
  auto p = load_patient(o, ctx, 0, true);
  auto a = analyse(p, ctx, o.threads, tensor);
  auto sets = detection_sets(a, ctx.cfg.eta);
  auto prov = ctx.provenance("detect");
  outs.add(in_dir(o, "detect_scores.csv"), detect_csv(prov, a.ei.table, a.di.table, sets));
  Summary s(prov);
  s.add("channels", p.rec.channel_count());
  s.add("windows", a.plan.size());
  s.add("eta", ctx.cfg.eta);
  summarize_table(s, "EI", a.ei.table);
  summarize_table(s, "DI", a.di.table);
  s.add_set("positives.EI", sets.ei);
  s.add_set("positives.DI", sets.di);
  s.add_set("positives.EI-and-DI", sets.both);
  s.add_set("positives.EI-or-DI", sets.any);
  outs.add(in_dir(o, "detect_report.txt"), s.text());
  out << s.text();
}

std::vector<PatientEval> evaluate_all(const Options& o, Context& ctx, std::vector<double>& sweep) {
  if (o.recs.empty()) throw ValidationError("at least one --rec is required");
  if (o.anns.size() != o.recs.size()) throw ValidationError("one --ann per --rec is required");
  if (!o.tensor_in.empty() && o.recs.size() != 1) throw ValidationError("--tensor needs a single patient");
  sweep = parse_sweep(o.sweep);
  auto tensor = load_tensor_arg(o, ctx);
  std::vector<PatientEval> out;
  for (std::size_t i = 0; i < o.recs.size(); ++i) {
    auto p = load_patient(o, ctx, i, true);
    if (p.ann->ez_channels.empty()) throw ValidationError("patient " + p.label + " has no ground truth");
    auto a = analyse(p, ctx, o.threads, tensor);
    out.push_back({p.label, evaluate_patient(a.ei.table, a.di.table, ctx.cfg.eta, p.ann->ez_channels, sweep)});
  }
  return out;
}

void add_aggregate(Summary& s, const std::vector<PatientEval>& pes, const std::vector<AggregateRow>& agg) {
  for (auto& pe : pes) {
    for (auto& r : pe.reports) {
      const std::string k = pe.label + "." + std::string(detector_name(r.detector));
      s.add(k + ".auc", r.roc.auc);
      s.add(k + ".sensitivity", r.metrics.sensitivity);
    }
    auto problems = check_fusion_laws(pe.reports);
    s.add(pe.label + ".fusion_laws", std::string_view(problems.empty() ? "ok" : "violated"));
    for (auto& pr : problems) s.add(pe.label + ".fusion_violation", std::string_view(pr));
  }
  for (auto& a : agg) {
    const std::string d(detector_name(a.detector));
    s.add("macro." + d + ".sensitivity", a.macro.sensitivity);
    s.add("macro." + d + ".precision", a.macro.precision);
    s.add("macro." + d + ".accuracy", a.macro.accuracy);
    s.add("macro." + d + ".auc", a.macro_auc);
    s.add("micro." + d + ".sensitivity", a.micro.sensitivity);
    s.add("micro." + d + ".precision", a.micro.precision);
    s.add("micro." + d + ".accuracy", a.micro.accuracy);
    s.add("micro." + d + ".auc", a.micro_auc);
  }
}

void cmd_eval(const Options& o, Context& ctx, Outputs& outs, std::ostream& out) {
  std::vector<double> sweep;
  auto pes = evaluate_all(o, ctx, sweep);
  std::vector<std::vector<EvaluationReport>> all;
  for (auto& pe : pes) all.push_back(pe.reports);
  auto agg = aggregate_patients(all);
  auto prov = ctx.provenance("eval");
  outs.add(in_dir(o, "metrics.csv"), metrics_csv(prov, pes, agg));
  Summary s(prov);
  s.add("patients", pes.size());
  s.add("eta", ctx.cfg.eta);
  add_aggregate(s, pes, agg);
  outs.add(in_dir(o, "eval_report.txt"), s.text());
  out << s.text();
}

void cmd_roc(const Options& o, Context& ctx, Outputs& outs, std::ostream& out) {
  std::vector<double> sweep;
  auto pes = evaluate_all(o, ctx, sweep);
  std::vector<std::vector<EvaluationReport>> all;
  for (auto& pe : pes) all.push_back(pe.reports);
  auto agg = aggregate_patients(all);
  auto prov = ctx.provenance("roc");
  outs.add(in_dir(o, "roc.csv"), roc_csv(prov, pes));
  Summary s(prov);
  s.add("patients", pes.size());
  s.add("sweep", std::string_view(o.sweep));
  add_aggregate(s, pes, agg);
  outs.add(in_dir(o, "roc_report.txt"), s.text());
  out << s.text();
}

void cmd_synth(const Options& o, Context& ctx, Outputs& outs, std::ostream& out) {
  SynthScenario sc;
  if (!o.scenario.empty() == (o.benchmark_seed >= 0))
    throw ValidationError("give exactly one of --scenario and --benchmark-seed");
  if (!o.scenario.empty()) {
    auto text = read_file(o.scenario);
    ctx.hash_input(text);
    sc = parse_scenario(text);
  } else {
    const bool none = o.event == "none";
    auto kind = EventKind::desync_cut;
    if (o.event == "hf-burst") kind = EventKind::hf_burst;
    else if (o.event != "desync-cut" && !none) throw ValidationError("--event must be desync-cut, hf-burst or none");
    sc = benchmark_scenario(static_cast<std::uint64_t>(o.benchmark_seed), kind, !none);
  }
  if (o.out_rec.empty() || o.out_ann.empty()) throw ValidationError("--out-rec and --out-ann are required");
  auto gen = generate(sc);
  outs.add(o.out_rec, serialize_native_recording(gen.recording));
  outs.add(o.out_ann, serialize_annotation(gen.annotation));
  out << "channels=" << gen.recording.channel_count() << "\nsamples=" << gen.recording.sample_count()
      << "\nez=" << join({gen.annotation.ez_channels.begin(), gen.annotation.ez_channels.end()}, ",") << "\n";
}

// ---- option wiring ----------------------------------------------------------

void add_override(CLI::App* sub, Options& o, const std::string& flag, const std::string& key, const std::string& help) {
  sub->add_option_function<std::string>(flag, [&o, key](const std::string& v) { o.overrides.emplace_back(key, v); }, help);
}

void add_input(CLI::App* sub, Options& o, bool multi) {
  if (multi) {
    sub->add_option("--rec", o.recs, "Recording file (repeat for several patients)")->required();
    sub->add_option("--ann", o.anns, "Annotation sidecar (one per recording)");
  } else {
    sub->add_option("--rec", o.recs, "Recording file")->required()->expected(1);
    sub->add_option("--ann", o.anns, "Annotation sidecar")->expected(1);
  }
  sub->add_option("--format", o.format, "Recording format")->check(CLI::IsMember({"native", "csv"}));
  sub->add_option("--fs", o.csv_fs, "Sampling rate for CSV input (Hz)");
  sub->add_option("--config", o.config_path, "key=value configuration file");
  sub->add_option("--threads", o.threads, "Worker threads (0: DESYNC_THREADS or all cores)");
  sub->add_flag("--bipolar", o.bipolar, "Derive adjacent-contact bipolar channels");
  add_override(sub, o, "--window", "window_s", "Window length (s)");
  add_override(sub, o, "--shift", "shift_s", "Window shift (s)");
  add_override(sub, o, "--comb", "comb_hz", "Powerline comb centre (Hz), 0 disables");
  add_override(sub, o, "--notch-bw", "notch_bw_hz", "Notch bandwidth (Hz)");
  add_override(sub, o, "--t-base-offset", "t_base_offset_s", "Default t_base relative to t_start (s)");
}

void add_bands(CLI::App* sub, Options& o) {
  sub->add_option_function<std::string>(
      "--bands",
      [&o](const std::string& v) {
        auto parts = split(v, ',');
        if (parts.size() != 2) throw CLI::ValidationError("--bands", "expected hi_lo:hi_hi,lo_lo:lo_hi");
        o.overrides.emplace_back("band_high", parts[0]);
        o.overrides.emplace_back("band_low", parts[1]);
      },
      "High and low bands, e.g. 30:250,4:12");
}

void add_index(CLI::App* sub, Options& o) {
  add_override(sub, o, "--gamma", "gamma", "CUSUM drift");
  add_override(sub, o, "--delta", "delta_s", "Tonicity interval (s)");
  add_override(sub, o, "--cusum-init", "cusum_init", "zero or literal");
  add_override(sub, o, "--cusum-norm", "cusum_norm", "mean or zscore");
  auto* m = sub->add_option_function<std::string>(
      "--m", [&o](const std::string& v) { o.overrides.emplace_back("m", v); o.m_flag = true; }, "Selection size");
  auto* mp = sub->add_option_function<std::string>(
      "--m-pct", [&o](const std::string& v) { o.overrides.emplace_back("m_pct", v); o.m_pct_flag = true; },
      "Selection size as percent of channels");
  m->excludes(mp);
  mp->excludes(m);
}

void add_pte(CLI::App* sub, Options& o) {
  add_override(sub, o, "--tau-max", "tau_max_s", "Largest lag (s)");
  add_override(sub, o, "--lag-step", "lag_step_s", "Lag grid step (s)");
  add_override(sub, o, "--bin-rule", "bin_rule", "ceil or round");
  add_override(sub, o, "--alpha", "alpha", "EWMA weight");
}

void add_di(CLI::App* sub, Options& o) {
  add_pte(sub, o);
  add_override(sub, o, "--desync-guard", "desync_guard", "relative or absolute");
  add_override(sub, o, "--desync-guard-eps", "desync_guard_eps", "Guard constant");
  sub->add_option("--tensor", o.tensor_in, "Reuse a tensor dump instead of recomputing");
}

int fail(std::ostream& err, const std::string& what, int code) {
  err << "error: " << what << "\n";
  return code;
}

}  // namespace

int run_command(int argc, char** argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Epileptogenicity channel ranking from multichannel recordings", "desync"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);

  auto* ingest = app.add_subcommand("ingest", "Validate, filter and re-encode a recording");
  add_input(ingest, o, false);
  ingest->add_option("--out", o.out, "Output native recording")->required();

  auto* energy = app.add_subcommand("energy-series", "Per-window energy ratio CSV");
  add_input(energy, o, false);
  add_bands(energy, o);
  energy->add_option("--out", o.out, "Output directory")->required();

  auto* charts = app.add_subcommand("charts", "CUSUM and network-statistic series for plotting");
  add_input(charts, o, false);
  add_bands(charts, o);
  add_index(charts, o);
  add_di(charts, o);
  charts->add_option("--source", o.source, "ei, di or both");
  charts->add_option("--out", o.out, "Output directory")->required();

  auto* pte = app.add_subcommand("pte", "Connectivity tensor and network statistics");
  add_input(pte, o, false);
  add_pte(pte, o);
  pte->add_option("--dump", o.dump, "Write the tensor dump here");
  pte->add_option("--out", o.out, "Output directory")->required();

  auto* ei = app.add_subcommand("ei", "Epileptogenic Index");
  add_input(ei, o, false);
  add_bands(ei, o);
  add_index(ei, o);
  ei->add_option("--out", o.out, "Output directory")->required();

  auto* di = app.add_subcommand("di", "Desynchronization Index");
  add_input(di, o, false);
  add_index(di, o);
  add_di(di, o);
  di->add_option("--dump", o.dump, "Write the tensor dump here");
  di->add_option("--out", o.out, "Output directory")->required();

  auto* detect = app.add_subcommand("detect", "EI, DI and both fusions in one pass");
  add_input(detect, o, false);
  add_bands(detect, o);
  add_index(detect, o);
  add_di(detect, o);
  add_override(detect, o, "--eta", "eta", "Detection threshold");
  detect->add_option("--out", o.out, "Output directory")->required();

  for (auto [name, help] : {std::pair{"eval", "Detection metrics against labeled channels"},
                            std::pair{"roc", "ROC over an M sweep"}}) {
    auto* sub = app.add_subcommand(name, help);
    add_input(sub, o, true);
    add_bands(sub, o);
    add_index(sub, o);
    add_di(sub, o);
    add_override(sub, o, "--eta", "eta", "Detection threshold");
    sub->add_option("--sweep", o.sweep, "M percent sweep lo:hi");
    sub->add_option("--out", o.out, "Output directory")->required();
  }

  auto* synth = app.add_subcommand("synth", "Generate a ground-truthed synthetic epoch");
  synth->add_option("--scenario", o.scenario, "Scenario file");
  synth->add_option("--benchmark-seed", o.benchmark_seed, "Use the 16-channel benchmark with this seed");
  synth->add_option("--event", o.event, "Benchmark event: desync-cut, hf-burst or none");
  synth->add_option("--out-rec", o.out_rec, "Output recording")->required();
  synth->add_option("--out-ann", o.out_ann, "Output annotation")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    Context ctx;
    std::string cmd = app.get_subcommands().front()->get_name();
    ctx.cfg = build_config(o, ctx);
    ctx.extra_config = "format=" + o.format + "\nbipolar=" + (o.bipolar ? "1" : "0") + "\nsweep=" + o.sweep +
                       "\nsource=" + o.source + "\n";
    Outputs outs;
    if (cmd == "ingest") cmd_ingest(o, ctx, outs, out);
    else if (cmd == "energy-series") cmd_energy(o, ctx, outs);
    else if (cmd == "charts") cmd_charts(o, ctx, outs);
    else if (cmd == "pte") cmd_pte(o, ctx, outs, out);
    else if (cmd == "ei") cmd_ei(o, ctx, outs);
    else if (cmd == "di") cmd_di(o, ctx, outs);
    else if (cmd == "detect") cmd_detect(o, ctx, outs, out);
    else if (cmd == "eval") cmd_eval(o, ctx, outs, out);
    else if (cmd == "roc") cmd_roc(o, ctx, outs, out);
    else if (cmd == "synth") cmd_synth(o, ctx, outs, out);
    outs.commit();
  } catch (const ValidationError& e) {
    return fail(err, e.what(), 1);
  } catch (const RuntimeError& e) {
    return fail(err, e.what(), 2);
  } catch (const std::exception& e) {
    return fail(err, e.what(), 2);
  }
  return 0;
}

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> storage = args;
  std::vector<char*> argv;
  for (auto& a : storage) argv.push_back(a.data());
  return run_command(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace desync::cli
