#include "reports.hpp"

#include "cli.hpp"
#include "desync/text_io.hpp"

namespace desync::cli {

namespace {

std::string num(double v) { return format_double(v); }
const char* flag(bool b) { return b ? "1" : "0"; }

}  // namespace

std::string provenance_header(const Provenance& p) {
  std::string out;
  out += "# tool=desync " + std::string(tool_version()) + "\n";
  out += "# command=" + p.command + "\n";
  out += "# config_hash=" + p.config_hash + "\n";
  out += "# input_hash=" + p.input_hash + "\n";
  return out;
}

std::string energy_csv(const Provenance& p, const std::vector<EnergyRatioSeries>& series,
                       const std::vector<double>& times) {
  std::string out = provenance_header(p) + "channel,t,E\n";
  for (auto& s : series)
    for (std::size_t w = 0; w < s.values.size(); ++w) out += s.channel + "," + num(times[w]) + "," + num(s.values[w]) + "\n";
  return out;
}

std::string charts_csv(const Provenance& p, std::string_view chart, const std::vector<ChartSeries>& charts) {
  std::string out = provenance_header(p) + "channel,chart,t,value\n";
  for (auto& c : charts)
    for (std::size_t k = 0; k < c.values.size(); ++k)
      out += c.source + "," + std::string(chart) + "," + num(c.times[k]) + "," + num(c.values[k]) + "\n";
  return out;
}

std::string network_stats_csv(const Provenance& p, const NetworkStatsSeries& s, const std::vector<double>& times) {
  std::string out = provenance_header(p) + "t,p25,median,p75,p25_smooth,median_smooth,p75_smooth\n";
  for (std::size_t w = 0; w < times.size(); ++w)
    out += num(times[w]) + "," + num(s.p25[w]) + "," + num(s.median[w]) + "," + num(s.p75[w]) + "," +
           num(s.p25_smooth[w]) + "," + num(s.median_smooth[w]) + "," + num(s.p75_smooth[w]) + "\n";
  return out;
}

std::string scores_csv(const Provenance& p, const IndexScoreTable& table) {
  auto norm = normalize_scores(table);
  std::string out = provenance_header(p) +
                    "channel,raw_score,normalized,selected,activation_s,tonicity,peak_chart,baseline_mean,"
                    "baseline_std,degenerate_baseline\n";
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    auto& r = table.rows[i];
    out += r.channel + "," + num(r.raw_score) + "," + num(norm.normalized[i]) + "," + flag(r.selected) + "," +
           num(r.activation_time) + "," + num(r.tonicity) + "," + num(r.peak_chart) + "," + num(r.baseline_mean) +
           "," + num(r.baseline_std) + "," + flag(r.degenerate_baseline) + "\n";
  }
  return out;
}

std::string di_series_csv(const Provenance& p, const DesyncSeries& d, const std::vector<double>& times) {
  std::string out = provenance_header(p) +
                    "channel,t,D,n_in,n_out,psi_in,psi_in_expected,psi_out,psi_out_expected,guarded\n";
  const std::size_t nch = d.channels.size();
  for (std::size_t x = 0; x < nch; ++x)
    for (std::size_t w = 0; w < d.windows; ++w) {
      const std::size_t o = w * nch + x;
      auto& e = d.dens[o];
      out += d.channels[x] + "," + num(times[w]) + "," + num(d.level[o]) + "," + std::to_string(d.in_size[o]) + "," +
             std::to_string(d.out_size[o]) + "," + num(e.psi_in) + "," + num(e.psi_in_expected) + "," +
             num(e.psi_out) + "," + num(e.psi_out_expected) + "," + flag(d.guarded[o]) + "\n";
    }
  return out;
}

std::string detect_csv(const Provenance& p, const IndexScoreTable& ei, const IndexScoreTable& di,
                       const DetectionSets& sets) {
  auto en = normalize_scores(ei), dn = normalize_scores(di);
  std::string out = provenance_header(p) +
                    "channel,ei_raw,ei_normalized,ei_selected,ei_activation_s,ei_tonicity,ei_peak,"
                    "di_raw,di_normalized,di_selected,di_activation_s,di_tonicity,di_peak,"
                    "EI,DI,EI-and-DI,EI-or-DI\n";
  for (std::size_t i = 0; i < ei.rows.size(); ++i) {
    auto& a = ei.rows[i];
    auto& b = di.rows[i];
    const auto& c = a.channel;
    out += c + "," + num(a.raw_score) + "," + num(en.normalized[i]) + "," + flag(a.selected) + "," +
           num(a.activation_time) + "," + num(a.tonicity) + "," + num(a.peak_chart) + "," + num(b.raw_score) + "," +
           num(dn.normalized[i]) + "," + flag(b.selected) + "," + num(b.activation_time) + "," + num(b.tonicity) +
           "," + num(b.peak_chart) + "," + flag(sets.ei.count(c)) + "," + flag(sets.di.count(c)) + "," +
           flag(sets.both.count(c)) + "," + flag(sets.any.count(c)) + "\n";
  }
  return out;
}

std::string metrics_csv(const Provenance& p, const std::vector<PatientEval>& patients,
                        const std::vector<AggregateRow>& aggregate) {
  std::string out = provenance_header(p) + "patient,detector,m,eta,sensitivity,precision,accuracy,tp,fp,tn,fn,auc\n";
  for (auto& pe : patients)
    for (auto& r : pe.reports) {
      auto& c = r.metrics.counts;
      out += pe.label + "," + std::string(detector_name(r.detector)) + "," + std::to_string(r.m) + "," + num(r.eta) +
             "," + num(r.metrics.sensitivity) + "," + num(r.metrics.precision) + "," + num(r.metrics.accuracy) + "," +
             std::to_string(c.tp) + "," + std::to_string(c.fp) + "," + std::to_string(c.tn) + "," +
             std::to_string(c.fn) + "," + num(r.roc.auc) + "\n";
    }
  for (auto& a : aggregate) {
    auto& c = a.macro.counts;
    auto counts = std::to_string(c.tp) + "," + std::to_string(c.fp) + "," + std::to_string(c.tn) + "," +
                  std::to_string(c.fn);
    const std::string d(detector_name(a.detector));
    out += "macro," + d + ",,," + num(a.macro.sensitivity) + "," + num(a.macro.precision) + "," +
           num(a.macro.accuracy) + "," + counts + "," + num(a.macro_auc) + "\n";
    out += "micro," + d + ",,," + num(a.micro.sensitivity) + "," + num(a.micro.precision) + "," +
           num(a.micro.accuracy) + "," + counts + "," + num(a.micro_auc) + "\n";
  }
  return out;
}

std::string roc_csv(const Provenance& p, const std::vector<PatientEval>& patients) {
  std::string out = provenance_header(p) + "patient,detector,m_pct,m,fpr,tpr,tp,fp,tn,fn\n";
  for (auto& pe : patients)
    for (auto& r : pe.reports)
      for (auto& pt : r.roc.sweep) {
        auto& c = pt.counts;
        out += pe.label + "," + std::string(detector_name(r.detector)) + "," + num(pt.m_pct) + "," +
               std::to_string(pt.m) + "," + num(pt.fpr) + "," + num(pt.tpr) + "," + std::to_string(c.tp) + "," +
               std::to_string(c.fp) + "," + std::to_string(c.tn) + "," + std::to_string(c.fn) + "\n";
      }
  return out;
}

Summary::Summary(const Provenance& p) : text_(provenance_header(p)) {}

void Summary::add(std::string_view key, std::string_view value) {
  text_ += std::string(key) + "=" + std::string(value) + "\n";
}
void Summary::add(std::string_view key, double value) { add(key, std::string_view(num(value))); }
void Summary::add(std::string_view key, std::size_t value) { add(key, std::string_view(std::to_string(value))); }
void Summary::add_set(std::string_view key, const ChannelSet& set) {
  add(key, std::string_view(join(std::vector<std::string>(set.begin(), set.end()), ",")));
}

void summarize_table(Summary& s, std::string_view prefix, const IndexScoreTable& table) {
  const std::string p(prefix);
  s.add(p + ".m", table.m);
  std::vector<std::string> sel;
  for (auto idx : table.selected) sel.push_back(table.rows[idx].channel);
  s.add(p + ".selected", std::string_view(join(sel, ",")));
  s.add(p + ".selected_count", sel.size());
  for (auto& w : table.warnings) s.add(p + ".warning", std::string_view(w));
}

}  // namespace desync::cli
