#include "flagtrail/reports.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "flagtrail/error.hpp"
#include "json.hpp"

namespace flagtrail {

namespace {

using ojson = nlohmann::ordered_json;

std::string fixed(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

ojson summary_json(const DistributionSummary& s) {
  ojson j;
  j["min"] = s.min;
  j["q1"] = s.q1;
  j["median"] = s.median;
  j["q3"] = s.q3;
  j["max"] = s.max;
  j["mean"] = s.mean;
  return j;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell.push_back(c);
    }
  }
  out.push_back(cell);
  for (auto& s : out) {
    const auto first = s.find_first_not_of(" \t");
    const auto last = s.find_last_not_of(" \t");
    s = first == std::string::npos ? std::string{} : s.substr(first, last - first + 1);
  }
  return out;
}

}  // namespace

std::string incidents_json(const std::vector<Incident>& incidents) {
  ojson arr = ojson::array();
  for (const auto& inc : incidents) {
    ojson j;
    j["kind"] = to_string(inc.kind);
    j["severity"] = to_string(inc.severity);
    j["players"] = inc.players;
    j["challenge"] = inc.challenge_id;
    if (!inc.related_challenge_id.empty()) j["related_challenge"] = inc.related_challenge_id;
    j["at"] = format_timestamp(inc.at);
    if (inc.delta) j["delta_seconds"] = to_seconds(*inc.delta);
    if (inc.threshold) j["threshold_seconds"] = to_seconds(*inc.threshold);
    j["event_seqs"] = inc.event_seqs;
    arr.push_back(std::move(j));
  }
  ojson doc;
  doc["incident_count"] = incidents.size();
  doc["incidents"] = std::move(arr);
  return dump(doc);
}

std::string incidents_text(const std::vector<Incident>& incidents) {
  std::ostringstream out;
  out << "Incidents: " << incidents.size() << "\n";
  for (const auto& inc : incidents) {
    out << "[" << to_string(inc.severity) << "] " << to_string(inc.kind) << " " << inc.challenge_id;
    if (!inc.related_challenge_id.empty()) out << " (related " << inc.related_challenge_id << ")";
    out << " players=";
    for (std::size_t i = 0; i < inc.players.size(); ++i) out << (i ? "," : "") << inc.players[i];
    out << " at=" << format_timestamp(inc.at);
    if (inc.delta) out << " delta=" << format_duration(*inc.delta);
    if (inc.threshold) out << " threshold=" << format_duration(*inc.threshold);
    out << " seqs=";
    for (std::size_t i = 0; i < inc.event_seqs.size(); ++i) out << (i ? "," : "") << inc.event_seqs[i];
    out << "\n";
  }
  return out.str();
}

std::string hint_latency_json(const std::vector<HintLatencyStats>& stats) {
  ojson arr = ojson::array();
  for (const auto& s : stats) {
    ojson j;
    j["hint"] = s.hint_id;
    j["challenge"] = s.challenge_id;
    j["display_count"] = s.display_count;
    j["latency_count"] = s.latencies.size();
    if (s.seconds) j["latency_seconds"] = summary_json(*s.seconds);
    ojson lat = ojson::array();
    for (const auto& [player, d] : s.latencies) lat.push_back({{"player", player}, {"seconds", to_seconds(d)}});
    j["latencies"] = std::move(lat);
    arr.push_back(std::move(j));
  }
  ojson doc;
  doc["hints"] = std::move(arr);
  return dump(doc);
}

std::string hint_latency_text(const std::vector<HintLatencyStats>& stats) {
  std::ostringstream out;
  out << "hint\tchallenge\tdisplays\tsolved_after\tmedian_s\tmean_s\tq1_s\tq3_s\n";
  for (const auto& s : stats) {
    out << s.hint_id << "\t" << s.challenge_id << "\t" << s.display_count << "\t" << s.latencies.size();
    if (s.seconds) {
      out << "\t" << fixed(s.seconds->median) << "\t" << fixed(s.seconds->mean) << "\t" << fixed(s.seconds->q1) << "\t"
          << fixed(s.seconds->q3);
    } else {
      out << "\t-\t-\t-\t-";
    }
    out << "\n";
  }
  return out.str();
}

std::string metrics_json(const std::vector<PlayerMetrics>& metrics) {
  ojson arr = ojson::array();
  for (const auto& m : metrics) {
    ojson j;
    j["player"] = m.player_id;
    j["total_score"] = m.total_score;
    j["bonus_inclusive_score"] = m.bonus_inclusive_score;
    j["wrong_flag_count"] = m.wrong_flag_count;
    j["session_duration_seconds"] = to_seconds(m.session_duration);
    if (m.first_to_last_solve) j["first_to_last_solve_seconds"] = to_seconds(*m.first_to_last_solve);
    else j["first_to_last_solve_seconds"] = nullptr;
    arr.push_back(std::move(j));
  }
  ojson doc;
  doc["players"] = std::move(arr);
  return dump(doc);
}

std::string metrics_text(const std::vector<PlayerMetrics>& metrics) {
  std::ostringstream out;
  out << "player\ttotal\tbonus_inclusive\twrong_flags\tsession\tfirst_to_last_solve\n";
  for (const auto& m : metrics) {
    out << m.player_id << "\t" << m.total_score << "\t" << m.bonus_inclusive_score << "\t" << m.wrong_flag_count
        << "\t" << format_duration(m.session_duration) << "\t"
        << (m.first_to_last_solve ? format_duration(*m.first_to_last_solve) : "-") << "\n";
  }
  return out.str();
}

std::string correlations_json(const CorrelationReport& report) {
  ojson doc;
  doc["alpha"] = report.alpha;
  doc["variables"] = report.variables;
  ojson arr = ojson::array();
  for (const auto& e : report.entries) {
    ojson j;
    j["x"] = e.result.variable_x;
    j["y"] = e.result.variable_y;
    j["n"] = e.result.n;
    if (e.masked) {
      j["masked"] = true;
      j["reason"] = e.reason;
    } else {
      j["masked"] = false;
      j["rho"] = e.result.rho;
      j["p_value"] = e.result.p_value;
    }
    arr.push_back(std::move(j));
  }
  doc["entries"] = std::move(arr);
  return dump(doc);
}

std::string correlations_text(const CorrelationReport& report) {
  std::ostringstream out;
  out << "Significant rank correlations (p <= " << fixed(report.alpha, 2) << ")\n";
  std::size_t shown = 0;
  for (const auto& e : report.entries) {
    if (e.masked) continue;
    ++shown;
    out << e.result.variable_x << " ~ " << e.result.variable_y << ": rho=" << fixed(e.result.rho, 3)
        << " p=" << fixed(e.result.p_value, 4) << " n=" << e.result.n << "\n";
  }
  if (!shown) out << "(none)\n";
  return out.str();
}

std::string vicinity_curve_csv(const std::vector<VicinityCurvePoint>& curve) {
  std::ostringstream out;
  out << "challenge_id,window_minutes,cumulative_pairs\n";
  for (const auto& p : curve) out << p.challenge_id << "," << p.window_minutes << "," << p.cumulative_pairs << "\n";
  return out.str();
}

std::string chain_deltas_csv(const std::vector<ChainDelta>& deltas) {
  std::ostringstream out;
  out << "chain_id,from_challenge,to_challenge,player_id,delta_seconds,min_solve_seconds\n";
  for (const auto& d : deltas) {
    out << d.chain_id << "," << d.from_challenge << "," << d.to_challenge << "," << d.player_id << ","
        << fixed(to_seconds(d.delta)) << "," << fixed(to_seconds(d.min_solve)) << "\n";
  }
  return out.str();
}

std::string hint_latency_csv(const std::vector<HintLatencyStats>& stats) {
  std::ostringstream out;
  out << "hint_id,challenge_id,player_id,latency_seconds\n";
  for (const auto& s : stats) {
    for (const auto& [player, d] : s.latencies) {
      out << s.hint_id << "," << s.challenge_id << "," << player << "," << fixed(to_seconds(d)) << "\n";
    }
  }
  return out.str();
}

MarksTable parse_marks_csv(const std::string& text) {
  MarksTable table;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv_line(line);
    if (table.columns.empty() && lineno == 1) {
      if (cells.empty() || cells[0] != "player_id") throw ImportError(lineno, "header must start with player_id");
      if (cells.size() < 2) throw ImportError(lineno, "no mark columns");
      table.columns.assign(cells.begin() + 1, cells.end());
      continue;
    }
    if (cells.size() != table.columns.size() + 1) throw ImportError(lineno, "wrong number of cells");
    if (cells[0].empty()) throw ImportError(lineno, "empty player_id");
    if (table.rows.count(cells[0])) throw ImportError(lineno, "duplicate player_id '" + cells[0] + "'");
    auto& row = table.rows[cells[0]];
    for (std::size_t i = 1; i < cells.size(); ++i) {
      if (cells[i].empty()) continue;
      try {
        std::size_t used = 0;
        const double v = std::stod(cells[i], &used);
        if (used != cells[i].size() || !std::isfinite(v)) throw std::invalid_argument("trailing");
        row[table.columns[i - 1]] = v;
      } catch (const std::exception&) {
        throw ImportError(lineno, "not a number: '" + cells[i] + "'");
      }
    }
  }
  if (table.columns.empty()) throw ImportError(1, "missing header");
  return table;
}

std::string encode_incident_keys(const std::vector<IncidentKey>& keys) {
  std::string out;
  for (const auto& k : keys) {
    ojson j;
    j["kind"] = to_string(k.kind);
    j["players"] = k.players;
    j["challenge"] = k.challenge_id;
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<IncidentKey> decode_incident_keys(const std::string& text) {
  std::vector<IncidentKey> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      IncidentKey k;
      k.kind = parse_incident_kind(j.at("kind").get<std::string>());
      k.players = j.at("players").get<std::vector<std::string>>();
      k.challenge_id = j.at("challenge").get<std::string>();
      if (j.size() != 3) throw Error(ErrorCode::InvalidArgument, "unexpected fields");
      out.push_back(std::move(k));
    } catch (const std::exception& e) {
      throw ImportError(lineno, e.what());
    }
  }
  return out;
}

std::set<ReportKind> parse_report_list(const std::string& comma_separated) {
  std::set<ReportKind> out;
  for (const auto& raw : split_csv_line(comma_separated)) {
    if (raw == "incidents") out.insert(ReportKind::Incidents);
    else if (raw == "hint-latency" || raw == "hints") out.insert(ReportKind::HintLatency);
    else if (raw == "metrics") out.insert(ReportKind::Metrics);
    else if (raw == "correlations") out.insert(ReportKind::Correlations);
    else if (raw == "plots") out.insert(ReportKind::Plots);
    else if (raw == "all") out.insert({ReportKind::Incidents, ReportKind::HintLatency, ReportKind::Metrics,
                                       ReportKind::Correlations, ReportKind::Plots});
    else throw Error(ErrorCode::InvalidArgument, "unknown report '" + raw + "'");
  }
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, "no reports selected");
  return out;
}

std::map<std::string, std::string> run_analysis(const std::vector<GameEvent>& log, const GameConfig& config,
                                                const AnalysisOptions& options) {
  std::map<std::string, std::string> files;
  const bool text = options.format == ReportFormat::Text;
  const std::string ext = text ? ".txt" : ".json";
  const Duration window = options.window.value_or(config.vicinity_window);
  const auto& r = options.reports;

  if (r.count(ReportKind::Incidents)) {
    IncidentReportOptions io;
    io.window = window;
    io.download_rule = options.download_rule;
    const auto incidents = incident_report(log, config, io);
    files["incidents" + ext] = text ? incidents_text(incidents) : incidents_json(incidents);
  }
  if (r.count(ReportKind::HintLatency)) {
    const auto stats = hint_latency_report(log, config, options.min_displays);
    files["hint_latency" + ext] = text ? hint_latency_text(stats) : hint_latency_json(stats);
  }
  std::vector<PlayerMetrics> metrics;
  if (r.count(ReportKind::Metrics) || r.count(ReportKind::Correlations)) {
    metrics = player_metrics(log, config, options.session_gap);
  }
  if (r.count(ReportKind::Metrics)) files["metrics" + ext] = text ? metrics_text(metrics) : metrics_json(metrics);
  if (r.count(ReportKind::Correlations)) {
    const auto report = correlation_report(metrics, options.marks, options.spearman);
    files["correlations" + ext] = text ? correlations_text(report) : correlations_json(report);
  }
  if (r.count(ReportKind::Plots)) {
    files["vicinity_pairs.csv"] = vicinity_curve_csv(detect_time_vicinity(log, window).curve);
    files["chain_deltas.csv"] = chain_deltas_csv(detect_quick_chain_solves(log, config).deltas);
    files["hint_latency.csv"] = hint_latency_csv(hint_latency_report(log, config, options.min_displays));
  }
  return files;
}

}  // namespace flagtrail
