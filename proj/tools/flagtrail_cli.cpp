// flagtrail command-line entry points: serve, analyze, synth, validate.

#include <CLI11.hpp>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "flagtrail/config_io.hpp"
#include "flagtrail/error.hpp"
#include "flagtrail/event_store.hpp"
#include "flagtrail/reports.hpp"
#include "flagtrail/synth.hpp"
#include "service/api_service.hpp"

namespace fs = std::filesystem;
using namespace flagtrail;

namespace {

ApiService* g_service = nullptr;

void on_signal(int) {
  if (g_service) g_service->stop();
}

GameConfig load_game(const std::string& config_path, const std::string& secrets_path) {
  auto config = load_config(config_path);
  if (!secrets_path.empty()) apply_secrets(config, load_secrets(secrets_path));
  return config;
}

std::pair<std::string, int> split_listen(const std::string& addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos) throw Error(ErrorCode::InvalidArgument, "listen address must be host:port");
  const auto host = addr.substr(0, colon);
  int port = 0;
  try {
    port = std::stoi(addr.substr(colon + 1));
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidArgument, "bad port in '" + addr + "'");
  }
  return {host.empty() ? "0.0.0.0" : host, port};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flagtrail: CTF game engine, event log and analytics"};
  app.require_subcommand(1);

  std::string config_path, secrets_path;

  auto* serve = app.add_subcommand("serve", "Run the HTTP/JSON game service");
  std::string listen = "127.0.0.1:8080", log_path, asset_dir;
  serve->add_option("--config", config_path, "Game definition (YAML)")->required()->check(CLI::ExistingFile);
  serve->add_option("--secrets", secrets_path, "Flags and tokens (YAML)")->check(CLI::ExistingFile);
  serve->add_option("--listen", listen, "host:port");
  serve->add_option("--log", log_path, "Event log file (default: <game_id>.events.jsonl)");
  serve->add_option("--assets", asset_dir, "Directory holding asset files (default: next to the config)");

  auto* analyze = app.add_subcommand("analyze", "Compute reports from an event log");
  std::string reports = "all", out_dir, marks_path, window, session_gap, format = "json";
  std::size_t min_displays = 11, permutations = 10'000;
  std::uint64_t seed = SpearmanOptions{}.seed;
  bool strict_downloads = false;
  analyze->add_option("--log", log_path, "Event log (JSONL)")->required();
  analyze->add_option("--config", config_path, "Game definition (YAML)")->required();
  analyze->add_option("--secrets", secrets_path, "Flags and tokens (YAML)");
  analyze->add_option("--reports", reports, "incidents,hint-latency,metrics,correlations,plots or all");
  analyze->add_option("--out", out_dir, "Output directory")->required();
  analyze->add_option("--marks", marks_path, "External marks CSV");
  analyze->add_option("--window", window, "Time-vicinity window, e.g. 10m");
  analyze->add_option("--min-displays", min_displays, "Minimum displays for a hint to be reported");
  analyze->add_option("--session-gap", session_gap, "Inactivity gap that ends a session, e.g. 30m");
  analyze->add_option("--seed", seed, "Permutation test seed");
  analyze->add_option("--permutations", permutations, "Permutation test resamples");
  analyze->add_option("--format", format, "json or text")->check(CLI::IsMember({"json", "text"}));
  analyze->add_flag("--strict-downloads", strict_downloads, "Require every required asset, not just one");

  auto* synth = app.add_subcommand("synth", "Generate a labeled synthetic event log");
  std::string spec_path;
  synth->add_option("--spec", spec_path, "Cohort spec (YAML)")->required();
  synth->add_option("--config", config_path, "Game definition (YAML)")->required();
  synth->add_option("--secrets", secrets_path, "Flags and tokens (YAML)");
  synth->add_option("--out", out_dir, "Output directory")->required();

  auto* validate = app.add_subcommand("validate", "Check a game definition");
  validate->add_option("--config", config_path, "Game definition (YAML)")->required();
  validate->add_option("--secrets", secrets_path, "Flags and tokens (YAML)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) {
      const auto config = load_game(config_path, secrets_path);
      auto violations = validate_config(config);
      if (secrets_path.empty()) {
        // A published definition carries no flags or tokens.
        std::erase_if(violations, [](const std::string& v) {
          return v.ends_with("flag is empty") || v.ends_with("auth_token is empty");
        });
      }
      for (const auto& v : violations) std::cerr << config_path << ": " << v << "\n";
      if (!violations.empty()) return 1;
      std::cout << config_path << ": ok (" << config.challenges.size() << " challenges, " << config.chains.size()
                << " chains, " << config.players.size() << " accounts)\n";
      return 0;
    }

    if (*serve) {
      auto config = load_game(config_path, secrets_path);
      ServiceOptions opts;
      opts.log_path = log_path.empty() ? fs::path(config.game_id + ".events.jsonl") : fs::path(log_path);
      opts.asset_dir = asset_dir.empty() ? fs::absolute(config_path).parent_path() : fs::path(asset_dir);
      const auto [host, port] = split_listen(listen);
      ApiService service(std::move(config), opts);
      const int bound = service.bind(host, port);
      g_service = &service;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cout << "listening on " << host << ":" << bound << ", log " << opts.log_path->string() << std::endl;
      service.run();
      g_service = nullptr;
      return 0;
    }

    if (*analyze) {
      auto config = load_game(config_path, secrets_path);
      merge_sidecar_hints(config, hints_sidecar_path(log_path));
      std::vector<GameEvent> log;
      std::ifstream in(log_path, std::ios::binary);
      if (!in) throw Error(ErrorCode::IoError, "cannot read '" + log_path + "'");
      try {
        log = read_event_log(in);
      } catch (const ImportError& e) {
        std::cerr << "error: " << log_path << ":" << e.line() << ": " << e.detail() << "\n";
        return 1;
      }
      AnalysisOptions opts;
      opts.reports = parse_report_list(reports);
      opts.format = format == "text" ? ReportFormat::Text : ReportFormat::Json;
      if (!window.empty()) opts.window = parse_duration(window);
      if (!session_gap.empty()) opts.session_gap = parse_duration(session_gap);
      opts.min_displays = min_displays;
      opts.spearman = {permutations, seed};
      opts.download_rule = strict_downloads ? DownloadRule::AllRequired : DownloadRule::AnyRequired;
      if (!marks_path.empty()) {
        try {
          opts.marks = parse_marks_csv(read_file(marks_path));
        } catch (const ImportError& e) {
          std::cerr << "error: " << marks_path << ":" << e.line() << ": " << e.detail() << "\n";
          return 1;
        }
      }
      const auto files = run_analysis(log, config, opts);
      fs::create_directories(out_dir);
      for (const auto& [name, content] : files) write_file(fs::path(out_dir) / name, content);
      for (const auto& [name, content] : files) std::cout << (fs::path(out_dir) / name).string() << "\n";
      return 0;
    }

    if (*synth) {
      const auto config = load_game(config_path, secrets_path);
      const auto spec = parse_cohort_spec(read_file(spec_path));
      const auto result = generate(spec, config);
      fs::create_directories(out_dir);
      std::ostringstream events;
      write_event_log(events, result.log);
      write_file(fs::path(out_dir) / "events.jsonl", events.str());
      write_file(fs::path(out_dir) / "ground_truth.jsonl", encode_incident_keys(result.truth.expected));
      std::cout << result.log.size() << " events, " << result.truth.expected.size() << " planted incidents -> "
                << out_dir << "\n";
      return 0;
    }
  } catch (const ImportError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
