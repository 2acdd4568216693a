#include "api_service.hpp"

#include <httplib.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "flagtrail/config_io.hpp"
#include "flagtrail/error.hpp"
#include "flagtrail/reports.hpp"
#include "json.hpp"

namespace flagtrail {

namespace {

using nlohmann::json;

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::ImportFailed: return 400;
    case ErrorCode::AuthFailure: return 401;
    case ErrorCode::Forbidden: return 403;
    case ErrorCode::NotFound: return 404;
    case ErrorCode::RejectedLocked:
    case ErrorCode::PreconditionViolation: return 409;
    case ErrorCode::AppendFailed: return 503;
    case ErrorCode::ConsistencyViolation:
    case ErrorCode::IoError: return 500;
  }
  return 500;
}

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, ErrorCode code, const std::string& message) {
  send_json(res, {{"error", to_string(code)}, {"message", message}}, status_for(code));
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  auto body = json::parse(req.body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) throw Error(ErrorCode::InvalidArgument, "request body must be a JSON object");
  return body;
}

std::string bearer(const httplib::Request& req) {
  const auto header = req.get_header_value("Authorization");
  static const std::string prefix = "Bearer ";
  if (header.compare(0, prefix.size(), prefix) != 0) throw Error(ErrorCode::AuthFailure, "missing bearer token");
  return header.substr(prefix.size());
}

json hint_json(const HintSummary& h) {
  return {{"id", h.hint_id}, {"cost", h.cost}, {"topic", h.topic_label}, {"displayed", h.displayed}};
}

json summary_json(const ChallengeSummary& s) {
  json hints = json::array();
  for (const auto& h : s.hints) hints.push_back(hint_json(h));
  return {{"id", s.challenge_id}, {"title", s.title},   {"category", to_string(s.category)},
          {"points", s.points},   {"solved", s.solved}, {"hints", hints}};
}

std::vector<Hint> load_sidecar_hints(const std::filesystem::path& path) {
  std::vector<Hint> hints;
  std::ifstream in(path);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    auto j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ImportError(n, "malformed hint record in " + path.string());
    Hint h;
    h.challenge_id = j.at("challenge").get<std::string>();
    h.hint_id = j.at("id").get<std::string>();
    h.cost = j.at("cost").get<int>();
    h.topic_label = j.at("topic").get<std::string>();
    h.body = j.at("body").get<std::string>();
    h.released_at = parse_timestamp(j.at("released_at").get<std::string>());
    hints.push_back(std::move(h));
  }
  return hints;
}

std::string sidecar_line(const Hint& h) {
  json j;
  j["challenge"] = h.challenge_id;
  j["id"] = h.hint_id;
  j["cost"] = h.cost;
  j["topic"] = h.topic_label;
  j["body"] = h.body;
  j["released_at"] = format_timestamp(*h.released_at);
  return j.dump() + "\n";
}

}  // namespace

void merge_sidecar_hints(GameConfig& config, const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) return;
  for (auto& h : load_sidecar_hints(path)) {
    auto* c = config.find_challenge(h.challenge_id);
    if (!c) throw Error(ErrorCode::InvalidArgument, "hint sidecar names unknown challenge '" + h.challenge_id + "'");
    c->hints.push_back(std::move(h));
  }
}

std::filesystem::path hints_sidecar_path(const std::filesystem::path& log_path) {
  auto p = log_path;
  p += ".hints.jsonl";
  return p;
}

ApiService::ApiService(GameConfig config, ServiceOptions options)
    : server_(std::make_unique<httplib::Server>()), options_(std::move(options)) {
  if (!options_.clock) {
    options_.clock = [] { return std::chrono::time_point_cast<Duration>(std::chrono::system_clock::now()); };
  }
  if (options_.log_path) {
    hints_path_ = hints_sidecar_path(*options_.log_path);
    merge_sidecar_hints(config, *hints_path_);
  }
  if (const auto violations = validate_config(config); !violations.empty()) {
    std::string msg = "invalid game definition:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw Error(ErrorCode::InvalidArgument, msg);
  }
  store_ = options_.log_path ? EventStore::open(*options_.log_path) : std::make_unique<EventStore>();
  engine_ = std::make_unique<Engine>(std::move(config), *store_);
  if (options_.asset_dir) {
    engine_->set_asset_source([dir = *options_.asset_dir](const FileAsset& a) {
      const auto path = dir / a.filename;
      if (!std::filesystem::exists(path)) throw Error(ErrorCode::NotFound, "asset file missing for '" + a.asset_id + "'");
      return read_file(path);
    });
  }
  if (hints_path_) {
    engine_->set_hint_listener([path = *hints_path_](const Hint& h) {
      std::ofstream out(path, std::ios::app);
      out << sidecar_line(h);
      out.flush();
      if (!out) throw Error(ErrorCode::AppendFailed, "could not persist hint '" + h.hint_id + "'");
    });
  }
  routes();
}

ApiService::~ApiService() { stop(); }

int ApiService::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = server_->bind_to_any_port(host);
    if (bound < 0) throw Error(ErrorCode::IoError, "cannot bind " + host);
    return bound;
  }
  if (!server_->bind_to_port(host, port)) {
    throw Error(ErrorCode::IoError, "cannot listen on " + host + ":" + std::to_string(port));
  }
  return port;
}

void ApiService::run() { server_->listen_after_bind(); }

void ApiService::stop() {
  if (server_) server_->stop();
}

Timestamp ApiService::now_locked() const {
  const auto now = options_.clock();
  const auto last = store_->last_at();
  return last && *last > now ? *last : now;
}

void ApiService::routes() {
  auto& srv = *server_;
  srv.set_payload_max_length(8 << 20);
  // httplib defaults to SO_REUSEPORT, which lets a second server share a busy port.
  srv.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });

  // Wraps a handler with authentication and error mapping.
  using Handler = std::function<void(const PlayerRecord&, const httplib::Request&, httplib::Response&)>;
  auto player = [this](Handler h) {
    return [this, h](const httplib::Request& req, httplib::Response& res) {
      try {
        const auto who = engine_->authenticate(bearer(req));
        h(who, req, res);
      } catch (const Error& e) {
        send_error(res, e.code(), e.what());
      } catch (const json::exception& e) {
        send_error(res, ErrorCode::InvalidArgument, e.what());
      } catch (const std::logic_error& e) {
        send_error(res, ErrorCode::InvalidArgument, e.what());
      }
    };
  };
  auto instructor = [player](Handler h) {
    return player([h](const PlayerRecord& who, const httplib::Request& req, httplib::Response& res) {
      if (who.role != Role::Instructor) throw Error(ErrorCode::Forbidden, "instructor token required");
      h(who, req, res);
    });
  };

  srv.Post("/api/login", player([this](const PlayerRecord& who, const httplib::Request&, httplib::Response& res) {
             std::lock_guard lock(writer_);
             engine_->login(who.player_id, now_locked());
             send_json(res, {{"alias", alias_for(who.player_id, engine_->config().anonymization_salt)},
                             {"role", to_string(who.role)}});
           }));

  srv.Get("/api/challenges", player([this](const PlayerRecord& who, const httplib::Request&, httplib::Response& res) {
            json out = json::array();
            for (const auto& s : engine_->visible_challenges(who.player_id, options_.clock())) {
              out.push_back(summary_json(s));
            }
            send_json(res, out);
          }));

  srv.Get(R"(/api/challenges/([^/]+))",
          player([this](const PlayerRecord& who, const httplib::Request& req, httplib::Response& res) {
            std::lock_guard lock(writer_);
            const auto d = engine_->view_challenge(who.player_id, req.matches[1].str(), now_locked());
            auto out = summary_json(d.summary);
            out["description"] = d.description;
            out["assets"] = json::array();
            for (const auto& a : d.assets) out["assets"].push_back({{"id", a.asset_id}, {"filename", a.filename}});
            send_json(res, out);
          }));

  srv.Post(R"(/api/challenges/([^/]+)/submit)",
           player([this](const PlayerRecord& who, const httplib::Request& req, httplib::Response& res) {
             const auto body = parse_body(req);
             if (!body.contains("flag") || !body["flag"].is_string()) {
               throw Error(ErrorCode::InvalidArgument, "body needs a string 'flag'");
             }
             std::lock_guard lock(writer_);
             const auto r = engine_->submit_flag(who.player_id, req.matches[1].str(), body["flag"].get<std::string>(),
                                                 now_locked());
             send_json(res, {{"verdict", to_string(r.verdict)}, {"points", r.points_awarded}, {"seq", r.seq}});
           }));

  srv.Get(R"(/api/assets/([^/]+))",
          player([this](const PlayerRecord& who, const httplib::Request& req, httplib::Response& res) {
            std::lock_guard lock(writer_);
            const auto d = engine_->download_asset(who.player_id, req.matches[1].str(), now_locked());
            res.set_header("Content-Disposition", "attachment; filename=\"" + d.asset.filename + "\"");
            res.set_content(d.bytes, "application/octet-stream");
          }));

  srv.Post(R"(/api/hints/([^/]+)/display)",
           player([this](const PlayerRecord& who, const httplib::Request& req, httplib::Response& res) {
             std::lock_guard lock(writer_);
             const auto id = req.matches[1].str();
             const auto body = engine_->display_hint(who.player_id, id, now_locked());
             const auto cfg = engine_->config();
             const auto* h = cfg.find_hint(id);
             send_json(res, {{"hint", id},
                             {"challenge", h->challenge_id},
                             {"cost", h->cost},
                             {"topic", h->topic_label},
                             {"body", body}});
           }));

  srv.Get("/api/offers", player([this](const PlayerRecord& who, const httplib::Request&, httplib::Response& res) {
            std::lock_guard lock(writer_);
            const auto offers = engine_->pending_hint_offers(who.player_id, now_locked());
            const auto cfg = engine_->config();
            json out = json::array();
            for (const auto& o : offers) {
              const auto* h = cfg.find_hint(o.hint_id);
              out.push_back({{"challenge", o.challenge_id}, {"hint", o.hint_id}, {"topic", h->topic_label}, {"cost", h->cost}});
            }
            send_json(res, out);
          }));

  srv.Get("/api/scoreboard", player([this](const PlayerRecord&, const httplib::Request&, httplib::Response& res) {
            json out = json::array();
            for (const auto& e : engine_->scoreboard()) {
              out.push_back({{"rank", e.rank},
                             {"alias", e.alias},
                             {"score", e.score},
                             {"last_solve_at", e.last_solve_at ? json(format_timestamp(*e.last_solve_at)) : json()}});
            }
            send_json(res, out);
          }));

  srv.Post(R"(/api/challenges/([^/]+)/feedback)",
           player([this](const PlayerRecord& who, const httplib::Request& req, httplib::Response& res) {
             const auto body = parse_body(req);
             if (!body.contains("rating") || !body["rating"].is_number_integer()) {
               throw Error(ErrorCode::InvalidArgument, "body needs an integer 'rating'");
             }
             std::optional<std::string> comment;
             if (body.contains("comment") && !body["comment"].is_null()) comment = body["comment"].get<std::string>();
             std::lock_guard lock(writer_);
             const auto seq = engine_->record_feedback(who.player_id, req.matches[1].str(), body["rating"].get<int>(),
                                                       std::move(comment), now_locked());
             send_json(res, {{"seq", seq}});
           }));

  // Instructor

  srv.Get("/api/admin/events", instructor([this](const PlayerRecord&, const httplib::Request& req, httplib::Response& res) {
            std::uint64_t since = 0;
            if (req.has_param("since_seq")) {
              try {
                since = std::stoull(req.get_param_value("since_seq"));
              } catch (const std::exception&) {
                throw Error(ErrorCode::InvalidArgument, "since_seq must be a non-negative integer");
              }
            }
            const auto cfg = engine_->config();
            json events = json::array();
            for (const auto& e : engine_->store().since(since)) {
              auto j = json::parse(encode_event(e));
              if (const auto* s = e.as<FlagSubmissionPayload>()) {
                for (const auto& c : cfg.challenges) {
                  if (flag_matches(c, s->submitted_text)) {
                    j["text"] = {{"matches_flag_of", c.challenge_id}};
                    break;
                  }
                }
              }
              events.push_back(std::move(j));
            }
            send_json(res, {{"events", events}, {"last_seq", engine_->store().last_seq()}});
          }));

  srv.Post(R"(/api/admin/challenges/([^/]+)/hints)",
           instructor([this](const PlayerRecord& who, const httplib::Request& req, httplib::Response& res) {
             const auto body = parse_body(req);
             Hint h;
             h.topic_label = body.value("topic", std::string{});
             h.cost = body.value("cost", 0);
             h.body = body.value("body", std::string{});
             if (body.contains("released_at") && !body["released_at"].is_null()) {
               h.released_at = parse_timestamp(body["released_at"].get<std::string>());
             }
             std::lock_guard lock(writer_);
             const auto id = engine_->add_hint(who.player_id, req.matches[1].str(), std::move(h), now_locked());
             send_json(res, {{"hint", id}}, 201);
           }));

  srv.Get(R"(/api/admin/reports/([a-z_-]+))",
          instructor([this](const PlayerRecord&, const httplib::Request& req, httplib::Response& res) {
            const auto name = req.matches[1].str();
            ReportKind kind;
            if (name == "incidents") kind = ReportKind::Incidents;
            else if (name == "hints") kind = ReportKind::HintLatency;
            else if (name == "metrics") kind = ReportKind::Metrics;
            else if (name == "correlations") kind = ReportKind::Correlations;
            else throw Error(ErrorCode::NotFound, "unknown report '" + name + "'");
            AnalysisOptions opts;
            opts.reports = {kind};
            opts.spearman = options_.spearman;
            const bool text = req.get_param_value("format") == "text";
            opts.format = text ? ReportFormat::Text : ReportFormat::Json;
            if (req.has_param("window")) opts.window = parse_duration(req.get_param_value("window"));
            if (req.has_param("min_displays")) opts.min_displays = std::stoul(req.get_param_value("min_displays"));
            {
              std::lock_guard lock(marks_mutex_);
              opts.marks = marks_;
            }
            const auto files = run_analysis(engine_->store().snapshot(), engine_->config(), opts);
            res.set_content(files.begin()->second, text ? "text/plain" : "application/json");
          }));

  srv.Post("/api/admin/marks", instructor([this](const PlayerRecord&, const httplib::Request& req, httplib::Response& res) {
             auto marks = parse_marks_csv(req.body);
             const json out{{"players", marks.rows.size()}, {"columns", marks.columns}};
             {
               std::lock_guard lock(marks_mutex_);
               marks_ = std::move(marks);
             }
             send_json(res, out);
           }));

  srv.Get("/api/admin/export", instructor([this](const PlayerRecord&, const httplib::Request&, httplib::Response& res) {
            std::ostringstream out;
            engine_->store().export_to(out);
            res.set_content(out.str(), "application/x-ndjson");
          }));
}

}  // namespace flagtrail
