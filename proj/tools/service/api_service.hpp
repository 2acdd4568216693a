#pragma once

// HTTP/JSON front end for one game.
//
// Authentication is `Authorization: Bearer <token>`. Errors are JSON objects
// {"error": <code>, "message": <text>}.
//
// Player endpoints
//   POST /api/login                        -> {"alias", "role"}               logs login
//   GET  /api/challenges                   -> [challenge summary]
//   GET  /api/challenges/{id}              -> challenge detail                 logs challenge_view
//   POST /api/challenges/{id}/submit       {"flag"} -> {"verdict", "points", "seq"}
//   GET  /api/assets/{id}                  -> file bytes                      logs file_download
//   POST /api/hints/{id}/display           -> {"hint", "challenge", "cost", "topic", "body"}
//   GET  /api/offers                       -> [{"challenge", "hint", "topic", "cost"}]
//   GET  /api/scoreboard                   -> [{"rank", "alias", "score", "last_solve_at"}]
//   POST /api/challenges/{id}/feedback     {"rating", "comment"?} -> {"seq"}
//
// Instructor endpoints (player tokens get 403)
//   GET  /api/admin/events?since_seq=N     -> {"events": [...], "last_seq"}
//   POST /api/admin/challenges/{id}/hints  {"topic", "cost", "body", "released_at"?} -> {"hint"}
//   GET  /api/admin/reports/{incidents|hints|metrics|correlations}[?format=text]
//   POST /api/admin/marks                  CSV body -> {"players", "columns"}
//   GET  /api/admin/export                 -> event log, one JSON object per line
//
// Submitted texts that equal a flag are replaced in the event feed by
// {"matches_flag_of": <challenge>}. The export endpoint returns the raw log.

#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "flagtrail/analytics.hpp"
#include "flagtrail/engine.hpp"
#include "flagtrail/event_store.hpp"
#include "flagtrail/model.hpp"

namespace httplib {
class Server;
}

namespace flagtrail {

struct ServiceOptions {
  /// Event log file; memory-only when absent. Hints added during the game
  /// are kept next to it in `<log>.hints.jsonl`.
  std::optional<std::filesystem::path> log_path;
  /// Asset files are read from `<asset_dir>/<filename>`.
  std::optional<std::filesystem::path> asset_dir;
  std::function<Timestamp()> clock;  // defaults to the system clock
  SpearmanOptions spearman;
};

std::filesystem::path hints_sidecar_path(const std::filesystem::path& log_path);
/// Adds the hints recorded in a sidecar file, if it exists.
void merge_sidecar_hints(GameConfig& config, const std::filesystem::path& path);

class ApiService {
 public:
  /// Throws Error(InvalidArgument) listing every violation for an invalid config.
  ApiService(GameConfig config, ServiceOptions options = {});
  ~ApiService();

  ApiService(const ApiService&) = delete;
  ApiService& operator=(const ApiService&) = delete;

  /// Port 0 picks a free port. Returns the bound port; throws Error(IoError) if busy.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  void run();
  void stop();

  Engine& engine() { return *engine_; }

 private:
  void routes();
  Timestamp now_locked() const;

  std::unique_ptr<EventStore> store_;
  std::unique_ptr<Engine> engine_;
  std::unique_ptr<httplib::Server> server_;
  ServiceOptions options_;
  std::optional<std::filesystem::path> hints_path_;
  mutable std::mutex writer_;
  std::mutex marks_mutex_;
  MarksTable marks_;
};

}  // namespace flagtrail
