#pragma once

// Append-only, replayable game event log.
//
// Line format (one JSON object per line, keys in this order):
//   seq, at, player, kind, then the kind's payload keys:
//     login            -
//     challenge_view   challenge
//     file_download    asset
//     flag_submission  challenge, text, verdict
//     hint_display     hint
//     hint_offer       challenge, hint
//     challenge_unlock challenge
//     feedback_submit  challenge, rating, [comment]
// `at` is ISO-8601 UTC with milliseconds. Unknown or missing keys are
// rejected on decode.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "flagtrail/model.hpp"

namespace flagtrail {

std::string encode_event(const GameEvent& event);
/// Throws Error(InvalidArgument) describing the first problem found.
GameEvent decode_event(std::string_view line);

/// Reads a whole log stream. Throws ImportError with the 1-based line number.
std::vector<GameEvent> read_event_log(std::istream& in);
std::vector<GameEvent> load_event_log(const std::filesystem::path& path);
std::size_t write_event_log(std::ostream& out, const std::vector<GameEvent>& events);

/// Durable line storage behind an EventStore. `write` must either persist the
/// whole line before returning or throw and leave earlier content intact.
class LogSink {
 public:
  virtual ~LogSink() = default;
  virtual void write(std::string_view line) = 0;
};

/// Appends to a file, flushing and fsyncing each line. A failed write is
/// rolled back by truncating to the previous length.
class FileSink final : public LogSink {
 public:
  explicit FileSink(std::filesystem::path path);
  ~FileSink() override;
  FileSink(const FileSink&) = delete;
  FileSink& operator=(const FileSink&) = delete;

  void write(std::string_view line) override;

 private:
  std::filesystem::path path_;
  int fd_ = -1;
};

struct EventFilter {
  std::vector<EventKind> kinds;  // empty: any kind
  std::optional<std::string> player_id;
  std::optional<std::string> challenge_id;
  std::optional<std::pair<Timestamp, Timestamp>> time_range;          // inclusive
  std::optional<std::pair<std::uint64_t, std::uint64_t>> seq_range;  // inclusive
};

class EventStore {
 public:
  /// Memory-only store.
  EventStore();
  explicit EventStore(std::unique_ptr<LogSink> sink);

  /// Opens (or creates) a log file, replaying its existing lines into memory.
  static std::unique_ptr<EventStore> open(const std::filesystem::path& path);

  /// Stamps seq = last + 1 and persists before returning.
  /// Throws Error(InvalidArgument) if `at` precedes the last event,
  /// Error(AppendFailed) if the sink fails (the log is then unchanged).
  std::uint64_t append(std::string player_id, EventPayload payload, Timestamp at);

  /// Throws Error(InvalidArgument) on inverted ranges.
  std::vector<GameEvent> query(const EventFilter& filter = {}) const;
  std::vector<GameEvent> since(std::uint64_t seq_exclusive) const;
  std::vector<GameEvent> snapshot() const;
  std::optional<GameEvent> at_seq(std::uint64_t seq) const;

  std::size_t size() const;
  std::uint64_t last_seq() const;
  std::optional<Timestamp> last_at() const;

  /// Asset and hint ids resolve to their challenge for `challenge_id` filters.
  void index_config(const GameConfig& config);
  void map_reference(const std::string& ref_id, const std::string& challenge_id);

  std::size_t export_to(std::ostream& out) const;
  /// Requires an empty store (Error(PreconditionViolation) otherwise). All
  /// lines are validated before any is stored; a bad line throws ImportError
  /// and leaves the store empty.
  std::size_t import_from(std::istream& in);

 private:
  bool matches(const GameEvent& e, const EventFilter& f) const;
  void load_existing(std::vector<GameEvent> events);

  mutable std::shared_mutex mutex_;
  std::unique_ptr<LogSink> sink_;
  std::vector<GameEvent> events_;
  std::map<std::string, std::string, std::less<>> reference_challenge_;
};

}  // namespace flagtrail
