#include "flagtrail/event_store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <set>

#include "flagtrail/error.hpp"
#include "json.hpp"

namespace flagtrail {

namespace {

using ojson = nlohmann::ordered_json;
using json = nlohmann::json;

struct PayloadWriter {
  ojson& j;
  void operator()(const LoginPayload&) const {}
  void operator()(const ChallengeViewPayload& p) const { j["challenge"] = p.challenge_id; }
  void operator()(const FileDownloadPayload& p) const { j["asset"] = p.asset_id; }
  void operator()(const FlagSubmissionPayload& p) const {
    j["challenge"] = p.challenge_id;
    j["text"] = p.submitted_text;
    j["verdict"] = to_string(p.verdict);
  }
  void operator()(const HintDisplayPayload& p) const { j["hint"] = p.hint_id; }
  void operator()(const HintOfferPayload& p) const {
    j["challenge"] = p.challenge_id;
    j["hint"] = p.hint_id;
  }
  void operator()(const ChallengeUnlockPayload& p) const { j["challenge"] = p.challenge_id; }
  void operator()(const FeedbackPayload& p) const {
    j["challenge"] = p.challenge_id;
    j["rating"] = p.rating;
    if (p.comment) j["comment"] = *p.comment;
  }
};

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::InvalidArgument, msg); }

const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) bad(std::string("missing field '") + key + "'");
  return *it;
}

std::string str_field(const json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_string()) bad(std::string("field '") + key + "' must be a string");
  auto s = v.get<std::string>();
  if (s.empty() && std::strcmp(key, "text") != 0 && std::strcmp(key, "comment") != 0) {
    bad(std::string("field '") + key + "' is empty");
  }
  return s;
}

EventPayload decode_payload(EventKind kind, const json& j, std::set<std::string>& allowed) {
  auto take = [&](const char* key) {
    allowed.insert(key);
    return str_field(j, key);
  };
  switch (kind) {
    case EventKind::Login: return LoginPayload{};
    case EventKind::ChallengeView: return ChallengeViewPayload{take("challenge")};
    case EventKind::FileDownload: return FileDownloadPayload{take("asset")};
    case EventKind::FlagSubmission: {
      FlagSubmissionPayload p;
      p.challenge_id = take("challenge");
      p.submitted_text = take("text");
      p.verdict = parse_verdict(take("verdict"));
      return p;
    }
    case EventKind::HintDisplay: return HintDisplayPayload{take("hint")};
    case EventKind::HintOffer: {
      HintOfferPayload p;
      p.challenge_id = take("challenge");
      p.hint_id = take("hint");
      return p;
    }
    case EventKind::ChallengeUnlock: return ChallengeUnlockPayload{take("challenge")};
    case EventKind::FeedbackSubmit: {
      FeedbackPayload p;
      p.challenge_id = take("challenge");
      allowed.insert("rating");
      const auto& r = field(j, "rating");
      if (!r.is_number_integer()) bad("field 'rating' must be an integer");
      p.rating = r.get<int>();
      if (p.rating < 1 || p.rating > 5) bad("field 'rating' must be within 1-5");
      if (j.contains("comment")) p.comment = take("comment");
      return p;
    }
  }
  bad("unhandled kind");
}

}  // namespace

std::string encode_event(const GameEvent& e) {
  ojson j;
  j["seq"] = e.seq;
  j["at"] = format_timestamp(e.at);
  j["player"] = e.player_id;
  j["kind"] = to_string(e.kind());
  std::visit(PayloadWriter{j}, e.payload);
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

GameEvent decode_event(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error&) {
    bad("not a JSON object");
  }
  if (!j.is_object()) bad("not a JSON object");
  GameEvent e;
  const auto& seq = field(j, "seq");
  if (!seq.is_number_unsigned() || seq.get<std::uint64_t>() == 0) bad("field 'seq' must be a positive integer");
  e.seq = seq.get<std::uint64_t>();
  e.at = parse_timestamp(str_field(j, "at"));
  e.player_id = str_field(j, "player");
  const EventKind kind = parse_event_kind(str_field(j, "kind"));
  std::set<std::string> allowed{"seq", "at", "player", "kind"};
  e.payload = decode_payload(kind, j, allowed);
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) bad("unknown field '" + key + "' for kind " + to_string(kind));
  }
  return e;
}

std::vector<GameEvent> read_event_log(std::istream& in) {
  std::vector<GameEvent> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      throw ImportError(lineno, "empty line");
    }
    GameEvent e;
    try {
      e = decode_event(line);
    } catch (const Error& err) {
      throw ImportError(lineno, err.what());
    }
    if (!out.empty()) {
      if (e.seq <= out.back().seq) throw ImportError(lineno, "seq not strictly increasing");
      if (e.at < out.back().at) throw ImportError(lineno, "timestamp decreases");
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<GameEvent> load_event_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read '" + path.string() + "'");
  try {
    return read_event_log(in);
  } catch (const ImportError& e) {
    throw ImportError(e.line(), path.string() + ": " + e.detail());
  }
}

std::size_t write_event_log(std::ostream& out, const std::vector<GameEvent>& events) {
  for (const auto& e : events) out << encode_event(e) << '\n';
  return events.size();
}

// ---------------------------------------------------------------------------

FileSink::FileSink(std::filesystem::path path) : path_(std::move(path)) {
  fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) throw Error(ErrorCode::IoError, "cannot open '" + path_.string() + "': " + std::strerror(errno));
}

FileSink::~FileSink() {
  if (fd_ >= 0) ::close(fd_);
}

void FileSink::write(std::string_view line) {
  const off_t before = ::lseek(fd_, 0, SEEK_END);
  std::string buf(line);
  buf.push_back('\n');
  std::size_t done = 0;
  while (done < buf.size()) {
    const ssize_t n = ::write(fd_, buf.data() + done, buf.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      const std::string reason = std::strerror(errno);
      if (before >= 0) (void)!::ftruncate(fd_, before);
      throw Error(ErrorCode::AppendFailed, "write to '" + path_.string() + "' failed: " + reason);
    }
    done += static_cast<std::size_t>(n);
  }
  if (::fdatasync(fd_) != 0) {
    const std::string reason = std::strerror(errno);
    if (before >= 0) (void)!::ftruncate(fd_, before);
    throw Error(ErrorCode::AppendFailed, "sync of '" + path_.string() + "' failed: " + reason);
  }
}

// ---------------------------------------------------------------------------

EventStore::EventStore() = default;

EventStore::EventStore(std::unique_ptr<LogSink> sink) : sink_(std::move(sink)) {}

std::unique_ptr<EventStore> EventStore::open(const std::filesystem::path& path) {
  std::vector<GameEvent> existing;
  if (std::filesystem::exists(path)) existing = load_event_log(path);
  auto store = std::make_unique<EventStore>(std::make_unique<FileSink>(path));
  store->load_existing(std::move(existing));
  return store;
}

void EventStore::load_existing(std::vector<GameEvent> events) {
  std::unique_lock lock(mutex_);
  events_ = std::move(events);
}

std::uint64_t EventStore::append(std::string player_id, EventPayload payload, Timestamp at) {
  std::unique_lock lock(mutex_);
  if (!events_.empty() && at < events_.back().at) {
    throw Error(ErrorCode::InvalidArgument, "event time precedes the last appended event");
  }
  GameEvent e;
  e.seq = events_.empty() ? 1 : events_.back().seq + 1;
  e.at = at;
  e.player_id = std::move(player_id);
  e.payload = std::move(payload);
  if (sink_) {
    try {
      sink_->write(encode_event(e));
    } catch (const Error& err) {
      if (err.code() == ErrorCode::AppendFailed) throw;
      throw Error(ErrorCode::AppendFailed, err.what());
    } catch (const std::exception& err) {
      throw Error(ErrorCode::AppendFailed, err.what());
    }
  }
  events_.push_back(std::move(e));
  return events_.back().seq;
}

bool EventStore::matches(const GameEvent& e, const EventFilter& f) const {
  if (!f.kinds.empty() && std::find(f.kinds.begin(), f.kinds.end(), e.kind()) == f.kinds.end()) return false;
  if (f.player_id && e.player_id != *f.player_id) return false;
  if (f.time_range && (e.at < f.time_range->first || e.at > f.time_range->second)) return false;
  if (f.seq_range && (e.seq < f.seq_range->first || e.seq > f.seq_range->second)) return false;
  if (f.challenge_id) {
    if (const auto* cid = e.challenge_id()) return *cid == *f.challenge_id;
    const std::string* ref = nullptr;
    if (const auto* d = e.as<FileDownloadPayload>()) ref = &d->asset_id;
    if (const auto* h = e.as<HintDisplayPayload>()) ref = &h->hint_id;
    if (!ref) return false;
    auto it = reference_challenge_.find(*ref);
    return it != reference_challenge_.end() && it->second == *f.challenge_id;
  }
  return true;
}

std::vector<GameEvent> EventStore::query(const EventFilter& filter) const {
  if (filter.time_range && filter.time_range->second < filter.time_range->first) {
    throw Error(ErrorCode::InvalidArgument, "inverted time range");
  }
  if (filter.seq_range && filter.seq_range->second < filter.seq_range->first) {
    throw Error(ErrorCode::InvalidArgument, "inverted seq range");
  }
  std::shared_lock lock(mutex_);
  std::vector<GameEvent> out;
  for (const auto& e : events_) {
    if (matches(e, filter)) out.push_back(e);
  }
  return out;
}

std::vector<GameEvent> EventStore::since(std::uint64_t seq_exclusive) const {
  std::shared_lock lock(mutex_);
  auto it = std::upper_bound(events_.begin(), events_.end(), seq_exclusive,
                             [](std::uint64_t s, const GameEvent& e) { return s < e.seq; });
  return {it, events_.end()};
}

std::vector<GameEvent> EventStore::snapshot() const {
  std::shared_lock lock(mutex_);
  return events_;
}

std::optional<GameEvent> EventStore::at_seq(std::uint64_t seq) const {
  std::shared_lock lock(mutex_);
  auto it = std::lower_bound(events_.begin(), events_.end(), seq,
                             [](const GameEvent& e, std::uint64_t s) { return e.seq < s; });
  if (it == events_.end() || it->seq != seq) return std::nullopt;
  return *it;
}

std::size_t EventStore::size() const {
  std::shared_lock lock(mutex_);
  return events_.size();
}

std::uint64_t EventStore::last_seq() const {
  std::shared_lock lock(mutex_);
  return events_.empty() ? 0 : events_.back().seq;
}

std::optional<Timestamp> EventStore::last_at() const {
  std::shared_lock lock(mutex_);
  if (events_.empty()) return std::nullopt;
  return events_.back().at;
}

void EventStore::index_config(const GameConfig& config) {
  std::unique_lock lock(mutex_);
  for (const auto& c : config.challenges) {
    for (const auto& a : c.assets) reference_challenge_[a.asset_id] = c.challenge_id;
    for (const auto& h : c.hints) reference_challenge_[h.hint_id] = c.challenge_id;
  }
}

void EventStore::map_reference(const std::string& ref_id, const std::string& challenge_id) {
  std::unique_lock lock(mutex_);
  reference_challenge_[ref_id] = challenge_id;
}

std::size_t EventStore::export_to(std::ostream& out) const {
  std::shared_lock lock(mutex_);
  return write_event_log(out, events_);
}

std::size_t EventStore::import_from(std::istream& in) {
  std::unique_lock lock(mutex_);
  if (!events_.empty()) throw Error(ErrorCode::PreconditionViolation, "import requires an empty store");
  auto events = read_event_log(in);
  if (sink_) {
    for (const auto& e : events) {
      try {
        sink_->write(encode_event(e));
      } catch (const std::exception& err) {
        throw Error(ErrorCode::AppendFailed, err.what());
      }
    }
  }
  events_ = std::move(events);
  return events_.size();
}

}  // namespace flagtrail
