#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace teamflow {

// The 14 raw GitHub event categories carried by the normalized stream.
enum class EventType : std::uint8_t {
    Push,
    PullRequest,
    Create,
    IssueComment,
    PullRequestReviewComment,
    Delete,
    Issues,
    Watch,
    Fork,
    Release,
    Gollum,
    Member,
    CommitComment,
    Public,
};

inline constexpr std::size_t kEventTypeCount = 14;

inline constexpr std::array<EventType, kEventTypeCount> kAllEventTypes = {
    EventType::Push,         EventType::PullRequest, EventType::Create,
    EventType::IssueComment, EventType::PullRequestReviewComment,
    EventType::Delete,       EventType::Issues,      EventType::Watch,
    EventType::Fork,         EventType::Release,     EventType::Gollum,
    EventType::Member,       EventType::CommitComment, EventType::Public,
};

std::string_view to_string(EventType type) noexcept;

// Throws UnknownEventType for anything outside the 14 names.
EventType parse_event_type(std::string_view name);

// True for the types that may carry a comment body.
constexpr bool is_comment_bearing(EventType type) noexcept {
    return type == EventType::IssueComment || type == EventType::PullRequestReviewComment ||
           type == EventType::CommitComment;
}

constexpr bool is_contribution(EventType type) noexcept {
    return type == EventType::Push || type == EventType::PullRequest;
}

using ActorId = std::int64_t;
using RepoId = std::int64_t;
using UnixSeconds = std::int64_t;

struct Event {
    EventType event_type = EventType::Push;
    ActorId actor_id = 0;
    std::string actor_login;
    RepoId repo_id = 0;
    UnixSeconds created_at = 0;
    bool org_owned_actor = false;
    std::optional<std::string> comment_body;

    friend bool operator==(const Event&, const Event&) = default;
};

// ISO-8601 / RFC 3339 timestamp: YYYY-MM-DD, T or space, HH:MM:SS[.fff], then Z or +HH:MM / -HH:MM.
// Fractional seconds are truncated. Throws InvalidTimestamp.
UnixSeconds parse_timestamp(std::string_view text);
std::string format_timestamp(UnixSeconds t);

// Parses one normalized record. `line_number` is used only in error messages.
Event parse_event_line(std::string_view line, std::size_t line_number = 0);

// Canonical single-line serialization (fixed key order, no trailing newline).
std::string serialize_event(const Event& event);

struct Diagnostic {
    std::size_t line_number = 0;
    std::string message;
};

struct StreamOptions {
    bool lenient = false;
    // Called for every skipped line in lenient mode. Defaults to stderr.
    std::function<void(const Diagnostic&)> on_diagnostic;
};

// Single-pass reader over newline-delimited records. Memory use is bounded by
// the longest line. Plain and gzip-compressed files are both accepted.
class EventStream {
public:
    // Reads from a file path; gzip detected by magic bytes.
    explicit EventStream(const std::filesystem::path& path, StreamOptions options = {});
    // Reads from an already-open stream (uncompressed).
    explicit EventStream(std::istream& input, StreamOptions options = {});
    ~EventStream();

    EventStream(EventStream&&) noexcept;
    EventStream& operator=(EventStream&&) noexcept;
    EventStream(const EventStream&) = delete;
    EventStream& operator=(const EventStream&) = delete;

    // Next event in file order, or nullopt at end of input.
    std::optional<Event> next();

    std::size_t lines_read() const noexcept { return line_number_; }
    std::size_t skipped() const noexcept { return skipped_; }

    class LineSource;

private:
    std::unique_ptr<LineSource> source_;
    StreamOptions options_;
    std::size_t line_number_ = 0;
    std::size_t skipped_ = 0;
    std::string line_;
};

// Convenience: whole-file parsing in one call.
std::vector<Event> read_events(const std::filesystem::path& path, StreamOptions options = {});
std::vector<Event> parse_events(std::string_view text, StreamOptions options = {});

struct ActivitySummary {
    std::set<ActorId> active_users;
    std::set<RepoId> active_repos;

    friend bool operator==(const ActivitySummary&, const ActivitySummary&) = default;
};

// An actor (repo) is active when it performed (received) at least one push or
// pull request event.
ActivitySummary filter_active(const std::vector<Event>& events);

// Stable sort by timestamp; ties keep input order.
void sort_by_time(std::vector<Event>& events);

}  // namespace teamflow
