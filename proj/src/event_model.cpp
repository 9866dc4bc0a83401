#include "teamflow/event_model.hpp"

#include <algorithm>
#include <iostream>
#include <sstream>
#include <type_traits>

#include <zlib.h>

#include "json.hpp"
#include "teamflow/error.hpp"

namespace teamflow {

namespace {

using nlohmann::json;

constexpr std::array<std::string_view, kEventTypeCount> kEventTypeNames = {
    "Push",    "PullRequest", "Create", "IssueComment", "PullRequestReviewComment",
    "Delete",  "Issues",      "Watch",  "Fork",         "Release",
    "Gollum",  "Member",      "CommitComment", "Public",
};

std::string where(std::size_t line_number) {
    return line_number ? "line " + std::to_string(line_number) + ": " : std::string{};
}

// Days since 1970-01-01 for a proleptic Gregorian date (Hinnant's algorithm).
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

bool is_leap(std::int64_t y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

unsigned days_in_month(std::int64_t y, unsigned m) {
    static constexpr unsigned kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return m == 2 && is_leap(y) ? 29 : kDays[m - 1];
}

template <typename T>
T required(const json& obj, const char* key, std::size_t line_number) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw Error(ErrorCode::MalformedRecord, where(line_number) + "missing key '" + key + "'");
    }
    bool ok = true;
    if constexpr (std::is_same_v<T, std::string>) ok = it->is_string();
    else if constexpr (std::is_same_v<T, bool>) ok = it->is_boolean();
    else ok = it->is_number_integer();
    if (!ok) throw Error(ErrorCode::MalformedRecord, where(line_number) + "wrong type for '" + key + "'");
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw Error(ErrorCode::MalformedRecord, where(line_number) + "wrong type for '" + key + "'");
    }
}

}  // namespace

std::string_view to_string(EventType type) noexcept {
    return kEventTypeNames[static_cast<std::size_t>(type)];
}

EventType parse_event_type(std::string_view name) {
    for (std::size_t i = 0; i < kEventTypeNames.size(); ++i) {
        if (kEventTypeNames[i] == name) return static_cast<EventType>(i);
    }
    throw Error(ErrorCode::UnknownEventType, "'" + std::string(name) + "'");
}

UnixSeconds parse_timestamp(std::string_view text) {
    auto fail = [&]() -> Error {
        return Error(ErrorCode::InvalidTimestamp, "'" + std::string(text) + "'");
    };
    auto digits = [&](std::size_t pos, std::size_t n) -> int {
        if (pos + n > text.size()) throw fail();
        int value = 0;
        for (std::size_t i = pos; i < pos + n; ++i) {
            if (text[i] < '0' || text[i] > '9') throw fail();
            value = value * 10 + (text[i] - '0');
        }
        return value;
    };
    auto expect = [&](std::size_t pos, char c) {
        if (pos >= text.size() || text[pos] != c) throw fail();
    };

    const int year = digits(0, 4);
    expect(4, '-');
    const int month = digits(5, 2);
    expect(7, '-');
    const int day = digits(8, 2);
    if (text.size() <= 10 || (text[10] != 'T' && text[10] != ' ')) throw fail();
    const int hour = digits(11, 2);
    expect(13, ':');
    const int minute = digits(14, 2);
    expect(16, ':');
    const int second = digits(17, 2);

    if (month < 1 || month > 12) throw fail();
    if (day < 1 || static_cast<unsigned>(day) > days_in_month(year, static_cast<unsigned>(month))) throw fail();
    if (hour > 23 || minute > 59 || second > 60) throw fail();

    std::size_t pos = 19;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        const std::size_t frac_start = pos;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
        if (pos == frac_start) throw fail();
    }
    std::int64_t offset = 0;
    if (pos < text.size() && (text[pos] == 'Z' || text[pos] == 'z')) {
        ++pos;
    } else if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
        const int sign = text[pos] == '+' ? 1 : -1;
        const int oh = digits(pos + 1, 2);
        expect(pos + 3, ':');
        const int om = digits(pos + 4, 2);
        if (oh > 23 || om > 59) throw fail();
        offset = sign * (oh * 3600 + om * 60);
        pos += 6;
    } else {
        throw fail();
    }
    if (pos != text.size()) throw fail();

    const std::int64_t days = days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day));
    return days * 86400 + hour * 3600 + minute * 60 + second - offset;
}

std::string format_timestamp(UnixSeconds t) {
    std::int64_t days = t >= 0 ? t / 86400 : (t - 86399) / 86400;
    std::int64_t secs = t - days * 86400;
    // civil_from_days
    days += 719468;
    const std::int64_t era = (days >= 0 ? days : days - 146096) / 146097;
    const auto doe = static_cast<unsigned>(days - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;
    y += m <= 2;

    char buf[96];
    std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ", static_cast<long long>(y), m, d,
                  static_cast<long long>(secs / 3600), static_cast<long long>(secs / 60 % 60),
                  static_cast<long long>(secs % 60));
    return buf;
}

Event parse_event_line(std::string_view line, std::size_t line_number) {
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::MalformedRecord, where(line_number) + e.what());
    }
    if (!obj.is_object()) throw Error(ErrorCode::MalformedRecord, where(line_number) + "record is not an object");

    Event ev;
    const auto type_name = required<std::string>(obj, "event_type", line_number);
    try {
        ev.event_type = parse_event_type(type_name);
    } catch (const Error&) {
        throw Error(ErrorCode::UnknownEventType, where(line_number) + "'" + type_name + "'");
    }
    ev.actor_id = required<std::int64_t>(obj, "actor_id", line_number);
    ev.actor_login = required<std::string>(obj, "actor_login", line_number);
    ev.repo_id = required<std::int64_t>(obj, "repo_id", line_number);
    const auto created = required<std::string>(obj, "created_at", line_number);
    try {
        ev.created_at = parse_timestamp(created);
    } catch (const Error&) {
        throw Error(ErrorCode::InvalidTimestamp, where(line_number) + "'" + created + "'");
    }
    ev.org_owned_actor = required<bool>(obj, "org_owned_actor", line_number);

    if (ev.actor_login.empty()) throw Error(ErrorCode::MalformedRecord, where(line_number) + "empty actor_login");
    if (ev.actor_id < 0 || ev.repo_id < 0) {
        throw Error(ErrorCode::MalformedRecord, where(line_number) + "negative id");
    }

    if (auto it = obj.find("comment_body"); it != obj.end() && !it->is_null()) {
        if (!it->is_string()) throw Error(ErrorCode::MalformedRecord, where(line_number) + "wrong type for 'comment_body'");
        if (!is_comment_bearing(ev.event_type)) {
            throw Error(ErrorCode::MalformedRecord,
                        where(line_number) + "comment_body not allowed on " + type_name + " events");
        }
        ev.comment_body = it->get<std::string>();
    }
    return ev;
}

std::string serialize_event(const Event& event) {
    // Schema key order, not nlohmann's alphabetical order.
    std::ostringstream out;
    out << "{\"event_type\":" << '"' << to_string(event.event_type) << '"'
        << ",\"actor_id\":" << event.actor_id
        << ",\"actor_login\":" << json(event.actor_login).dump(-1, ' ', false, json::error_handler_t::replace)
        << ",\"repo_id\":" << event.repo_id
        << ",\"created_at\":\"" << format_timestamp(event.created_at) << '"'
        << ",\"org_owned_actor\":" << (event.org_owned_actor ? "true" : "false");
    if (event.comment_body) {
        out << ",\"comment_body\":" << json(*event.comment_body).dump(-1, ' ', false, json::error_handler_t::replace);
    }
    out << '}';
    return out.str();
}

// ---------------------------------------------------------------------------

class EventStream::LineSource {
public:
    virtual ~LineSource() = default;
    // Reads the next line without its terminator. Returns false at EOF.
    virtual bool getline(std::string& line) = 0;
};

namespace {

class GzLineSource final : public EventStream::LineSource {
public:
    explicit GzLineSource(const std::filesystem::path& path) : file_(gzopen(path.c_str(), "rb")) {
        if (file_ == nullptr) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
        gzbuffer(file_, 1 << 17);
    }
    ~GzLineSource() override { gzclose(file_); }

    bool getline(std::string& line) override {
        line.clear();
        char buf[8192];
        while (true) {
            if (gzgets(file_, buf, sizeof(buf)) == nullptr) {
                int err = 0;
                gzerror(file_, &err);
                if (err != Z_OK && err != Z_BUF_ERROR) throw Error(ErrorCode::IoFailure, "gzip read error");
                return !line.empty();
            }
            line.append(buf);
            if (!line.empty() && line.back() == '\n') {
                line.pop_back();
                return true;
            }
        }
    }

private:
    gzFile file_;
};

class IstreamLineSource final : public EventStream::LineSource {
public:
    explicit IstreamLineSource(std::istream& in) : in_(in) {}
    bool getline(std::string& line) override {
        if (!std::getline(in_, line)) {
            if (in_.bad()) throw Error(ErrorCode::IoFailure, "stream read error");
            return false;
        }
        return true;
    }

private:
    std::istream& in_;
};

void default_diagnostic(const Diagnostic& d) {
    std::cerr << "warning: skipped line " << d.line_number << ": " << d.message << '\n';
}

}  // namespace

EventStream::EventStream(const std::filesystem::path& path, StreamOptions options)
    : source_(std::make_unique<GzLineSource>(path)), options_(std::move(options)) {
    if (!options_.on_diagnostic) options_.on_diagnostic = default_diagnostic;
}

EventStream::EventStream(std::istream& input, StreamOptions options)
    : source_(std::make_unique<IstreamLineSource>(input)), options_(std::move(options)) {
    if (!options_.on_diagnostic) options_.on_diagnostic = default_diagnostic;
}

EventStream::~EventStream() = default;
EventStream::EventStream(EventStream&&) noexcept = default;
EventStream& EventStream::operator=(EventStream&&) noexcept = default;

std::optional<Event> EventStream::next() {
    while (source_->getline(line_)) {
        ++line_number_;
        if (!line_.empty() && line_.back() == '\r') line_.pop_back();
        if (line_.find_first_not_of(" \t") == std::string::npos) continue;
        try {
            return parse_event_line(line_, line_number_);
        } catch (const Error& e) {
            if (!options_.lenient) throw;
            ++skipped_;
            options_.on_diagnostic(Diagnostic{line_number_, e.what()});
        }
    }
    return std::nullopt;
}

std::vector<Event> read_events(const std::filesystem::path& path, StreamOptions options) {
    EventStream stream(path, std::move(options));
    std::vector<Event> out;
    while (auto ev = stream.next()) out.push_back(std::move(*ev));
    return out;
}

std::vector<Event> parse_events(std::string_view text, StreamOptions options) {
    std::istringstream in{std::string(text)};
    EventStream stream(in, std::move(options));
    std::vector<Event> out;
    while (auto ev = stream.next()) out.push_back(std::move(*ev));
    return out;
}

ActivitySummary filter_active(const std::vector<Event>& events) {
    ActivitySummary summary;
    for (const auto& ev : events) {
        if (!is_contribution(ev.event_type)) continue;
        summary.active_users.insert(ev.actor_id);
        summary.active_repos.insert(ev.repo_id);
    }
    return summary;
}

void sort_by_time(std::vector<Event>& events) {
    std::stable_sort(events.begin(), events.end(),
                     [](const Event& a, const Event& b) { return a.created_at < b.created_at; });
}

}  // namespace teamflow
