#include <algorithm>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "teamflow/error.hpp"
#include "teamflow/event_model.hpp"
#include "teamflow/io_util.hpp"
#include "teamflow/stats.hpp"
#include "teamflow/synth.hpp"

using namespace teamflow;
namespace fs = std::filesystem;

namespace {

const char* kPush =
    R"({"event_type":"Push","actor_id":1,"actor_login":"alice","repo_id":9,"created_at":"2019-06-01T00:00:00Z","org_owned_actor":false})";

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::Internal;
}

Event ev(EventType t, ActorId actor, RepoId repo, UnixSeconds ts = 0) {
    Event e;
    e.event_type = t;
    e.actor_id = actor;
    e.actor_login = "u" + std::to_string(actor);
    e.repo_id = repo;
    e.created_at = ts;
    return e;
}

fs::path temp_file(const std::string& name) {
    auto dir = fs::temp_directory_path() / "teamflow_test_event_model";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("event types: 14 variants, closed set") {
    CHECK(kAllEventTypes.size() == 14);
    for (auto t : kAllEventTypes) CHECK(parse_event_type(to_string(t)) == t);
    CHECK(code_of([] { parse_event_type("Dance"); }) == ErrorCode::UnknownEventType);
    CHECK(code_of([] { parse_event_type("push"); }) == ErrorCode::UnknownEventType);
}

TEST_CASE("parse_event_line maps fields") {
    const auto e = parse_event_line(kPush);
    CHECK(e.event_type == EventType::Push);
    CHECK(e.actor_id == 1);
    CHECK(e.actor_login == "alice");
    CHECK(e.repo_id == 9);
    CHECK(e.created_at == 1559347200);
    CHECK_FALSE(e.org_owned_actor);
    CHECK_FALSE(e.comment_body.has_value());
}

TEST_CASE("parse_event_line: comment body, unknown keys, errors") {
    const auto c = parse_event_line(
        R"({"event_type":"IssueComment","actor_id":2,"actor_login":"bob","repo_id":3,"created_at":"2019-06-01T00:00:01Z","org_owned_actor":true,"comment_body":"LGTM","extra":[1,2]})");
    REQUIRE(c.comment_body.has_value());
    CHECK(*c.comment_body == "LGTM");
    CHECK(c.org_owned_actor);

    CHECK(code_of([] {
              parse_event_line(
                  R"({"event_type":"Dance","actor_id":1,"actor_login":"a","repo_id":9,"created_at":"2019-06-01T00:00:00Z","org_owned_actor":false})");
          }) == ErrorCode::UnknownEventType);
    CHECK(code_of([] { parse_event_line("{not json"); }) == ErrorCode::MalformedRecord);
    CHECK(code_of([] { parse_event_line("[1,2]"); }) == ErrorCode::MalformedRecord);
    CHECK(code_of([] {
              parse_event_line(
                  R"({"event_type":"Push","actor_id":1,"actor_login":"a","repo_id":9,"created_at":"2019-13-01T00:00:00Z","org_owned_actor":false})");
          }) == ErrorCode::InvalidTimestamp);
    // missing key, negative id, empty login, string id
    CHECK(code_of([] {
              parse_event_line(R"({"event_type":"Push","actor_id":1,"actor_login":"a","repo_id":9,"org_owned_actor":false})");
          }) == ErrorCode::MalformedRecord);
    CHECK(code_of([] {
              parse_event_line(
                  R"({"event_type":"Push","actor_id":-1,"actor_login":"a","repo_id":9,"created_at":"2019-06-01T00:00:00Z","org_owned_actor":false})");
          }) == ErrorCode::MalformedRecord);
    CHECK(code_of([] {
              parse_event_line(
                  R"({"event_type":"Push","actor_id":1,"actor_login":"","repo_id":9,"created_at":"2019-06-01T00:00:00Z","org_owned_actor":false})");
          }) == ErrorCode::MalformedRecord);
    CHECK(code_of([] {
              parse_event_line(
                  R"({"event_type":"Push","actor_id":"1","actor_login":"a","repo_id":9,"created_at":"2019-06-01T00:00:00Z","org_owned_actor":false})");
          }) == ErrorCode::MalformedRecord);
    // comment body on a non-comment type
    CHECK(code_of([] {
              parse_event_line(
                  R"({"event_type":"Push","actor_id":1,"actor_login":"a","repo_id":9,"created_at":"2019-06-01T00:00:00Z","org_owned_actor":false,"comment_body":"x"})");
          }) == ErrorCode::MalformedRecord);
}

TEST_CASE("errors carry the line number") {
    try {
        parse_event_line("{", 17);
        FAIL("no throw");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("17") != std::string::npos);
    }
}

TEST_CASE("timestamps") {
    CHECK(parse_timestamp("1970-01-01T00:00:00Z") == 0);
    CHECK(parse_timestamp("2019-06-01T00:00:00Z") == 1559347200);
    CHECK(parse_timestamp("2019-06-01T02:00:00+02:00") == 1559347200);
    CHECK(parse_timestamp("2019-05-31T23:00:00-01:00") == 1559347200);
    CHECK(parse_timestamp("2019-06-01T00:00:00.999Z") == 1559347200);
    CHECK(parse_timestamp("2020-02-29T12:00:00Z") == 1582977600);
    for (const char* bad : {"2019-02-29T00:00:00Z", "2019-06-01X00:00:00Z", "2019-06-01T24:00:00Z", "2019-06-01T00:00:00",
                            "", "2019-6-1T00:00:00Z"}) {
        const std::string shown = bad;
        CAPTURE(shown);
        CHECK(code_of([&] { parse_timestamp(bad); }) == ErrorCode::InvalidTimestamp);
    }
    std::mt19937_64 rng(5);
    for (int i = 0; i < 500; ++i) {
        const auto t = static_cast<UnixSeconds>(rng() % 4000000000ULL);
        CHECK(parse_timestamp(format_timestamp(t)) == t);
    }
}

TEST_CASE("serialize/parse round trip") {
    Event e = ev(EventType::CommitComment, 4, 5, 1559347200);
    e.actor_login = "weird \"login\" \\ é";
    e.comment_body = "line1\nline2\t\"quoted\" ✓";
    e.org_owned_actor = true;
    CHECK(parse_event_line(serialize_event(e)) == e);
}

TEST_CASE("stream: empty, ordered, lenient diagnostics, strict abort") {
    CHECK(parse_events("").empty());
    const std::string three = std::string(kPush) + "\n" + kPush + "\n" + kPush + "\n";
    CHECK(parse_events(three).size() == 3);

    std::vector<Diagnostic> diags;
    StreamOptions lenient;
    lenient.lenient = true;
    lenient.on_diagnostic = [&](const Diagnostic& d) { diags.push_back(d); };
    const std::string mixed = std::string(kPush) + "\n{broken\n" + kPush + "\n";
    CHECK(parse_events(mixed, lenient).size() == 2);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].line_number == 2);

    CHECK(code_of([&] { parse_events(mixed); }) == ErrorCode::MalformedRecord);
}

TEST_CASE("stream preserves file order and matches whole-file parsing, plain and gzip") {
    synth::SynthSpec spec = synth::default_pipeline_spec(11);
    spec.groups[0].n_teams = 5;
    spec.groups[1].n_teams = 10;
    spec.standalone_accounts = 5;
    auto events = synth::generate(spec).events;
    std::reverse(events.begin(), events.end());  // file order is not time order
    std::string text;
    for (const auto& e : events) text += serialize_event(e) + "\n";

    const auto plain = temp_file("events.ndjson");
    const auto gz = temp_file("events.ndjson.gz");
    io::write_text(plain, text);
    io::write_gzip(gz, text);

    CHECK(parse_events(text) == events);
    CHECK(read_events(plain) == events);
    CHECK(read_events(gz) == events);

    EventStream stream(gz);
    std::size_t n = 0;
    while (auto e = stream.next()) {
        CHECK(*e == events[n]);
        ++n;
    }
    CHECK(n == events.size());
    CHECK(stream.lines_read() == events.size());

    CHECK(code_of([] { read_events(temp_file("does-not-exist.ndjson")); }) == ErrorCode::IoFailure);
}

TEST_CASE("filter_active") {
    std::vector<Event> events = {ev(EventType::Watch, 1, 10), ev(EventType::Push, 2, 11), ev(EventType::Fork, 3, 12),
                                 ev(EventType::PullRequest, 4, 10), ev(EventType::IssueComment, 5, 11)};
    const auto a = filter_active(events);
    CHECK(a.active_users == std::set<ActorId>{2, 4});
    CHECK(a.active_repos == std::set<RepoId>{10, 11});
    CHECK_FALSE(a.active_repos.contains(12));  // only Fork

    // order independence
    std::mt19937 rng(1);
    for (int i = 0; i < 10; ++i) {
        std::shuffle(events.begin(), events.end(), rng);
        CHECK(filter_active(events) == a);
    }
    // idempotence: restricting to active actors' events changes nothing
    std::vector<Event> kept;
    for (const auto& e : events) {
        if (a.active_users.contains(e.actor_id)) kept.push_back(e);
    }
    CHECK(filter_active(kept) == a);
}

TEST_CASE("sort_by_time is stable") {
    std::vector<Event> events = {ev(EventType::Push, 1, 1, 5), ev(EventType::Push, 2, 1, 3), ev(EventType::Push, 3, 1, 5),
                                 ev(EventType::Push, 4, 1, 3)};
    sort_by_time(events);
    std::vector<ActorId> order;
    for (const auto& e : events) order.push_back(e.actor_id);
    CHECK(order == std::vector<ActorId>{2, 4, 1, 3});
}

TEST_CASE("bundled sample: proportions sum to 100%") {
    const fs::path sample = fs::path(TEAMFLOW_SOURCE_DIR) / "data/sample/events.ndjson.gz";
    REQUIRE(fs::exists(sample));
    const auto events = read_events(sample);
    CHECK(events.size() > 5000);
    double total = 0.0;
    for (const auto& r : stats::proportions(events)) total += r.percent;
    CHECK(total == doctest::Approx(100.0).epsilon(0.001));
}
