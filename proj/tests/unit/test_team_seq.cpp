#include <algorithm>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "teamflow/error.hpp"
#include "teamflow/io_util.hpp"
#include "teamflow/matcher.hpp"
#include "teamflow/stats.hpp"
#include "teamflow/synth.hpp"
#include "teamflow/team_seq.hpp"

using namespace teamflow;
namespace fs = std::filesystem;

namespace {

Event ev(EventType t, ActorId actor, const std::string& login, RepoId repo, UnixSeconds ts) {
    Event e;
    e.event_type = t;
    e.actor_id = actor;
    e.actor_login = login;
    e.repo_id = repo;
    e.created_at = ts;
    return e;
}

std::vector<EventType> random_events(std::mt19937& rng, std::size_t n) {
    std::vector<EventType> out(n);
    for (auto& t : out) t = kAllEventTypes[rng() % kAllEventTypes.size()];
    return out;
}

TeamSequence seq_of(std::size_t n) {
    TeamSequence s;
    s.symbols.assign(n, Symbol::PU);
    s.pre_reduction.assign(n, EventType::Push);
    return s;
}

}  // namespace

TEST_CASE("build_teams: bots and non-members removed, kind from any bot event") {
    const BotLabels labels = {{"dep-bot", bots::Label::Bot}, {"abbott", bots::Label::Human}};
    std::vector<Event> events = {
        ev(EventType::Push, 1, "A", 100, 1),         ev(EventType::IssueComment, 4, "dep-bot", 100, 2),
        ev(EventType::PullRequest, 2, "B", 100, 3),  ev(EventType::Watch, 3, "C", 100, 4),
        ev(EventType::IssueComment, 3, "C", 100, 5), ev(EventType::IssueComment, 1, "A", 100, 6),
        // repo with one member only
        ev(EventType::Push, 1, "A", 200, 7),         ev(EventType::IssueComment, 2, "B", 200, 8),
        // human-only team; the bot-named human counts as human
        ev(EventType::Push, 5, "abbott", 300, 9),    ev(EventType::Push, 6, "F", 300, 10),
    };
    const auto teams = build_teams(events, labels);
    REQUIRE(teams.size() == 2);

    const auto& t = teams[0];
    CHECK(t.repo_id == 100);
    CHECK(t.members == std::set<ActorId>{1, 2});
    CHECK(t.kind == TeamKind::HumanBot);
    std::vector<EventType> raw;
    for (const auto& e : t.raw_events) {
        CHECK(e.actor_login != "dep-bot");
        CHECK(e.actor_login != "C");
        raw.push_back(e.event_type);
    }
    CHECK(raw == std::vector<EventType>{EventType::Push, EventType::PullRequest, EventType::IssueComment});

    CHECK(teams[1].repo_id == 300);
    CHECK(teams[1].kind == TeamKind::HumanOnly);
}

TEST_CASE("build_teams: a bot's contributions never make it a member") {
    const BotLabels labels = {{"ci-bot", bots::Label::Bot}};
    std::vector<Event> events = {ev(EventType::Push, 1, "A", 1, 1), ev(EventType::Push, 9, "ci-bot", 1, 2),
                                 ev(EventType::PullRequest, 9, "ci-bot", 1, 3)};
    CHECK(build_teams(events, labels).empty());
}

TEST_CASE("reduce_alphabet") {
    using E = EventType;
    CHECK(reduce_alphabet(std::vector<E>{E::Push, E::IssueComment, E::Issues, E::Watch}) ==
          std::vector<Symbol>{Symbol::PU, Symbol::IS, Symbol::IS});
    CHECK(reduce_alphabet(std::vector<E>{}).empty());
    CHECK(reduce_alphabet(std::vector<E>{E::Fork, E::Gollum, E::Member}).empty());

    std::size_t kept = 0;
    for (auto t : kAllEventTypes) kept += reduce(t).has_value();
    CHECK(kept == 7);  // 7 types map onto 6 symbols, 7 are dropped

    std::mt19937 rng(2);
    for (int trial = 0; trial < 200; ++trial) {
        const auto a = random_events(rng, rng() % 20), b = random_events(rng, rng() % 20);
        auto ab = a;
        ab.insert(ab.end(), b.begin(), b.end());
        auto ra = reduce_alphabet(a);
        const auto rb = reduce_alphabet(b);
        CHECK(reduce_alphabet(ab).size() <= ab.size());
        ra.insert(ra.end(), rb.begin(), rb.end());
        CHECK(reduce_alphabet(ab) == ra);
    }
}

TEST_CASE("symbol codes") {
    CHECK(encode_symbols(std::vector<Symbol>{Symbol::PU, Symbol::PR, Symbol::IS, Symbol::CR, Symbol::DE, Symbol::RC}) ==
          "PRICDV");
    for (auto s : kAllSymbols) CHECK(parse_symbol_code(symbol_code(s)) == s);
    CHECK(decode_symbols("PRICDV").size() == 6);
    CHECK_THROWS_AS(decode_symbols("PX"), Error);
}

TEST_CASE("filter_short") {
    std::vector<TeamSequence> seqs = {seq_of(4), seq_of(5), seq_of(1)};
    const auto kept = filter_short(seqs);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].symbols.size() == 5);
    CHECK(filter_short(seqs, 1) == seqs);
    CHECK_THROWS_AS(filter_short(seqs, 0), Error);
}

TEST_CASE("frequency_vector") {
    using E = EventType;
    CHECK(frequency_vector(std::vector<E>{E::Push, E::Push, E::IssueComment}) == std::vector<double>{2, 0, 0, 1, 0, 0});
    CHECK(frequency_vector(std::vector<E>{}) == std::vector<double>(6, 0.0));
    CHECK(frequency_vector(std::vector<E>{E::PullRequestReviewComment, E::Issues}, true) ==
          std::vector<double>{0, 0, 1, 0, 0, 0, 1});
}

TEST_CASE("per-type medians of a three-team fixture") {
    auto team = [](std::vector<int> c) {
        using E = EventType;
        const E order[] = {E::Push, E::PullRequest, E::Issues, E::IssueComment, E::Create, E::Delete};
        std::vector<E> raw;
        for (std::size_t i = 0; i < 6; ++i) raw.insert(raw.end(), static_cast<std::size_t>(c[i]), order[i]);
        return frequency_vector(raw);
    };
    std::vector<std::vector<double>> group = {team({5, 3, 0, 2, 1, 0}), team({11, 9, 1, 6, 2, 1}),
                                              team({20, 15, 4, 9, 3, 2})};
    CHECK(matching::component_medians(group) == std::vector<double>{11, 9, 1, 6, 2, 1});
}

TEST_CASE("synthetic corpus: invariants") {
    synth::SynthSpec spec = synth::default_pipeline_spec(5);
    const auto corpus = synth::generate(spec);
    const auto teams = build_teams(corpus.events, corpus.truth);
    REQUIRE(!teams.empty());

    std::map<ActorId, std::string> login_of;
    for (const auto& e : corpus.events) login_of[e.actor_id] = e.actor_login;

    std::vector<double> total(6, 0.0);
    std::size_t hb = 0, ho = 0;
    for (const auto& t : teams) {
        CHECK(t.members.size() >= 2);
        (t.kind == TeamKind::HumanBot ? hb : ho)++;
        for (auto m : t.members) {
            const bool contributed = std::any_of(t.raw_events.begin(), t.raw_events.end(), [&](const Event& e) {
                return e.actor_id == m && is_contribution(e.event_type);
            });
            CHECK(contributed);
            auto it = corpus.truth.find(login_of[m]);
            CHECK((it == corpus.truth.end() || it->second == bots::Label::Human));
        }
        for (const auto& e : t.raw_events) CHECK(t.members.contains(e.actor_id));
        CHECK(std::is_sorted(t.raw_events.begin(), t.raw_events.end(),
                             [](const Event& a, const Event& b) { return a.created_at < b.created_at; }));
        const auto v = frequency_vector(make_sequence(t));
        for (std::size_t d = 0; d < 6; ++d) total[d] += v[d];
    }
    CHECK(hb + ho == teams.size());
    CHECK(hb > 0);
    CHECK(ho > 0);

    // column sums equal the member events of each type across all teams
    std::vector<double> expected(6, 0.0);
    std::map<RepoId, const Team*> by_repo;
    for (const auto& t : teams) by_repo[t.repo_id] = &t;
    for (const auto& e : corpus.events) {
        auto it = by_repo.find(e.repo_id);
        if (it == by_repo.end() || !it->second->members.contains(e.actor_id)) continue;
        for (std::size_t d = 0; d < 6; ++d) expected[d] += e.event_type == kFrequencyTypes[d];
    }
    CHECK(total == expected);
}

TEST_CASE("bundled sample: Push and PullRequest lead the proportions") {
    const auto events = read_events(fs::path(TEAMFLOW_SOURCE_DIR) / "data/sample/events.ndjson.gz");
    const auto rows = stats::proportions(events);
    REQUIRE(rows.size() >= 2);
    CHECK(rows[0].type == EventType::Push);
    CHECK(rows[1].type == EventType::PullRequest);
}

TEST_CASE("sequence CSV round trip") {
    const auto dir = fs::temp_directory_path() / "teamflow_test_team_seq";
    fs::create_directories(dir);
    std::vector<TeamSequence> seqs;
    std::mt19937 rng(7);
    for (RepoId r = 1; r <= 20; ++r) {
        TeamSequence s;
        s.repo_id = r * 3;
        s.kind = r % 3 ? TeamKind::HumanOnly : TeamKind::HumanBot;
        s.pre_reduction = random_events(rng, 5 + rng() % 30);
        s.symbols = reduce_alphabet(s.pre_reduction);
        seqs.push_back(s);
    }
    io::write_text(dir / "s.csv", render_sequences_csv(seqs));
    io::write_text(dir / "r.csv", render_raw_sequences_csv(seqs));
    CHECK(read_sequences(dir / "s.csv", dir / "r.csv") == seqs);

    io::write_text(dir / "bad.csv", "repo_id,kind,symbols\n3,human_only,PPPPP\n");
    CHECK_THROWS_AS(read_sequences(dir / "bad.csv", dir / "r.csv"), Error);
}
