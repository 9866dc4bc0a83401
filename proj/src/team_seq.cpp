#include "teamflow/team_seq.hpp"

#include <algorithm>
#include <unordered_map>

#include "teamflow/error.hpp"
#include "teamflow/io_util.hpp"

namespace teamflow {

const char* to_string(TeamKind kind) noexcept { return kind == TeamKind::HumanBot ? "human_bot" : "human_only"; }

TeamKind parse_team_kind(std::string_view s) {
    if (s == "human_bot") return TeamKind::HumanBot;
    if (s == "human_only") return TeamKind::HumanOnly;
    throw Error(ErrorCode::MalformedRecord, "unknown team kind '" + std::string(s) + "'");
}

const char* to_string(Symbol s) noexcept {
    static constexpr const char* kNames[] = {"PU", "PR", "IS", "RC", "CR", "DE"};
    return kNames[static_cast<std::size_t>(s)];
}

char symbol_code(Symbol s) noexcept {
    static constexpr char kCodes[] = {'P', 'R', 'I', 'V', 'C', 'D'};
    return kCodes[static_cast<std::size_t>(s)];
}

Symbol parse_symbol_code(char c) {
    for (Symbol s : kAllSymbols) {
        if (symbol_code(s) == c) return s;
    }
    throw Error(ErrorCode::MalformedRecord, std::string("unknown symbol code '") + c + "'");
}

std::string encode_symbols(std::span<const Symbol> symbols) {
    std::string out;
    out.reserve(symbols.size());
    for (Symbol s : symbols) out.push_back(symbol_code(s));
    return out;
}

std::vector<Symbol> decode_symbols(std::string_view code) {
    std::vector<Symbol> out;
    out.reserve(code.size());
    for (char c : code) out.push_back(parse_symbol_code(c));
    return out;
}

std::optional<Symbol> reduce(EventType type) noexcept {
    switch (type) {
        case EventType::Push: return Symbol::PU;
        case EventType::PullRequest: return Symbol::PR;
        case EventType::Issues:
        case EventType::IssueComment: return Symbol::IS;
        case EventType::PullRequestReviewComment: return Symbol::RC;
        case EventType::Create: return Symbol::CR;
        case EventType::Delete: return Symbol::DE;
        default: return std::nullopt;
    }
}

std::vector<Team> build_teams(const std::vector<Event>& events, const BotLabels& bot_labels) {
    auto is_bot = [&](const std::string& login) {
        auto it = bot_labels.find(login);
        return it != bot_labels.end() && it->second == bots::Label::Bot;
    };

    // Per-repo event indices in input order.
    std::map<RepoId, std::vector<std::size_t>> by_repo;
    for (std::size_t i = 0; i < events.size(); ++i) by_repo[events[i].repo_id].push_back(i);

    std::vector<Team> teams;
    for (const auto& [repo, idx] : by_repo) {
        Team team;
        team.repo_id = repo;
        bool bot_seen = false;
        for (auto i : idx) {
            const auto& ev = events[i];
            if (is_bot(ev.actor_login)) {
                bot_seen = true;
            } else if (is_contribution(ev.event_type)) {
                team.members.insert(ev.actor_id);
            }
        }
        if (team.members.size() < 2) continue;
        team.kind = bot_seen ? TeamKind::HumanBot : TeamKind::HumanOnly;
        for (auto i : idx) {
            const auto& ev = events[i];
            if (team.members.contains(ev.actor_id) && !is_bot(ev.actor_login)) team.raw_events.push_back(ev);
        }
        sort_by_time(team.raw_events);
        teams.push_back(std::move(team));
    }
    return teams;
}

std::vector<Symbol> reduce_alphabet(std::span<const EventType> raw) {
    std::vector<Symbol> out;
    out.reserve(raw.size());
    for (EventType t : raw) {
        if (auto s = reduce(t)) out.push_back(*s);
    }
    return out;
}

TeamSequence make_sequence(const Team& team) {
    TeamSequence seq;
    seq.repo_id = team.repo_id;
    seq.kind = team.kind;
    seq.pre_reduction.reserve(team.raw_events.size());
    for (const auto& ev : team.raw_events) seq.pre_reduction.push_back(ev.event_type);
    seq.symbols = reduce_alphabet(seq.pre_reduction);
    return seq;
}

std::vector<TeamSequence> filter_short(std::vector<TeamSequence> sequences, std::size_t min_len) {
    if (min_len < 1) throw Error(ErrorCode::InvalidArgument, "min_len must be at least 1");
    std::erase_if(sequences, [min_len](const TeamSequence& s) { return s.symbols.size() < min_len; });
    return sequences;
}

std::vector<double> frequency_vector(std::span<const EventType> events, bool include_review_comment) {
    const std::size_t dims = include_review_comment ? 7 : 6;
    std::vector<double> v(dims, 0.0);
    for (EventType t : events) {
        for (std::size_t d = 0; d < dims; ++d) {
            if (kFrequencyTypes[d] == t) {
                v[d] += 1.0;
                break;
            }
        }
    }
    return v;
}

std::vector<double> frequency_vector(const TeamSequence& seq, bool include_review_comment) {
    return frequency_vector(seq.pre_reduction, include_review_comment);
}

std::string render_sequences_csv(const std::vector<TeamSequence>& seqs) {
    io::CsvTable t;
    t.header = {"repo_id", "kind", "symbols"};
    for (const auto& s : seqs) t.rows.push_back({std::to_string(s.repo_id), to_string(s.kind), encode_symbols(s.symbols)});
    return io::render_csv(t);
}

std::string render_raw_sequences_csv(const std::vector<TeamSequence>& seqs) {
    io::CsvTable t;
    t.header = {"repo_id", "kind", "events"};
    for (const auto& s : seqs) {
        std::string joined;
        for (std::size_t i = 0; i < s.pre_reduction.size(); ++i) {
            if (i) joined.push_back('|');
            joined.append(to_string(s.pre_reduction[i]));
        }
        t.rows.push_back({std::to_string(s.repo_id), to_string(s.kind), std::move(joined)});
    }
    return io::render_csv(t);
}

std::string render_teams_csv(const std::vector<Team>& teams) {
    io::CsvTable t;
    t.header = {"repo_id", "kind", "members", "events"};
    for (const auto& team : teams) {
        std::string members;
        for (auto m : team.members) {
            if (!members.empty()) members.push_back('|');
            members += std::to_string(m);
        }
        t.rows.push_back({std::to_string(team.repo_id), to_string(team.kind), std::move(members),
                          std::to_string(team.raw_events.size())});
    }
    return io::render_csv(t);
}

std::vector<TeamSequence> read_sequences(const std::filesystem::path& symbols_csv, const std::filesystem::path& raw_csv) {
    const auto sym = io::read_csv(symbols_csv);
    const auto raw = io::read_csv(raw_csv);
    const auto s_repo = sym.column("repo_id"), s_kind = sym.column("kind"), s_sym = sym.column("symbols");
    const auto r_repo = raw.column("repo_id"), r_events = raw.column("events");

    std::unordered_map<RepoId, std::vector<EventType>> raw_by_repo;
    for (const auto& row : raw.rows) {
        std::vector<EventType> evs;
        if (!row[r_events].empty()) {
            for (const auto& name : io::split(row[r_events], '|')) evs.push_back(parse_event_type(name));
        }
        raw_by_repo[io::parse_int(row[r_repo], "repo_id")] = std::move(evs);
    }

    std::vector<TeamSequence> out;
    for (const auto& row : sym.rows) {
        TeamSequence s;
        s.repo_id = io::parse_int(row[s_repo], "repo_id");
        s.kind = parse_team_kind(row[s_kind]);
        s.symbols = decode_symbols(row[s_sym]);
        auto it = raw_by_repo.find(s.repo_id);
        if (it == raw_by_repo.end()) {
            throw Error(ErrorCode::MalformedRecord,
                        "repo " + std::to_string(s.repo_id) + " missing from " + raw_csv.string());
        }
        s.pre_reduction = it->second;
        if (reduce_alphabet(s.pre_reduction) != s.symbols) {
            throw Error(ErrorCode::MalformedRecord,
                        "repo " + std::to_string(s.repo_id) + ": symbols do not match raw events");
        }
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace teamflow
