#include "teamflow/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "teamflow/error.hpp"
#include "teamflow/rng.hpp"

namespace teamflow::synth {

using nlohmann::json;

namespace {

// Share of IssueComment within the merged IS symbol (9.1 / (9.1 + 4.0)).
constexpr double kIssueCommentShare = 9.1 / 13.1;

constexpr std::array<const char*, 20> kBotNames = {
    "ci",     "deploy", "release", "renovate", "stale",  "lint",   "coverage", "docs",  "merge", "triage",
    "keeper", "codecv", "build",   "test",     "sync",   "label",  "welcome",  "auto",  "format", "update",
};

constexpr std::array<const char*, 8> kHumanBotNames = {
    "abbott", "robotics", "talbotsmith", "botanist", "bothwell", "sabotage", "cabot", "turbotax",
};

constexpr std::array<const char*, 12> kHumanNames = {
    "alice", "bob", "carol", "dave", "erin", "frank", "grace", "heidi", "ivan", "judy", "mallory", "oscar",
};

constexpr std::array<const char*, 96> kVocabulary = {
    "the",      "fix",     "build",    "test",     "failing",  "error",     "when",     "running",
    "on",       "windows", "linux",    "mac",      "please",   "review",    "this",     "change",
    "looks",    "good",    "to",       "me",       "i",        "think",     "we",       "should",
    "refactor", "parser",  "module",   "before",   "merging",  "can",       "you",      "add",
    "docs",     "for",     "new",      "api",      "endpoint", "thanks",    "update",   "readme",
    "version",  "bump",    "release",  "notes",    "crash",    "stack",     "trace",    "attached",
    "memory",   "leak",    "in",       "loop",     "seems",    "related",   "issue",    "closing",
    "duplicate","rebase",  "master",   "branch",   "conflict", "resolved",  "nice",     "work",
    "benchmark","slower",  "faster",   "cache",    "config",   "option",    "default",  "value",
    "typo",     "comment", "naming",   "unclear",  "explain",  "why",       "need",     "edge",
    "case",     "null",    "pointer",  "check",    "missing",  "import",    "unused",   "variable",
    "lint",     "warning", "style",    "nit",      "agree",    "disagree",  "later",    "followup",
};

constexpr std::array<const char*, 5> kTemplates = {
    "Coverage increased (+{n}%) to {n}% when pulling {h} on {w} into master.",
    "This issue has been automatically marked as stale because it has not had recent activity. It will be "
    "closed if no further activity occurs. Thank you for your contributions.",
    "Thanks for your contribution! Build {n} passed for commit {h} on {w}.",
    "Bumps {w} from {n} to {n}. Release notes and changelog are available in the upstream repository.",
    "Deployment preview is ready at https://preview-{n}.example.com for commit {h}.",
};

EventType symbol_to_raw(Symbol s, Rng& rng) {
    switch (s) {
        case Symbol::PU: return EventType::Push;
        case Symbol::PR: return EventType::PullRequest;
        case Symbol::IS: return rng.bernoulli(kIssueCommentShare) ? EventType::IssueComment : EventType::Issues;
        case Symbol::RC: return EventType::PullRequestReviewComment;
        case Symbol::CR: return EventType::Create;
        case Symbol::DE: return EventType::Delete;
    }
    return EventType::Push;
}

std::string hex_token(Rng& rng) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (int i = 0; i < 7; ++i) out.push_back(kHex[rng.below(16)]);
    return out;
}

std::string bot_comment(std::size_t template_index, Rng& rng) {
    std::string t = kTemplates[template_index % kTemplates.size()];
    std::string out;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] == '{' && i + 2 < t.size() && t[i + 2] == '}') {
            switch (t[i + 1]) {
                case 'n': out += std::to_string(rng.below(100)); break;
                case 'h': out += hex_token(rng); break;
                case 'w': out += kVocabulary[rng.below(kVocabulary.size())]; break;
                default: break;
            }
            i += 2;
        } else {
            out.push_back(t[i]);
        }
    }
    return out;
}

std::string human_comment(Rng& rng) {
    const auto n = static_cast<std::size_t>(rng.between(4, 14));
    std::string out;
    for (std::size_t i = 0; i < n; ++i) {
        if (i) out.push_back(' ');
        out += kVocabulary[rng.below(kVocabulary.size())];
    }
    return out;
}

std::vector<double> group_weights(const SynthSpec& spec, const GroupSpec& g) {
    if (!g.weights.empty()) return g.weights;
    return {spec.weights.begin(), spec.weights.end()};
}

void check(bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::InvalidSpec, what);
}

bool probability(double p) { return p >= 0.0 && p <= 1.0; }

void check_weights(std::span<const double> w, const std::string& what) {
    check(std::all_of(w.begin(), w.end(), [](double x) { return x >= 0.0 && std::isfinite(x); }),
          what + ": weights must be nonnegative");
    check(std::accumulate(w.begin(), w.end(), 0.0) > 0.0, what + ": weights must not all be zero");
}

// Background symbols for one team, with comment insertion per mode.
void draw_team(const SynthSpec& spec, const GroupSpec& group, std::size_t length, Rng& rng,
               std::vector<Symbol>& symbols, std::vector<EventType>& raw) {
    symbols.clear();
    raw.clear();
    auto weights = group_weights(spec, group);
    if (group.comments == CommentMode::Background) {
        for (std::size_t i = 0; i < length; ++i) {
            const auto s = static_cast<Symbol>(rng.categorical(weights));
            symbols.push_back(s);
            raw.push_back(symbol_to_raw(s, rng));
        }
        return;
    }

    weights[static_cast<std::size_t>(Symbol::IS)] = 0.0;
    if (std::accumulate(weights.begin(), weights.end(), 0.0) <= 0.0) weights[0] = 1.0;
    const auto n_comments = std::min<std::size_t>(
        length, static_cast<std::size_t>(std::llround(static_cast<double>(length) * spec.comment_rate)));
    const std::size_t n_other = length - n_comments;

    // Comment blocks, each placed in a distinct gap between other events.
    std::vector<std::size_t> blocks;
    if (group.comments == CommentMode::Clustered) {
        std::size_t left = n_comments;
        while (left > 0) {
            const auto b = std::min<std::size_t>(
                left, static_cast<std::size_t>(rng.between(static_cast<std::int64_t>(spec.cluster_min),
                                                           static_cast<std::int64_t>(spec.cluster_max))));
            blocks.push_back(b);
            left -= b;
        }
    } else {
        blocks.assign(n_comments, 1);
    }
    const std::size_t gaps = n_other + 1;
    std::vector<std::size_t> per_gap(gaps, 0);
    std::vector<std::size_t> gap_ids(gaps);
    std::iota(gap_ids.begin(), gap_ids.end(), 0);
    rng.shuffle(std::span(gap_ids));
    for (std::size_t b = 0; b < blocks.size(); ++b) per_gap[gap_ids[b % gaps]] += blocks[b];

    for (std::size_t gap = 0; gap < gaps; ++gap) {
        for (std::size_t c = 0; c < per_gap[gap]; ++c) {
            symbols.push_back(Symbol::IS);
            raw.push_back(EventType::IssueComment);
        }
        if (gap < n_other) {
            const auto s = static_cast<Symbol>(rng.categorical(weights));
            symbols.push_back(s);
            raw.push_back(symbol_to_raw(s, rng));
        }
    }
}

std::size_t contributions(const std::vector<Symbol>& s) {
    return static_cast<std::size_t>(
        std::count_if(s.begin(), s.end(), [](Symbol x) { return x == Symbol::PU || x == Symbol::PR; }));
}

std::size_t count_occurrences(const std::vector<Symbol>& seq, const std::vector<Symbol>& m) {
    if (seq.size() < m.size()) return 0;
    std::size_t n = 0;
    for (std::size_t off = 0; off + m.size() <= seq.size(); ++off) {
        n += std::equal(m.begin(), m.end(), seq.begin() + static_cast<std::ptrdiff_t>(off));
    }
    return n;
}

const char* to_string(CommentMode m) {
    switch (m) {
        case CommentMode::Background: return "background";
        case CommentMode::Clustered: return "clustered";
        case CommentMode::Interspersed: return "interspersed";
    }
    return "background";
}

CommentMode parse_comment_mode(const std::string& s) {
    if (s == "background") return CommentMode::Background;
    if (s == "clustered") return CommentMode::Clustered;
    if (s == "interspersed") return CommentMode::Interspersed;
    throw Error(ErrorCode::InvalidSpec, "unknown comment mode '" + s + "'");
}

// Account-level generators for the two classes.
struct AccountStyle {
    bots::BotPlacement placement;
    bool org;
    std::vector<EventType> repertoire;
    bool templated_comments;
};

bots::BotPlacement draw_placement(bool bot, Rng& rng) {
    const double r = rng.uniform();
    if (bot) {
        return r < 0.6 ? bots::BotPlacement::End : r < 0.85 ? bots::BotPlacement::Beginning : bots::BotPlacement::Middle;
    }
    return r < 0.55 ? bots::BotPlacement::Middle : r < 0.85 ? bots::BotPlacement::Beginning : bots::BotPlacement::End;
}

std::vector<EventType> draw_repertoire(bool bot, Rng& rng) {
    if (bot) {
        static constexpr std::array<EventType, 8> kBotTypes = {
            EventType::IssueComment, EventType::PullRequest, EventType::Push,   EventType::Create,
            EventType::PullRequestReviewComment, EventType::Issues, EventType::Delete, EventType::Release,
        };
        std::vector<EventType> pool(kBotTypes.begin(), kBotTypes.end());
        rng.shuffle(std::span(pool));
        // Comment-driven bots dominate.
        if (rng.bernoulli(0.6)) {
            std::erase(pool, EventType::IssueComment);
            pool.insert(pool.begin(), EventType::IssueComment);
        }
        pool.resize(static_cast<std::size_t>(rng.between(1, 2)));
        return pool;
    }
    std::vector<EventType> pool(kAllEventTypes.begin(), kAllEventTypes.end());
    rng.shuffle(std::span(pool));
    std::erase(pool, EventType::IssueComment);
    pool.insert(pool.begin(), EventType::IssueComment);
    pool.resize(static_cast<std::size_t>(rng.between(3, 8)));
    return pool;
}

std::string login_for(bool bot, bots::BotPlacement placement, std::size_t id, Rng& rng) {
    const std::string num = std::to_string(id);
    if (bot) {
        const std::string name = kBotNames[rng.below(kBotNames.size())];
        switch (placement) {
            case bots::BotPlacement::Beginning: return "bot-" + name + num;
            case bots::BotPlacement::Middle: return name + "-bot-" + num;
            default: return name + num + (rng.bernoulli(0.5) ? "-bot" : "bot");
        }
    }
    const std::string human = kHumanNames[rng.below(kHumanNames.size())];
    switch (placement) {
        case bots::BotPlacement::Beginning: return (rng.bernoulli(0.5) ? "botanist-" : "bothwell-") + human + num;
        case bots::BotPlacement::End: return human + num + (rng.bernoulli(0.5) ? "-talbot" : "cabot");
        default: return human + "-" + kHumanBotNames[rng.below(kHumanBotNames.size())] + num;
    }
}

}  // namespace

std::array<double, kEventTypeCount> reference_type_weights() {
    // Push, PullRequest, Create, IssueComment, PullRequestReviewComment, Delete,
    // Issues, Watch, Fork, Release, Gollum, Member, CommitComment, Public
    return {44.1, 15.6, 11.3, 9.1, 5.6, 4.7, 4.0, 2.4, 1.3, 0.56, 0.38, 0.31, 0.16, 0.07};
}

std::array<double, kSymbolCount> reduced_weights() {
    // PU, PR, IS (Issues + IssueComment), RC, CR, DE
    return {44.1, 15.6, 13.1, 5.6, 11.3, 4.7};
}

std::vector<EventType> sample_event_types(std::size_t n, const std::array<double, kEventTypeCount>& weights,
                                          std::uint64_t seed) {
    check_weights(weights, "event weights");
    Rng rng(seed);
    std::vector<EventType> out(n);
    for (auto& t : out) t = static_cast<EventType>(rng.categorical(weights));
    return out;
}

void validate(const SynthSpec& spec) {
    check(!spec.groups.empty(), "at least one group required");
    std::set<std::string> names;
    for (const auto& g : spec.groups) {
        check(!g.name.empty(), "group name must be nonempty");
        check(names.insert(g.name).second, "duplicate group name '" + g.name + "'");
        if (!g.weights.empty()) {
            check(g.weights.size() == kSymbolCount, "group '" + g.name + "': weights need 6 entries");
            check_weights(g.weights, "group '" + g.name + "'");
        }
        const auto lo = g.min_length ? g.min_length : spec.min_length;
        const auto hi = g.max_length ? g.max_length : spec.max_length;
        check(lo >= 5 && hi >= lo, "group '" + g.name + "': length range must satisfy 5 <= min <= max");
    }
    check(spec.min_length >= 5, "min_length must be at least 5");
    check(spec.max_length >= spec.min_length, "max_length must be >= min_length");
    check_weights(spec.weights, "background");
    for (const auto& m : spec.motifs) {
        check(!m.symbols.empty(), "planted motif must be nonempty");
        check(m.rates.size() == spec.groups.size(), "planted motif needs one rate per group");
        for (std::size_t g = 0; g < spec.groups.size(); ++g) {
            check(probability(m.rates[g]), "motif rates must be in [0,1]");
            const auto lo = spec.groups[g].min_length ? spec.groups[g].min_length : spec.min_length;
            check(m.rates[g] == 0.0 || m.symbols.size() <= lo, "planted motif longer than the shortest sequence");
        }
    }
    check(probability(spec.comment_rate), "comment_rate must be in [0,1]");
    check(spec.cluster_min >= 1 && spec.cluster_max >= spec.cluster_min, "invalid cluster size range");
    check(spec.members_min >= 2 && spec.members_max >= spec.members_min, "invalid member count range");
    check(probability(spec.bot_named_human_rate), "bot_named_human_rate must be in [0,1]");
    check(probability(spec.outsider_rate), "outsider_rate must be in [0,1]");
    check(probability(spec.account_noise), "account_noise must be in [0,1]");
    check(probability(spec.labeled_fraction), "labeled_fraction must be in [0,1]");
    bool needs_bots = std::any_of(spec.groups.begin(), spec.groups.end(),
                                  [](const GroupSpec& g) { return g.kind == TeamKind::HumanBot; });
    check(!needs_bots || (spec.bot_pool >= 1 && spec.bots_per_team_max >= 1 && spec.bot_events_max >= 1),
          "human-bot groups need a nonempty bot pool");
    try {
        (void)parse_timestamp(spec.start_time);
    } catch (const Error&) {
        throw Error(ErrorCode::InvalidSpec, "invalid start_time '" + spec.start_time + "'");
    }
}

SequenceCorpus generate_sequences(const SynthSpec& spec) {
    validate(spec);
    Rng rng(spec.seed);
    SequenceCorpus out;

    std::vector<json> insertions(spec.motifs.size(), json::array());
    RepoId next_repo = 1;
    std::vector<Symbol> symbols;
    std::vector<EventType> raw;
    json groups = json::array();

    for (std::size_t g = 0; g < spec.groups.size(); ++g) {
        const auto& group = spec.groups[g];
        const auto lo = group.min_length ? group.min_length : spec.min_length;
        const auto hi = group.max_length ? group.max_length : spec.max_length;
        json repos = json::array();
        for (std::size_t i = 0; i < group.n_teams; ++i) {
            const RepoId repo = next_repo++;
            std::vector<std::pair<std::size_t, std::size_t>> planted;  // (motif, offset)
            for (int attempt = 0;; ++attempt) {
                const auto length = static_cast<std::size_t>(rng.between(static_cast<std::int64_t>(lo),
                                                                          static_cast<std::int64_t>(hi)));
                draw_team(spec, group, length, rng, symbols, raw);
                planted.clear();
                std::vector<char> occupied(symbols.size(), 0);
                for (std::size_t mi = 0; mi < spec.motifs.size(); ++mi) {
                    const auto& m = spec.motifs[mi];
                    if (!rng.bernoulli(m.rates[g])) continue;
                    const std::size_t w = m.symbols.size();
                    for (int tries = 0; tries < 32; ++tries) {
                        const auto off = static_cast<std::size_t>(rng.below(symbols.size() - w + 1));
                        if (std::any_of(occupied.begin() + static_cast<std::ptrdiff_t>(off),
                                        occupied.begin() + static_cast<std::ptrdiff_t>(off + w),
                                        [](char c) { return c != 0; })) {
                            continue;
                        }
                        for (std::size_t j = 0; j < w; ++j) {
                            symbols[off + j] = m.symbols[j];
                            raw[off + j] = symbol_to_raw(m.symbols[j], rng);
                            occupied[off + j] = 1;
                        }
                        planted.emplace_back(mi, off);
                        break;
                    }
                }
                if (contributions(symbols) >= 2) break;
                if (attempt > 1000) throw Error(ErrorCode::InvalidSpec, "weights cannot produce two contributions");
            }
            for (auto [mi, off] : planted) insertions[mi].push_back({{"repo_id", repo}, {"offset", off}});

            TeamSequence seq;
            seq.repo_id = repo;
            seq.kind = group.kind;
            seq.symbols = symbols;
            seq.pre_reduction = raw;
            out.sequences.push_back(std::move(seq));
            out.group_of.push_back(g);
            repos.push_back(repo);
        }
        groups.push_back({{"name", group.name}, {"kind", to_string(group.kind)}, {"repos", std::move(repos)}});
    }

    json motifs = json::array();
    for (std::size_t mi = 0; mi < spec.motifs.size(); ++mi) {
        std::size_t occurrences = 0;
        std::vector<std::size_t> per_group(spec.groups.size(), 0);
        for (std::size_t i = 0; i < out.sequences.size(); ++i) {
            const auto c = count_occurrences(out.sequences[i].symbols, spec.motifs[mi].symbols);
            occurrences += c;
            per_group[out.group_of[i]] += c > 0;
        }
        motifs.push_back({{"symbols", encode_symbols(spec.motifs[mi].symbols)},
                          {"insertions", insertions[mi]},
                          {"occurrences", occurrences},
                          {"sequences_with_occurrence", per_group}});
    }
    out.manifest = {{"seed", spec.seed}, {"groups", std::move(groups)}, {"motifs", std::move(motifs)}};
    return out;
}

std::vector<SynthAccount> generate_bot_accounts(const BotAccountSpec& spec) {
    if (!probability(spec.bot_fraction) || !probability(spec.noise)) {
        throw Error(ErrorCode::InvalidSpec, "bot_fraction and noise must be in [0,1]");
    }
    if (spec.min_events < 1 || spec.max_events < spec.min_events) {
        throw Error(ErrorCode::InvalidSpec, "need 1 <= min_events <= max_events");
    }
    UnixSeconds start = 0;
    try {
        start = parse_timestamp(spec.start_time);
    } catch (const Error&) {
        throw Error(ErrorCode::InvalidSpec, "invalid start_time '" + spec.start_time + "'");
    }
    Rng rng(spec.seed);
    const auto n_bots = static_cast<std::size_t>(std::llround(spec.bot_fraction * static_cast<double>(spec.n_accounts)));

    std::vector<SynthAccount> out;
    out.reserve(spec.n_accounts);
    for (std::size_t i = 0; i < spec.n_accounts; ++i) {
        const bool bot = i < n_bots;
        auto pick = [&](bool own) { return rng.bernoulli(spec.noise) ? !own : own; };

        AccountStyle style;
        style.placement = draw_placement(pick(bot), rng);
        style.org = rng.bernoulli(pick(bot) ? 0.85 : 0.15);
        style.repertoire = draw_repertoire(pick(bot), rng);
        style.templated_comments = pick(bot);

        SynthAccount acct;
        acct.label = bot ? bots::Label::Bot : bots::Label::Human;
        acct.login = login_for(bot, style.placement, i, rng);
        // Labels follow the true class; the login shape follows the drawn placement.
        const auto n_events = static_cast<std::size_t>(rng.between(static_cast<std::int64_t>(spec.min_events),
                                                                     static_cast<std::int64_t>(spec.max_events)));
        const auto template_index = static_cast<std::size_t>(rng.below(kTemplates.size()));
        const auto actor = static_cast<ActorId>(5'000'000 + i);
        const auto repo = static_cast<RepoId>(1'000'000 + i);
        UnixSeconds t = start + rng.between(0, 86400);
        for (std::size_t e = 0; e < n_events; ++e) {
            Event ev;
            ev.event_type = e < style.repertoire.size() ? style.repertoire[e]
                                                        : style.repertoire[rng.below(style.repertoire.size())];
            ev.actor_id = actor;
            ev.actor_login = acct.login;
            ev.repo_id = repo;
            t += rng.between(30, 7200);
            ev.created_at = t;
            ev.org_owned_actor = style.org;
            if (is_comment_bearing(ev.event_type)) {
                ev.comment_body = style.templated_comments ? bot_comment(template_index, rng) : human_comment(rng);
            }
            acct.events.push_back(std::move(ev));
        }
        out.push_back(std::move(acct));
    }
    // Interleave the classes deterministically.
    rng.shuffle(std::span(out));
    return out;
}

SynthCorpus generate(const SynthSpec& spec) {
    auto seqs = generate_sequences(spec);
    Rng rng(spec.seed ^ 0x5DEECE66DULL);
    const UnixSeconds start = parse_timestamp(spec.start_time);

    SynthCorpus corpus;
    ActorId next_actor = 1;

    struct BotAccount {
        ActorId id;
        std::string login;
        std::vector<EventType> repertoire;
        bool org;
        std::size_t template_index;
    };
    std::vector<BotAccount> bot_pool;
    const bool needs_bots = std::any_of(spec.groups.begin(), spec.groups.end(),
                                        [](const GroupSpec& g) { return g.kind == TeamKind::HumanBot; });
    if (needs_bots) {
        for (std::size_t b = 0; b < spec.bot_pool; ++b) {
            const auto placement = draw_placement(true, rng);
            BotAccount acct{next_actor++, login_for(true, placement, 100000 + b, rng), draw_repertoire(true, rng),
                            rng.bernoulli(0.85), static_cast<std::size_t>(rng.below(kTemplates.size()))};
            corpus.truth[acct.login] = bots::Label::Bot;
            bot_pool.push_back(std::move(acct));
        }
    }

    json bot_names = json::array();
    for (const auto& b : bot_pool) bot_names.push_back(b.login);
    json bot_named_humans = json::array();

    for (const auto& seq : seqs.sequences) {
        // Members: the first m contribution positions go to distinct members.
        std::vector<std::size_t> contrib;
        for (std::size_t i = 0; i < seq.symbols.size(); ++i) {
            if (seq.symbols[i] == Symbol::PU || seq.symbols[i] == Symbol::PR) contrib.push_back(i);
        }
        const auto wanted = static_cast<std::size_t>(rng.between(static_cast<std::int64_t>(spec.members_min),
                                                                 static_cast<std::int64_t>(spec.members_max)));
        const std::size_t m = std::min(wanted, contrib.size());
        struct Member {
            ActorId id;
            std::string login;
            bool org;
        };
        std::vector<Member> members;
        for (std::size_t k = 0; k < m; ++k) {
            const ActorId id = next_actor++;
            std::string login;
            if (rng.bernoulli(spec.bot_named_human_rate)) {
                login = login_for(false, draw_placement(false, rng), 200000 + static_cast<std::size_t>(id), rng);
                corpus.truth[login] = bots::Label::Human;
                bot_named_humans.push_back(login);
            } else {
                login = std::string(kHumanNames[rng.below(kHumanNames.size())]) + "-dev" + std::to_string(id);
            }
            members.push_back({id, std::move(login), rng.bernoulli(0.3)});
        }
        std::vector<std::size_t> actor_of(seq.symbols.size());
        for (auto& a : actor_of) a = rng.below(m);
        for (std::size_t k = 0; k < m; ++k) actor_of[contrib[k]] = k;

        UnixSeconds t = start + rng.between(0, 3 * 86400);
        const UnixSeconds t0 = t;
        for (std::size_t i = 0; i < seq.pre_reduction.size(); ++i) {
            t += rng.between(60, 7200);
            const auto& mem = members[actor_of[i]];
            Event ev{seq.pre_reduction[i], mem.id, mem.login, seq.repo_id, t, mem.org, std::nullopt};
            if (is_comment_bearing(ev.event_type)) ev.comment_body = human_comment(rng);
            corpus.events.push_back(std::move(ev));
        }
        const UnixSeconds t1 = t;

        if (seq.kind == TeamKind::HumanBot) {
            const auto n_bots = static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(spec.bots_per_team_max)));
            for (std::size_t b = 0; b < n_bots; ++b) {
                const auto& bot = bot_pool[rng.below(bot_pool.size())];
                const auto n_events = rng.between(1, static_cast<std::int64_t>(spec.bot_events_max));
                for (std::int64_t e = 0; e < n_events; ++e) {
                    Event ev{bot.repertoire[rng.below(bot.repertoire.size())], bot.id, bot.login, seq.repo_id,
                             rng.between(t0, t1), bot.org, std::nullopt};
                    if (is_comment_bearing(ev.event_type)) ev.comment_body = bot_comment(bot.template_index, rng);
                    corpus.events.push_back(std::move(ev));
                }
            }
        }
        if (rng.bernoulli(spec.outsider_rate)) {
            const ActorId id = next_actor++;
            const std::string login = "watcher" + std::to_string(id);
            const auto n = rng.between(1, 2);
            for (std::int64_t e = 0; e < n; ++e) {
                corpus.events.push_back({rng.bernoulli(0.7) ? EventType::Watch : EventType::Fork, id, login,
                                         seq.repo_id, rng.between(t0, t1), false, std::nullopt});
            }
        }
    }

    if (spec.standalone_accounts > 0) {
        BotAccountSpec as;
        as.seed = spec.seed + 17;
        as.n_accounts = spec.standalone_accounts;
        as.noise = spec.account_noise;
        as.max_events = std::max(as.min_events, spec.standalone_events_max);
        as.start_time = spec.start_time;
        RepoId next_repo = static_cast<RepoId>(seqs.sequences.size()) + 1;
        for (auto& acct : generate_bot_accounts(as)) {
            const ActorId id = next_actor++;
            const RepoId repo = next_repo++;
            corpus.truth[acct.login] = acct.label;
            for (auto& ev : acct.events) {
                ev.actor_id = id;
                ev.repo_id = repo;
                corpus.events.push_back(std::move(ev));
            }
        }
    }

    sort_by_time(corpus.events);

    // Training labels: a seeded subset of the "bot"-named logins.
    for (const auto& [login, label] : corpus.truth) {
        if (rng.bernoulli(spec.labeled_fraction)) corpus.labels[login] = label;
    }

    corpus.manifest = seqs.manifest;
    corpus.manifest["bots"] = std::move(bot_names);
    corpus.manifest["bot_named_humans"] = std::move(bot_named_humans);
    corpus.manifest["events"] = corpus.events.size();
    corpus.manifest["labeled_accounts"] = corpus.labels.size();
    corpus.manifest["spec"] = to_json(spec);
    return corpus;
}

json to_json(const SynthSpec& spec) {
    json groups = json::array();
    for (const auto& g : spec.groups) {
        json j = {{"name", g.name},
                  {"kind", to_string(g.kind)},
                  {"n_teams", g.n_teams},
                  {"comments", to_string(g.comments)}};
        if (!g.weights.empty()) j["weights"] = g.weights;
        if (g.min_length) j["min_length"] = g.min_length;
        if (g.max_length) j["max_length"] = g.max_length;
        groups.push_back(std::move(j));
    }
    json motifs = json::array();
    for (const auto& m : spec.motifs) motifs.push_back({{"symbols", encode_symbols(m.symbols)}, {"rates", m.rates}});
    return {{"seed", spec.seed},
            {"groups", std::move(groups)},
            {"min_length", spec.min_length},
            {"max_length", spec.max_length},
            {"weights", spec.weights},
            {"motifs", std::move(motifs)},
            {"comment_rate", spec.comment_rate},
            {"cluster_min", spec.cluster_min},
            {"cluster_max", spec.cluster_max},
            {"members_min", spec.members_min},
            {"members_max", spec.members_max},
            {"bot_named_human_rate", spec.bot_named_human_rate},
            {"bot_pool", spec.bot_pool},
            {"bots_per_team_max", spec.bots_per_team_max},
            {"bot_events_max", spec.bot_events_max},
            {"outsider_rate", spec.outsider_rate},
            {"standalone_accounts", spec.standalone_accounts},
            {"standalone_events_max", spec.standalone_events_max},
            {"account_noise", spec.account_noise},
            {"labeled_fraction", spec.labeled_fraction},
            {"start_time", spec.start_time}};
}

SynthSpec spec_from_json(const json& doc) {
    try {
        SynthSpec s;
        s.seed = doc.at("seed").get<std::uint64_t>();
        for (const auto& g : doc.at("groups")) {
            GroupSpec gs;
            gs.name = g.at("name").get<std::string>();
            gs.kind = parse_team_kind(g.value("kind", std::string("human_only")));
            gs.n_teams = g.value("n_teams", gs.n_teams);
            gs.comments = parse_comment_mode(g.value("comments", std::string("background")));
            gs.weights = g.value("weights", std::vector<double>{});
            gs.min_length = g.value("min_length", std::size_t{0});
            gs.max_length = g.value("max_length", std::size_t{0});
            s.groups.push_back(std::move(gs));
        }
        s.min_length = doc.value("min_length", s.min_length);
        s.max_length = doc.value("max_length", s.max_length);
        if (doc.contains("weights")) {
            const auto w = doc.at("weights").get<std::vector<double>>();
            if (w.size() != kSymbolCount) throw Error(ErrorCode::InvalidSpec, "weights need 6 entries");
            std::copy(w.begin(), w.end(), s.weights.begin());
        }
        for (const auto& m : doc.value("motifs", json::array())) {
            s.motifs.push_back({decode_symbols(m.at("symbols").get<std::string>()), m.at("rates").get<std::vector<double>>()});
        }
        s.comment_rate = doc.value("comment_rate", s.comment_rate);
        s.cluster_min = doc.value("cluster_min", s.cluster_min);
        s.cluster_max = doc.value("cluster_max", s.cluster_max);
        s.members_min = doc.value("members_min", s.members_min);
        s.members_max = doc.value("members_max", s.members_max);
        s.bot_named_human_rate = doc.value("bot_named_human_rate", s.bot_named_human_rate);
        s.bot_pool = doc.value("bot_pool", s.bot_pool);
        s.bots_per_team_max = doc.value("bots_per_team_max", s.bots_per_team_max);
        s.bot_events_max = doc.value("bot_events_max", s.bot_events_max);
        s.outsider_rate = doc.value("outsider_rate", s.outsider_rate);
        s.standalone_accounts = doc.value("standalone_accounts", s.standalone_accounts);
        s.standalone_events_max = doc.value("standalone_events_max", s.standalone_events_max);
        s.account_noise = doc.value("account_noise", s.account_noise);
        s.labeled_fraction = doc.value("labeled_fraction", s.labeled_fraction);
        s.start_time = doc.value("start_time", s.start_time);
        validate(s);
        return s;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidSpec, e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidSpec) throw;
        throw Error(ErrorCode::InvalidSpec, e.what());
    }
}

SynthSpec default_pipeline_spec(std::uint64_t seed) {
    SynthSpec s;
    s.seed = seed;
    s.min_length = 8;
    s.max_length = 30;
    GroupSpec hb{"human_bot", TeamKind::HumanBot, 80, CommentMode::Interspersed, {40, 32, 0, 8, 8, 6}, 10, 34};
    GroupSpec ho{"human_only", TeamKind::HumanOnly, 390, CommentMode::Clustered, {46, 24, 0, 4, 12, 5}, 6, 26};
    s.groups = {hb, ho};
    s.motifs.push_back({{Symbol::PR, Symbol::IS, Symbol::PU, Symbol::IS}, {0.4, 0.05}});
    s.comment_rate = 0.14;
    s.bot_pool = 15;
    s.standalone_accounts = 120;
    s.standalone_events_max = 14;
    s.account_noise = 0.1;
    s.labeled_fraction = 0.7;
    return s;
}

}  // namespace teamflow::synth
