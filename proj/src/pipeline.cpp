#include "teamflow/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <thread>

#include "teamflow/error.hpp"
#include "teamflow/event_model.hpp"
#include "teamflow/io_util.hpp"
#include "teamflow/matcher.hpp"
#include "teamflow/motif.hpp"
#include "teamflow/team_seq.hpp"

namespace teamflow::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* kHumanBotGroup = "human_bot";
const char* kHumanGroup = "human";

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); }

// Error text without the "Code: " prefix added by Error.
std::string bare_message(const Error& e) {
    std::string msg = e.what();
    const std::string prefix = std::string(error_code_name(e.code())) + ": ";
    if (msg.rfind(prefix, 0) == 0) msg.erase(0, prefix.size());
    return msg;
}

fs::path marker_path(const PipelineConfig& config, Stage stage) {
    return config.output_dir / (std::string(to_string(stage)) + ".stale");
}

fs::path out(const PipelineConfig& config, const char* name) { return config.output_dir / name; }

// Input artifact written by `producer`; checks presence and freshness.
fs::path upstream(const PipelineConfig& config, const char* name, Stage producer, std::optional<Stage> current = {}) {
    const fs::path p = out(config, name);
    const std::string hint = std::string("; run `teamflow ") + to_string(producer) + "` first";
    // a stage re-reading its own earlier output only needs the file
    if (producer != current && fs::exists(marker_path(config, producer))) {
        throw Error(ErrorCode::MissingUpstreamArtifact,
                    p.string() + " is stale (stage '" + to_string(producer) + "' did not finish)" + hint);
    }
    if (!fs::exists(p)) throw Error(ErrorCode::MissingUpstreamArtifact, p.string() + " not found" + hint);
    return p;
}

void guarded(Stage stage, const PipelineConfig& config, const std::function<void()>& body) {
    validate(config);
    fs::create_directories(config.output_dir);
    const fs::path marker = marker_path(config, stage);
    io::write_text(marker, std::string("stage '") + to_string(stage) + "' started but did not finish\n");
    const std::string where = std::string("stage '") + to_string(stage) + "' (" + config.output_dir.string() + "): ";
    try {
        body();
    } catch (const Error& e) {
        throw Error(e.code(), where + bare_message(e));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedRecord, where + e.what());
    } catch (const fs::filesystem_error& e) {
        throw Error(ErrorCode::IoFailure, where + e.what());
    } catch (const std::exception& e) {
        throw Error(ErrorCode::Internal, where + e.what());
    }
    fs::remove(marker);
}

json read_json(const fs::path& path) {
    const auto text = io::read_text(path);
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedRecord, path.string() + ": " + e.what());
    }
}

void write_json(const fs::path& path, const json& doc) { io::write_text(path, doc.dump(2) + "\n"); }

std::vector<Event> load_events(const PipelineConfig& config) {
    return read_events(upstream(config, artifact::kEvents, Stage::Ingest));
}

std::vector<TeamSequence> load_sequences(const PipelineConfig& config) {
    return read_sequences(upstream(config, artifact::kSequences, Stage::BuildTeams),
                          upstream(config, artifact::kSequencesRaw, Stage::BuildTeams));
}

struct Groups {
    std::vector<TeamSequence> human_bot;
    std::vector<TeamSequence> human_matched;  // ascending repo_id
};

Groups load_matched_groups(const PipelineConfig& config) {
    const auto seqs = load_sequences(config);
    const auto pairs = matching::read_matches_csv(upstream(config, artifact::kMatches, Stage::Sample).string());
    std::set<RepoId> matched;
    for (const auto& p : pairs) matched.insert(p.majority_repo_id);
    Groups g;
    for (const auto& s : seqs) {
        if (s.kind == TeamKind::HumanBot) {
            g.human_bot.push_back(s);
        } else if (matched.contains(s.repo_id)) {
            g.human_matched.push_back(s);
        }
    }
    if (g.human_matched.size() != matched.size()) {
        throw Error(ErrorCode::MalformedRecord, "matches.csv references repositories missing from sequences.csv");
    }
    return g;
}

std::vector<std::vector<Symbol>> symbols_of(const std::vector<TeamSequence>& seqs) {
    std::vector<std::vector<Symbol>> out;
    for (const auto& s : seqs) out.push_back(s.symbols);
    return out;
}

std::vector<std::vector<EventType>> raw_of(const std::vector<TeamSequence>& seqs) {
    std::vector<std::vector<EventType>> out;
    for (const auto& s : seqs) out.push_back(s.pre_reduction);
    return out;
}

std::size_t size_field(const json& j, const char* key) { return j.at(key).get<std::size_t>(); }

json test_json(const stats::UTestResult& t) {
    return {{"u_statistic", t.u_statistic},
            {"p_two_sided", t.p_two_sided},
            {"n1", t.n1},
            {"n2", t.n2},
            {"method", stats::to_string(t.method)}};
}

// Strict object reader for the config: every key must be consumed.
class Section {
public:
    Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
        if (!j_.is_object()) config_error("'" + name_ + "' must be an object");
    }

    template <typename T>
    void get(const char* key, T& dst) {
        seen_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end()) return;
        try {
            dst = it->template get<T>();
        } catch (const json::exception&) {
            config_error("'" + name_ + "." + key + "' has the wrong type");
        }
    }

    const json* child(const char* key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void finish() const {
        for (const auto& [k, _] : j_.items()) {
            if (!seen_.contains(k)) config_error("unknown key '" + name_ + "." + k + "'");
        }
    }

private:
    const json& j_;
    std::string name_;
    std::set<std::string> seen_;
};

fs::path resolve(const fs::path& p, const fs::path& base) {
    if (p.empty() || p.is_absolute() || base.empty()) return p;
    return base / p;
}

}  // namespace

// ---------------------------------------------------------------------------

unsigned PipelineConfig::effective_threads() const {
    if (threads > 0) return threads;
    return std::max(1u, std::thread::hardware_concurrency());
}

std::uint64_t PipelineConfig::effective_seed() const {
    if (seed) return *seed;
    if (reproducible) config_error("a seed is required in reproducible mode");
    return std::random_device{}();
}

void validate(const PipelineConfig& c) {
    if (c.reproducible && !c.seed) config_error("a seed is required in reproducible mode");
    if (c.folds < 2) config_error("folds must be at least 2 (got " + std::to_string(c.folds) + ")");
    if (c.min_length < 1) config_error("min_length must be at least 1");
    if (c.w_min < 2 || c.w_max < c.w_min) config_error("window range must satisfy 2 <= w_min <= w_max");
    if (c.highlight_w < c.w_min || c.highlight_w > c.w_max) config_error("highlight_w must lie in [w_min, w_max]");
    if (!(c.alpha > 0.0 && c.alpha <= 1.0)) config_error("alpha must be in (0, 1]");
    const auto& p = c.classifier_params;
    if (p.rounds < 1 || p.max_depth < 1 || p.min_samples_leaf < 1) {
        config_error("rounds, max_depth and min_samples_leaf must be positive");
    }
    if (!(p.learning_rate > 0.0)) config_error("learning_rate must be positive");
    if (!(p.l2 >= 0.0)) config_error("l2 must be nonnegative");
    if (!(p.threshold >= 0.0 && p.threshold <= 1.0)) config_error("threshold must be in [0, 1]");
    if (c.comment_cap < 2) config_error("comment_cap must be at least 2");
    if (c.output_dir.empty()) config_error("output_dir must not be empty");
}

PipelineConfig config_from_json(const json& doc, const fs::path& base_dir) {
    PipelineConfig c;
    Section root(doc, "config");

    std::vector<std::string> inputs;
    std::string labels, output_dir = c.output_dir.string();
    root.get("inputs", inputs);
    root.get("labels", labels);
    root.get("output_dir", output_dir);
    for (const auto& i : inputs) c.inputs.push_back(resolve(i, base_dir));
    c.labels = resolve(labels, base_dir);
    c.output_dir = resolve(output_dir, base_dir);
    root.get("lenient", c.lenient);
    root.get("reproducible", c.reproducible);
    root.get("threads", c.threads);
    if (const json* s = root.child("seed"); s && !s->is_null()) {
        if (!s->is_number_unsigned()) config_error("'config.seed' must be a nonnegative integer");
        c.seed = s->get<std::uint64_t>();
    }

    if (const json* j = root.child("classifier")) {
        Section s(*j, "classifier");
        std::string kind = bots::to_string(c.classifier);
        s.get("kind", kind);
        try {
            c.classifier = bots::parse_classifier_kind(kind);
        } catch (const Error& e) {
            config_error(bare_message(e));
        }
        auto& p = c.classifier_params;
        s.get("rounds", p.rounds);
        s.get("max_depth", p.max_depth);
        s.get("learning_rate", p.learning_rate);
        s.get("min_samples_leaf", p.min_samples_leaf);
        s.get("l2", p.l2);
        s.get("max_iterations", p.max_iterations);
        s.get("tolerance", p.tolerance);
        s.get("threshold", p.threshold);
        s.get("baseline", c.baseline);
        s.get("folds", c.folds);
        s.get("comment_cap", c.comment_cap);
        s.finish();
    }
    if (const json* j = root.child("sequences")) {
        Section s(*j, "sequences");
        s.get("min_length", c.min_length);
        s.finish();
    }
    if (const json* j = root.child("matching")) {
        Section s(*j, "matching");
        s.get("include_review_comment", c.include_review_comment);
        s.finish();
    }
    if (const json* j = root.child("motifs")) {
        Section s(*j, "motifs");
        s.get("w_min", c.w_min);
        s.get("w_max", c.w_max);
        s.get("highlight_w", c.highlight_w);
        s.get("candidates", c.candidates);
        s.get("alpha", c.alpha);
        s.finish();
    }
    if (const json* j = root.child("stats")) {
        Section s(*j, "stats");
        std::string mode = to_string(c.run_length_mode);
        s.get("run_length_mode", mode);
        try {
            c.run_length_mode = parse_run_length_mode(mode);
        } catch (const Error& e) {
            config_error(bare_message(e));
        }
        s.finish();
    }
    root.finish();
    return c;
}

json to_json(const PipelineConfig& c) {
    json inputs = json::array();
    for (const auto& i : c.inputs) inputs.push_back(i.string());
    const auto& p = c.classifier_params;
    return {
        {"inputs", std::move(inputs)},
        {"labels", c.labels.string()},
        {"output_dir", c.output_dir.string()},
        {"lenient", c.lenient},
        {"seed", c.seed ? json(*c.seed) : json(nullptr)},
        {"reproducible", c.reproducible},
        {"threads", c.threads},
        {"classifier",
         {{"kind", bots::to_string(c.classifier)},
          {"rounds", p.rounds},
          {"max_depth", p.max_depth},
          {"learning_rate", p.learning_rate},
          {"min_samples_leaf", p.min_samples_leaf},
          {"l2", p.l2},
          {"max_iterations", p.max_iterations},
          {"tolerance", p.tolerance},
          {"threshold", p.threshold},
          {"baseline", c.baseline},
          {"folds", c.folds},
          {"comment_cap", c.comment_cap}}},
        {"sequences", {{"min_length", c.min_length}}},
        {"matching", {{"include_review_comment", c.include_review_comment}}},
        {"motifs",
         {{"w_min", c.w_min},
          {"w_max", c.w_max},
          {"highlight_w", c.highlight_w},
          {"candidates", c.candidates},
          {"alpha", c.alpha}}},
        {"stats", {{"run_length_mode", to_string(c.run_length_mode)}}},
    };
}

PipelineConfig load_config(const fs::path& path) {
    json doc;
    try {
        doc = json::parse(io::read_text(path));
    } catch (const json::exception& e) {
        config_error(path.string() + ": " + e.what());
    } catch (const Error& e) {
        config_error(bare_message(e));
    }
    return config_from_json(doc, path.parent_path());
}

const char* to_string(Stage stage) noexcept {
    switch (stage) {
        case Stage::Ingest: return "ingest";
        case Stage::DetectBots: return "detect-bots";
        case Stage::BuildTeams: return "build-teams";
        case Stage::Sample: return "sample";
        case Stage::Motifs: return "motifs";
        case Stage::Stats: return "stats";
        case Stage::Report: return "report";
    }
    return "?";
}

const char* to_string(stats::RunLengthMode mode) noexcept {
    return mode == stats::RunLengthMode::PerTeamMean ? "per_team_mean" : "pooled_runs";
}

stats::RunLengthMode parse_run_length_mode(std::string_view s) {
    if (s == "per_team_mean") return stats::RunLengthMode::PerTeamMean;
    if (s == "pooled_runs") return stats::RunLengthMode::PooledRuns;
    throw Error(ErrorCode::InvalidArgument, "unknown run-length mode '" + std::string(s) + "'");
}

std::string motif_graph_name(const std::string& group) { return "motif_graph_" + group + ".dot"; }

// ---------------------------------------------------------------------------
// Stages

void run_ingest(const PipelineConfig& config) {
    guarded(Stage::Ingest, config, [&] {
        if (config.inputs.empty()) config_error("no input files configured");
        std::vector<Event> events;
        std::size_t lines = 0, skipped = 0;
        json inputs = json::array();
        for (const auto& path : config.inputs) {
            if (!fs::exists(path)) throw Error(ErrorCode::IoFailure, "input " + path.string() + " not found");
            StreamOptions opts;
            opts.lenient = config.lenient;
            EventStream stream(path, opts);
            std::size_t n = 0;
            while (auto e = stream.next()) {
                events.push_back(std::move(*e));
                ++n;
            }
            lines += stream.lines_read();
            skipped += stream.skipped();
            inputs.push_back({{"file", path.filename().string()}, {"events", n}, {"skipped", stream.skipped()}});
        }
        sort_by_time(events);

        std::string text;
        for (const auto& e : events) {
            text += serialize_event(e);
            text += '\n';
        }
        io::write_text(out(config, artifact::kEvents), text);

        std::set<ActorId> users;
        std::set<RepoId> repos;
        for (const auto& e : events) {
            users.insert(e.actor_id);
            repos.insert(e.repo_id);
        }
        const auto active = filter_active(events);
        json props = json::array();
        if (!events.empty()) {
            for (const auto& r : stats::proportions(events)) {
                props.push_back({{"event_type", to_string(r.type)}, {"count", r.count}, {"percent", r.percent}});
            }
        }
        write_json(out(config, artifact::kIngestSummary), {{"inputs", std::move(inputs)},
                                                            {"lines", lines},
                                                            {"skipped", skipped},
                                                            {"events", events.size()},
                                                            {"users", users.size()},
                                                            {"repos", repos.size()},
                                                            {"active_users", active.active_users.size()},
                                                            {"active_repos", active.active_repos.size()},
                                                            {"proportions", std::move(props)}});
    });
}

void run_detect_bots(const PipelineConfig& config, const DetectOptions& options) {
    guarded(Stage::DetectBots, config, [&] {
        std::map<std::string, bots::AccountFeatures> features;
        if (options.from_features || options.predict_only) {
            features = bots::parse_features_csv(upstream(config, artifact::kFeatures, Stage::DetectBots, Stage::DetectBots));
        } else {
            features = bots::extract_all_features(load_events(config), true, config.comment_cap);
            io::write_text(out(config, artifact::kFeatures), bots::render_features_csv(features));
        }

        bots::Classifier model;
        if (options.predict_only) {
            model = bots::Classifier::from_json(read_json(upstream(config, artifact::kModel, Stage::DetectBots, Stage::DetectBots)));
        } else {
            if (config.labels.empty()) config_error("detect-bots needs a labels file");
            if (!fs::exists(config.labels)) {
                throw Error(ErrorCode::IoFailure, "labels file " + config.labels.string() + " not found");
            }
            const auto labels = bots::read_labels_csv(config.labels);
            std::vector<bots::AccountFeatures> xs;
            std::vector<bots::Label> ys;
            for (const auto& [login, f] : features) {
                if (auto it = labels.find(login); it != labels.end()) {
                    xs.push_back(f);
                    ys.push_back(it->second);
                }
            }
            std::size_t ignored = 0;
            for (const auto& [login, _] : labels) ignored += !features.contains(login);

            auto params = config.classifier_params;
            params.seed = config.effective_seed();
            const auto x = bots::encode(xs);
            json report = {{"labeled_accounts", xs.size()},
                           {"bot_labels", std::count(ys.begin(), ys.end(), bots::Label::Bot)},
                           {"candidate_accounts", features.size()},
                           {"labels_without_candidate", ignored}};
            report["primary"] = bots::to_json(bots::evaluate_cv(config.classifier, x, ys, config.folds, params.seed, params));
            if (config.baseline) {
                const auto other = config.classifier == bots::ClassifierKind::GradientBoosting
                                       ? bots::ClassifierKind::LogisticRegression
                                       : bots::ClassifierKind::GradientBoosting;
                report["baseline"] = bots::to_json(bots::evaluate_cv(other, x, ys, config.folds, params.seed, params));
            }
            write_json(out(config, artifact::kCvReport), report);
            model = bots::train(config.classifier, x, ys, params);
            write_json(out(config, artifact::kModel), model.to_json());
        }

        std::vector<bots::PredictionRow> rows;
        for (const auto& [login, f] : features) {
            const auto p = bots::predict(model, f);
            rows.push_back({login, p.probability, p.label});
        }
        io::write_text(out(config, artifact::kPredictions), bots::render_predictions_csv(rows));
    });
}

void run_build_teams(const PipelineConfig& config) {
    guarded(Stage::BuildTeams, config, [&] {
        const auto events = load_events(config);
        BotLabels labels;
        for (const auto& r : bots::read_predictions_csv(upstream(config, artifact::kPredictions, Stage::DetectBots))) {
            labels[r.login] = r.label;
        }
        const auto teams = build_teams(events, labels);
        std::vector<TeamSequence> seqs;
        for (const auto& t : teams) seqs.push_back(make_sequence(t));
        seqs = filter_short(std::move(seqs), config.min_length);
        io::write_text(out(config, artifact::kTeams), render_teams_csv(teams));
        io::write_text(out(config, artifact::kSequences), render_sequences_csv(seqs));
        io::write_text(out(config, artifact::kSequencesRaw), render_raw_sequences_csv(seqs));
    });
}

void run_sample(const PipelineConfig& config) {
    guarded(Stage::Sample, config, [&] {
        const auto seqs = load_sequences(config);
        std::vector<matching::TeamVector> minority, majority;
        for (const auto& s : seqs) {
            auto& dst = s.kind == TeamKind::HumanBot ? minority : majority;
            dst.push_back({s.repo_id, frequency_vector(s, config.include_review_comment)});
        }
        if (minority.empty()) throw Error(ErrorCode::EmptySample, "no human-bot team sequences");
        if (majority.empty()) throw Error(ErrorCode::EmptySample, "no human-only team sequences");
        const auto pairs = matching::match_teams(minority, majority, config.effective_threads());
        io::write_text(out(config, artifact::kMatches), matching::render_matches_csv(pairs));

        std::map<RepoId, const std::vector<double>*> by_repo;
        for (const auto& t : majority) by_repo[t.repo_id] = &t.counts;
        std::vector<std::vector<double>> a, b, c;
        for (const auto& t : minority) a.push_back(t.counts);
        for (const auto& t : majority) b.push_back(t.counts);
        for (const auto& p : pairs) c.push_back(*by_repo.at(p.majority_repo_id));
        std::vector<std::string> labels;
        const std::size_t dims = config.include_review_comment ? 7 : 6;
        for (std::size_t d = 0; d < dims; ++d) labels.emplace_back(to_string(kFrequencyTypes[d]));
        io::write_text(out(config, artifact::kMedians),
                       matching::render_medians_csv(matching::median_table(a, b, c, labels)));
    });
}

void run_motifs(const PipelineConfig& config, const MotifOptions& options) {
    guarded(Stage::Motifs, config, [&] {
        const auto g = load_matched_groups(config);
        const std::vector<motif::SequenceGroup> groups = {{kHumanBotGroup, symbols_of(g.human_bot)},
                                                          {kHumanGroup, symbols_of(g.human_matched)}};
        motif::DiscoverOptions base;
        base.k = config.candidates;
        base.alpha = config.alpha;
        base.threads = config.effective_threads();
        const std::size_t lo = options.w.value_or(config.w_min);
        const std::size_t hi = options.w.value_or(config.w_max);
        const std::size_t graph_w = options.w.value_or(config.highlight_w);
        if (lo < 2) config_error("window length must be at least 2");

        const auto sweep = motif::window_sweep(groups, lo, hi, base);
        std::vector<motif::ContrastMotifSet> sets;
        json entries = json::array();
        for (const auto& e : sweep) {
            json entry = {{"w", e.w}, {"excluded", e.excluded}};
            if (e.result) {
                sets.push_back(*e.result);
                entry["candidate_count"] = e.result->candidate_count;
                json gs = json::array();
                for (const auto& gm : e.result->groups) {
                    json motifs = json::array();
                    for (const auto& m : gm.motifs) motifs.push_back(encode_symbols(m.symbols));
                    gs.push_back({{"group", gm.group},
                                  {"candidates", gm.candidates},
                                  {"accepted", gm.motifs.size()},
                                  {"motifs", std::move(motifs)}});
                }
                entry["groups"] = std::move(gs);
            } else {
                entry["error"] = e.error;
            }
            entries.push_back(std::move(entry));
        }
        io::write_text(out(config, artifact::kMotifs), motif::render_motifs_csv(sets));
        write_json(out(config, artifact::kMotifSweep),
                   {{"groups", {{kHumanBotGroup, g.human_bot.size()}, {kHumanGroup, g.human_matched.size()}}},
                    {"alpha", config.alpha},
                    {"candidates_per_group", config.candidates},
                    {"graph_w", graph_w},
                    {"windows", std::move(entries)}});

        const motif::ContrastMotifSet* highlight = nullptr;
        for (const auto& s : sets) {
            if (s.w == graph_w) highlight = &s;
        }
        for (const auto& grp : groups) {
            motif::MotifGraph graph;
            graph.group = grp.name;
            if (highlight) {
                for (const auto& gm : highlight->groups) {
                    if (gm.group == grp.name) graph = motif::motif_graph(gm.motifs, grp.name);
                }
            }
            io::write_text(config.output_dir / motif_graph_name(grp.name), motif::render_dot(graph));
        }
    });
}

json run_length_json(const stats::RunLengthComparison& cmp, stats::RunLengthMode mode) {
    return {{"test", test_json(cmp.test)},
            {"direction", stats::to_string(cmp.direction)},
            {"median_a", cmp.median_a},
            {"median_b", cmp.median_b},
            {"teams_a", cmp.teams_a},
            {"teams_b", cmp.teams_b},
            {"mode", to_string(mode)}};
}

stats::RunLengthComparison compare_run_length_files(const fs::path& group_a, const fs::path& group_b,
                                                    stats::RunLengthMode mode) {
    auto load = [](const fs::path& p) {
        const auto t = io::read_csv(p);
        const auto col = t.column("events");
        std::vector<std::vector<EventType>> out;
        for (const auto& row : t.rows) {
            std::vector<EventType> evs;
            if (!row[col].empty()) {
                for (const auto& name : io::split(row[col], '|')) evs.push_back(parse_event_type(name));
            }
            out.push_back(std::move(evs));
        }
        return out;
    };
    return stats::compare_run_lengths(load(group_a), load(group_b), mode);
}

void run_stats(const PipelineConfig& config) {
    guarded(Stage::Stats, config, [&] {
        const auto g = load_matched_groups(config);
        const auto cmp = stats::compare_run_lengths(raw_of(g.human_bot), raw_of(g.human_matched), config.run_length_mode);
        auto doc = run_length_json(cmp, config.run_length_mode);
        doc["group_a"] = kHumanBotGroup;
        doc["group_b"] = kHumanGroup;
        write_json(out(config, artifact::kRunLengths), doc);
    });
}

json run_report(const PipelineConfig& config) {
    json report;
    guarded(Stage::Report, config, [&] {
        const auto ingest = read_json(upstream(config, artifact::kIngestSummary, Stage::Ingest));
        const auto cv = read_json(upstream(config, artifact::kCvReport, Stage::DetectBots));
        const auto predictions = bots::read_predictions_csv(upstream(config, artifact::kPredictions, Stage::DetectBots));
        const auto teams = io::read_csv(upstream(config, artifact::kTeams, Stage::BuildTeams));
        const auto seqs = io::read_csv(upstream(config, artifact::kSequences, Stage::BuildTeams));
        const auto matches = matching::read_matches_csv(upstream(config, artifact::kMatches, Stage::Sample).string());
        const auto medians = io::read_csv(upstream(config, artifact::kMedians, Stage::Sample));
        const auto sweep = read_json(upstream(config, artifact::kMotifSweep, Stage::Motifs));
        const auto motifs = motif::read_motifs_csv(upstream(config, artifact::kMotifs, Stage::Motifs).string());
        const auto runs = read_json(upstream(config, artifact::kRunLengths, Stage::Stats));

        auto count_kind = [](const io::CsvTable& t, const char* kind) {
            const auto col = t.column("kind");
            return static_cast<std::size_t>(
                std::count_if(t.rows.begin(), t.rows.end(), [&](const auto& r) { return r[col] == kind; }));
        };
        const std::size_t bots_detected = static_cast<std::size_t>(std::count_if(
            predictions.begin(), predictions.end(), [](const auto& r) { return r.label == bots::Label::Bot; }));

        json median_rows = json::array();
        const auto c_type = medians.column("event_type"), c_hb = medians.column("human_bot"),
                   c_h = medians.column("human"), c_d = medians.column("downsampled_human");
        for (const auto& r : medians.rows) {
            median_rows.push_back({{"event_type", r[c_type]},
                                   {"human_bot", io::parse_double(r[c_hb], "human_bot")},
                                   {"human", io::parse_double(r[c_h], "human")},
                                   {"downsampled_human", io::parse_double(r[c_d], "downsampled_human")}});
        }

        json windows = json::array();
        for (const auto& w : sweep.at("windows")) {
            json entry = {{"w", w.at("w")}};
            if (w.contains("error")) {
                entry["error"] = w.at("error");
            } else {
                entry["candidate_count"] = w.at("candidate_count");
                json groups = json::object();
                for (const auto& g : w.at("groups")) groups[g.at("group").get<std::string>()] = g.at("accepted");
                entry["accepted"] = std::move(groups);
            }
            windows.push_back(std::move(entry));
        }
        json motif_rows = json::array();
        for (const auto& m : motifs) {
            motif_rows.push_back({{"group", m.group},
                                  {"w", m.w},
                                  {"symbols", encode_symbols(m.symbols)},
                                  {"mean_own", m.mean_own},
                                  {"mean_other", m.mean_other},
                                  {"p_corrected", m.p_corrected},
                                  {"support", m.support}});
        }

        report = {
            {"version", kVersion},
            {"seed", config.seed ? json(*config.seed) : json(nullptr)},
            {"parameters", {{"folds", config.folds},
                            {"classifier", bots::to_string(config.classifier)},
                            {"min_length", config.min_length},
                            {"w_min", config.w_min},
                            {"w_max", config.w_max},
                            {"highlight_w", config.highlight_w},
                            {"candidates", config.candidates},
                            {"alpha", config.alpha},
                            {"include_review_comment", config.include_review_comment},
                            {"run_length_mode", to_string(config.run_length_mode)}}},
            {"corpus", {{"events", size_field(ingest, "events")},
                        {"skipped_lines", size_field(ingest, "skipped")},
                        {"users", size_field(ingest, "users")},
                        {"repos", size_field(ingest, "repos")},
                        {"active_users", size_field(ingest, "active_users")},
                        {"active_repos", size_field(ingest, "active_repos")},
                        {"teams", teams.rows.size()},
                        {"proportions", ingest.at("proportions")}}},
            {"bot_detection", {{"candidates", predictions.size()},
                               {"detected_bots", bots_detected},
                               {"labeled_accounts", cv.at("labeled_accounts")},
                               {"cv", cv.at("primary")},
                               {"baseline_cv", cv.contains("baseline") ? cv.at("baseline") : json(nullptr)}}},
            {"groups", {{"teams_human_bot", count_kind(teams, "human_bot")},
                        {"teams_human_only", count_kind(teams, "human_only")},
                        {"sequences_human_bot", count_kind(seqs, "human_bot")},
                        {"sequences_human_only", count_kind(seqs, "human_only")},
                        {"matched_pairs", matches.size()}}},
            {"medians", std::move(median_rows)},
            {"motifs", {{"windows", std::move(windows)},
                        {"graph_w", sweep.at("graph_w")},
                        {"accepted", std::move(motif_rows)}}},
            {"run_lengths", runs},
        };
        write_json(out(config, artifact::kReport), report);
    });
    return report;
}

void run_stage(Stage stage, const PipelineConfig& config) {
    switch (stage) {
        case Stage::Ingest: run_ingest(config); break;
        case Stage::DetectBots: run_detect_bots(config); break;
        case Stage::BuildTeams: run_build_teams(config); break;
        case Stage::Sample: run_sample(config); break;
        case Stage::Motifs: run_motifs(config); break;
        case Stage::Stats: run_stats(config); break;
        case Stage::Report: run_report(config); break;
    }
}

json run(const PipelineConfig& config) {
    validate(config);
    for (Stage s : kAllStages) {
        if (s != Stage::Report) run_stage(s, config);
    }
    return run_report(config);
}

}  // namespace teamflow::pipeline
