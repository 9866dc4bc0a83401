// teamflow: command-line front end for the analysis pipeline.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "teamflow/error.hpp"
#include "teamflow/io_util.hpp"
#include "teamflow/pipeline.hpp"
#include "teamflow/synth.hpp"

namespace {

using namespace teamflow;
namespace fs = std::filesystem;

struct Overrides {
    std::string config;
    std::vector<std::string> inputs;
    std::string labels;
    std::string output_dir;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    bool lenient = false;
    bool no_reproducible = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("-c,--config", o.config, "pipeline config (JSON)");
    cmd->add_option("-i,--input", o.inputs, "event file(s); replaces the configured inputs");
    cmd->add_option("--labels", o.labels, "bot labels CSV (login,is_bot)");
    cmd->add_option("-o,--output-dir", o.output_dir, "artifact directory");
    cmd->add_option("--seed", o.seed, "random seed");
    cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
    cmd->add_flag("--lenient", o.lenient, "skip malformed input lines with a warning");
    cmd->add_flag("--no-reproducible", o.no_reproducible, "allow running without a seed");
}

pipeline::PipelineConfig resolve_config(const Overrides& o) {
    pipeline::PipelineConfig c = o.config.empty() ? pipeline::PipelineConfig{} : pipeline::load_config(o.config);
    if (!o.inputs.empty()) c.inputs.assign(o.inputs.begin(), o.inputs.end());
    if (!o.labels.empty()) c.labels = o.labels;
    if (!o.output_dir.empty()) c.output_dir = o.output_dir;
    if (o.seed) c.seed = o.seed;
    if (o.threads) c.threads = *o.threads;
    if (o.lenient) c.lenient = true;
    if (o.no_reproducible) c.reproducible = false;
    pipeline::validate(c);
    return c;
}

std::string labels_csv(const std::map<std::string, bots::Label>& labels) {
    std::string out = "login,is_bot\n";
    for (const auto& [login, label] : labels) out += login + (label == bots::Label::Bot ? ",1\n" : ",0\n");
    return out;
}

void write_events(const fs::path& path, const std::vector<Event>& events) {
    std::string text;
    for (const auto& e : events) {
        text += serialize_event(e);
        text += '\n';
    }
    if (path.extension() == ".gz") {
        io::write_gzip(path, text);
    } else {
        io::write_text(path, text);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"teamflow: bot detection, team sequences and contrast motifs over event streams"};
    app.require_subcommand(1);
    app.set_version_flag("--version", pipeline::kVersion);

    Overrides o;
    auto* run = app.add_subcommand("run", "run every stage and write report.json");
    auto* ingest = app.add_subcommand("ingest", "normalize and merge the input events");
    auto* detect = app.add_subcommand("detect-bots", "extract features, cross-validate, classify candidates");
    auto* teams = app.add_subcommand("build-teams", "build team sequences");
    auto* sample = app.add_subcommand("sample", "match human-bot teams to human-only teams");
    auto* motifs = app.add_subcommand("motifs", "discover contrast motifs");
    auto* stats = app.add_subcommand("stats", "comment run-length test");
    auto* report = app.add_subcommand("report", "aggregate persisted artifacts into report.json");
    for (auto* cmd : {run, ingest, detect, teams, sample, motifs, stats, report}) add_common(cmd, o);

    pipeline::DetectOptions detect_opts;
    detect->add_flag("--from-features", detect_opts.from_features, "reuse bot_features.csv");
    detect->add_flag("--predict-only", detect_opts.predict_only, "reuse bot_features.csv and model.json");

    pipeline::MotifOptions motif_opts;
    motifs->add_option("--w", motif_opts.w, "single window length instead of the sweep");

    bool run_lengths = true;
    std::string group_a, group_b, mode, stats_out;
    stats->add_flag("--run-lengths", run_lengths, "issue-comment run-length comparison (default)");
    stats->add_option("--group-a", group_a, "sequences_raw-style CSV for group A");
    stats->add_option("--group-b", group_b, "sequences_raw-style CSV for group B");
    stats->add_option("--mode", mode, "per_team_mean | pooled_runs");
    stats->add_option("--out", stats_out, "write the JSON here instead of stdout (with --group-a/--group-b)");

    auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
    std::string spec_path, synth_dir;
    std::uint64_t synth_seed = 1;
    std::size_t bot_accounts = 0;
    double noise = 0.1;
    bool plain = false;
    synth->add_option("--spec", spec_path, "synthetic corpus spec (JSON)");
    synth->add_option("--seed", synth_seed, "seed for the default spec");
    synth->add_option("-o,--out", synth_dir, "output directory")->required();
    synth->add_option("--bot-accounts", bot_accounts, "emit the bot-account fixture with this many accounts");
    synth->add_option("--noise", noise, "feature noise for --bot-accounts");
    synth->add_flag("--plain", plain, "write uncompressed events.ndjson");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (synth->parsed()) {
            const fs::path dir = synth_dir;
            const fs::path events_path = dir / (plain ? "events.ndjson" : "events.ndjson.gz");
            if (bot_accounts > 0) {
                synth::BotAccountSpec spec;
                spec.seed = synth_seed;
                spec.n_accounts = bot_accounts;
                spec.noise = noise;
                std::vector<Event> events;
                std::map<std::string, bots::Label> labels;
                for (const auto& a : synth::generate_bot_accounts(spec)) {
                    events.insert(events.end(), a.events.begin(), a.events.end());
                    labels[a.login] = a.label;
                }
                sort_by_time(events);
                write_events(events_path, events);
                io::write_text(dir / "labels.csv", labels_csv(labels));
            } else {
                synth::SynthSpec spec = synth::default_pipeline_spec(synth_seed);
                if (!spec_path.empty()) {
                    try {
                        spec = synth::spec_from_json(nlohmann::json::parse(io::read_text(spec_path)));
                    } catch (const nlohmann::json::exception& e) {
                        throw Error(ErrorCode::InvalidSpec, spec_path + ": " + e.what());
                    }
                }
                const auto corpus = synth::generate(spec);
                write_events(events_path, corpus.events);
                io::write_text(dir / "labels.csv", labels_csv(corpus.labels));
                io::write_text(dir / "truth.csv", labels_csv(corpus.truth));
                io::write_text(dir / "manifest.json", corpus.manifest.dump(2) + "\n");
            }
            std::cout << "wrote " << events_path.string() << '\n';
            return 0;
        }

        if (stats->parsed() && (!group_a.empty() || !group_b.empty())) {
            if (group_a.empty() || group_b.empty()) {
                throw Error(ErrorCode::InvalidArgument, "--group-a and --group-b go together");
            }
            const auto m = mode.empty() ? stats::RunLengthMode::PerTeamMean : pipeline::parse_run_length_mode(mode);
            const auto doc = pipeline::run_length_json(pipeline::compare_run_length_files(group_a, group_b, m), m);
            if (stats_out.empty()) {
                std::cout << doc.dump(2) << '\n';
            } else {
                io::write_text(stats_out, doc.dump(2) + "\n");
            }
            return 0;
        }

        auto config = resolve_config(o);
        if (!mode.empty()) config.run_length_mode = pipeline::parse_run_length_mode(mode);

        if (run->parsed()) {
            const auto doc = pipeline::run(config);
            std::cout << "report: " << (config.output_dir / pipeline::artifact::kReport).string() << '\n';
            std::cout << "matched pairs: " << doc["groups"]["matched_pairs"] << ", mean F1 "
                      << doc["bot_detection"]["cv"]["mean_f1"] << '\n';
        } else if (ingest->parsed()) {
            pipeline::run_ingest(config);
        } else if (detect->parsed()) {
            pipeline::run_detect_bots(config, detect_opts);
        } else if (teams->parsed()) {
            pipeline::run_build_teams(config);
        } else if (sample->parsed()) {
            pipeline::run_sample(config);
        } else if (motifs->parsed()) {
            pipeline::run_motifs(config, motif_opts);
        } else if (stats->parsed()) {
            pipeline::run_stats(config);
        } else if (report->parsed()) {
            pipeline::run_report(config);
        }
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 4;
    }
}
