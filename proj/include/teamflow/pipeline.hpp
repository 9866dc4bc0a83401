#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "teamflow/bot_detect.hpp"
#include "teamflow/stats.hpp"

namespace teamflow::pipeline {

inline constexpr const char* kVersion = "0.1.0";

struct PipelineConfig {
    std::vector<std::filesystem::path> inputs;
    std::filesystem::path labels;
    std::filesystem::path output_dir = "out";
    bool lenient = false;

    std::optional<std::uint64_t> seed;
    bool reproducible = true;
    unsigned threads = 0;  // 0 = available cores

    bots::ClassifierKind classifier = bots::ClassifierKind::GradientBoosting;
    bots::ClassifierParams classifier_params;
    bool baseline = true;  // also cross-validate logistic regression
    std::size_t folds = 5;
    std::size_t comment_cap = bots::kDefaultCommentCap;

    std::size_t min_length = 5;

    bool include_review_comment = false;

    std::size_t w_min = 2;
    std::size_t w_max = 5;
    std::size_t highlight_w = 4;
    std::size_t candidates = 50;
    double alpha = 0.01;

    stats::RunLengthMode run_length_mode = stats::RunLengthMode::PerTeamMean;

    unsigned effective_threads() const;
    std::uint64_t effective_seed() const;
};

// Throws InvalidConfig.
void validate(const PipelineConfig& config);

// Unknown keys are rejected. Relative paths resolve against `base_dir`.
PipelineConfig config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
nlohmann::json to_json(const PipelineConfig& config);
PipelineConfig load_config(const std::filesystem::path& path);

enum class Stage { Ingest, DetectBots, BuildTeams, Sample, Motifs, Stats, Report };

inline constexpr Stage kAllStages[] = {Stage::Ingest, Stage::DetectBots, Stage::BuildTeams, Stage::Sample,
                                       Stage::Motifs, Stage::Stats,      Stage::Report};

const char* to_string(Stage stage) noexcept;

// Artifact file names inside the output directory.
namespace artifact {
inline constexpr const char* kEvents = "events.norm.ndjson";
inline constexpr const char* kIngestSummary = "ingest_summary.json";
inline constexpr const char* kFeatures = "bot_features.csv";
inline constexpr const char* kCvReport = "cv_report.json";
inline constexpr const char* kModel = "model.json";
inline constexpr const char* kPredictions = "bot_predictions.csv";
inline constexpr const char* kTeams = "teams.csv";
inline constexpr const char* kSequences = "sequences.csv";
inline constexpr const char* kSequencesRaw = "sequences_raw.csv";
inline constexpr const char* kMatches = "matches.csv";
inline constexpr const char* kMedians = "medians.csv";
inline constexpr const char* kMotifs = "motifs.csv";
inline constexpr const char* kMotifSweep = "motif_sweep.json";
inline constexpr const char* kRunLengths = "run_lengths.json";
inline constexpr const char* kReport = "report.json";
}  // namespace artifact

std::string motif_graph_name(const std::string& group);

struct DetectOptions {
    bool from_features = false;  // reuse bot_features.csv instead of re-extracting
    bool predict_only = false;   // reuse bot_features.csv and model.json; write predictions only
};

struct MotifOptions {
    std::optional<std::size_t> w;  // single window instead of the sweep
};

// Each stage reads its inputs from persisted artifacts and writes its own.
// A stage marks itself stale (<stage>.stale in the output directory) while
// running; the marker is removed on success. Missing or stale inputs raise
// MissingUpstreamArtifact naming the stage to rerun.
void run_ingest(const PipelineConfig& config);
void run_detect_bots(const PipelineConfig& config, const DetectOptions& options = {});
void run_build_teams(const PipelineConfig& config);
void run_sample(const PipelineConfig& config);
void run_motifs(const PipelineConfig& config, const MotifOptions& options = {});
void run_stats(const PipelineConfig& config);
nlohmann::json run_report(const PipelineConfig& config);

// All stages in order; returns the report document.
nlohmann::json run(const PipelineConfig& config);

void run_stage(Stage stage, const PipelineConfig& config);

// Run-length comparison of two persisted sequences_raw-style CSV files.
nlohmann::json run_length_json(const stats::RunLengthComparison& cmp, stats::RunLengthMode mode);
stats::RunLengthComparison compare_run_length_files(const std::filesystem::path& group_a,
                                                    const std::filesystem::path& group_b,
                                                    stats::RunLengthMode mode);

const char* to_string(stats::RunLengthMode mode) noexcept;
stats::RunLengthMode parse_run_length_mode(std::string_view s);

}  // namespace teamflow::pipeline
