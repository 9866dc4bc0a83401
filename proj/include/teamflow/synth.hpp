#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "teamflow/bot_detect.hpp"
#include "teamflow/event_model.hpp"
#include "teamflow/team_seq.hpp"

namespace teamflow::synth {

// Event-type percentages of the reference corpus, in EventType order.
std::array<double, kEventTypeCount> reference_type_weights();

// Background weights over the reduced alphabet (PU, PR, IS, RC, CR, DE),
// with Issues and IssueComment merged into IS.
std::array<double, kSymbolCount> reduced_weights();

// i.i.d. draws from `weights` (EventType order).
std::vector<EventType> sample_event_types(std::size_t n, const std::array<double, kEventTypeCount>& weights,
                                          std::uint64_t seed);

enum class CommentMode {
    Background,    // IS drawn i.i.d. like every other symbol
    Clustered,     // comments inserted as consecutive blocks
    Interspersed,  // comments inserted one at a time in distinct gaps
};

struct GroupSpec {
    std::string name;
    TeamKind kind = TeamKind::HumanOnly;
    std::size_t n_teams = 100;
    CommentMode comments = CommentMode::Background;
    // Per-group overrides; empty / zero means the corpus-wide setting.
    std::vector<double> weights;
    std::size_t min_length = 0;
    std::size_t max_length = 0;
};

struct PlantedMotif {
    std::vector<Symbol> symbols;
    std::vector<double> rates;  // insertion probability per group
};

struct SynthSpec {
    std::uint64_t seed = 1;
    std::vector<GroupSpec> groups;
    std::size_t min_length = 8;
    std::size_t max_length = 40;
    std::array<double, kSymbolCount> weights = reduced_weights();
    std::vector<PlantedMotif> motifs;

    // Clustered / interspersed modes: comments per team = round(length * comment_rate).
    double comment_rate = 0.2;
    std::size_t cluster_min = 2;
    std::size_t cluster_max = 5;

    std::size_t members_min = 2;
    std::size_t members_max = 5;
    // Probability that a human member's login contains "bot" (e.g. "abbott").
    double bot_named_human_rate = 0.05;

    // Bot activity on human-bot repos.
    std::size_t bot_pool = 20;
    std::size_t bots_per_team_max = 2;
    std::size_t bot_events_max = 6;
    // Watch/Fork events from non-members, per repo.
    double outsider_rate = 0.3;

    // Standalone candidate accounts (outside any team) for classifier training.
    std::size_t standalone_accounts = 0;
    std::size_t standalone_events_max = 40;
    double account_noise = 0.1;
    // Fraction of candidate logins written to the labels file.
    double labeled_fraction = 1.0;

    std::string start_time = "2019-06-01T00:00:00Z";
};

// Sequence-level generation: one TeamSequence per team plus the manifest
// (insertion offsets are positions in the reduced sequence).
struct SequenceCorpus {
    std::vector<TeamSequence> sequences;
    std::vector<std::size_t> group_of;  // group index per sequence
    nlohmann::json manifest;
};

SequenceCorpus generate_sequences(const SynthSpec& spec);

struct SynthCorpus {
    std::vector<Event> events;  // normalized records, time ordered
    nlohmann::json manifest;
    std::map<std::string, bots::Label> labels;  // training labels subset
    std::map<std::string, bots::Label> truth;   // every "bot"-named login
};

// Throws InvalidSpec.
SynthCorpus generate(const SynthSpec& spec);

struct BotAccountSpec {
    std::uint64_t seed = 7;
    std::size_t n_accounts = 600;
    double bot_fraction = 0.7;
    // Per account and per feature, probability of drawing that feature from
    // the other class's generator.
    double noise = 0.0;
    std::size_t min_events = 6;
    std::size_t max_events = 40;
    std::string start_time = "2019-06-01T00:00:00Z";
};

struct SynthAccount {
    std::string login;
    bots::Label label = bots::Label::Human;
    std::vector<Event> events;
};

std::vector<SynthAccount> generate_bot_accounts(const BotAccountSpec& spec);

void validate(const SynthSpec& spec);

nlohmann::json to_json(const SynthSpec& spec);
SynthSpec spec_from_json(const nlohmann::json& doc);

// Two-group spec used by the bundled sample and the examples.
SynthSpec default_pipeline_spec(std::uint64_t seed);

}  // namespace teamflow::synth
