#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "teamflow/bot_detect.hpp"
#include "teamflow/event_model.hpp"

namespace teamflow {

enum class TeamKind { HumanOnly, HumanBot };

const char* to_string(TeamKind kind) noexcept;
TeamKind parse_team_kind(std::string_view s);

struct Team {
    RepoId repo_id = 0;
    std::set<ActorId> members;
    TeamKind kind = TeamKind::HumanOnly;
    std::vector<Event> raw_events;  // member events only, time ordered
};

// Reduced motif alphabet.
enum class Symbol : std::uint8_t { PU, PR, IS, RC, CR, DE };

inline constexpr std::size_t kSymbolCount = 6;
inline constexpr std::array<Symbol, kSymbolCount> kAllSymbols = {Symbol::PU, Symbol::PR, Symbol::IS,
                                                                 Symbol::RC, Symbol::CR, Symbol::DE};

const char* to_string(Symbol s) noexcept;
// Single-letter persisted code: PU=P, PR=R, IS=I, CR=C, DE=D, RC=V.
char symbol_code(Symbol s) noexcept;
Symbol parse_symbol_code(char c);
std::string encode_symbols(std::span<const Symbol> symbols);
std::vector<Symbol> decode_symbols(std::string_view code);

// Maps an event type to its reduced symbol, or nullopt for dropped types.
std::optional<Symbol> reduce(EventType type) noexcept;

struct TeamSequence {
    RepoId repo_id = 0;
    TeamKind kind = TeamKind::HumanOnly;
    std::vector<Symbol> symbols;
    std::vector<EventType> pre_reduction;

    friend bool operator==(const TeamSequence&, const TeamSequence&) = default;
};

using BotLabels = std::map<std::string, bots::Label>;

// Teams per repository: members are human accounts with at least one push or
// pull request on the repo; bot and non-member events are removed; repos
// with fewer than two members are dropped. HumanBot iff any bot-labeled
// account acted on the repo. Sorted by repo_id.
std::vector<Team> build_teams(const std::vector<Event>& events, const BotLabels& bot_labels);

std::vector<Symbol> reduce_alphabet(std::span<const EventType> raw);

TeamSequence make_sequence(const Team& team);

inline constexpr std::size_t kDefaultMinLength = 5;

std::vector<TeamSequence> filter_short(std::vector<TeamSequence> sequences, std::size_t min_len = kDefaultMinLength);

// Event-frequency vector over Push, PullRequest, Issues, IssueComment,
// Create, Delete (and PullRequestReviewComment when requested), counted on
// the pre-reduction events.
inline constexpr std::array<EventType, 7> kFrequencyTypes = {
    EventType::Push,   EventType::PullRequest, EventType::Issues,
    EventType::IssueComment, EventType::Create, EventType::Delete,
    EventType::PullRequestReviewComment,
};

std::vector<double> frequency_vector(const TeamSequence& seq, bool include_review_comment = false);
std::vector<double> frequency_vector(std::span<const EventType> events, bool include_review_comment = false);

// Persisted forms. sequences.csv: repo_id,kind,symbols. sequences_raw.csv:
// repo_id,kind,events with '|'-separated event type names.
std::string render_sequences_csv(const std::vector<TeamSequence>& seqs);
std::string render_raw_sequences_csv(const std::vector<TeamSequence>& seqs);
std::string render_teams_csv(const std::vector<Team>& teams);

// Loads both files and joins them by repo_id.
std::vector<TeamSequence> read_sequences(const std::filesystem::path& symbols_csv,
                                         const std::filesystem::path& raw_csv);

}  // namespace teamflow
