#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "teamflow/event_model.hpp"

namespace teamflow::stats {

enum class UTestMethod { Exact, NormalApprox };

struct UTestResult {
    double u_statistic = 0.0;  // U of the first sample
    double p_two_sided = 1.0;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    UTestMethod method = UTestMethod::NormalApprox;
};

// Largest combined sample size that uses the exact permutation distribution
// (only when the pooled sample has no ties).
inline constexpr std::size_t kExactMaxTotal = 10;

// Two-sided Mann-Whitney U test. U is computed from midrank sums. Small
// tie-free samples use the exact null distribution; everything else uses the
// normal approximation with tie and continuity correction.
UTestResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

// Same statistic, forced normal approximation. Exposed for comparison with
// the exact route.
UTestResult mann_whitney_u_normal(std::span<const double> a, std::span<const double> b);

// One-sided p-value for the alternative "a tends to be greater than b",
// normal approximation with continuity correction.
double mann_whitney_p_greater(std::span<const double> a, std::span<const double> b);

// Number of rank subsets of size n1 out of n1+n2 with each U value; index u.
std::vector<double> exact_u_counts(std::size_t n1, std::size_t n2);

// Midranks (1-based) of the pooled values.
std::vector<double> midranks(std::span<const double> values);

// Mean length of maximal runs of IssueComment events, nullopt when the
// sequence has none.
std::optional<double> run_length_mean(std::span<const EventType> events);

// Lengths of all maximal IssueComment runs, in order.
std::vector<std::size_t> issue_comment_runs(std::span<const EventType> events);

enum class Direction { FirstHigher, SecondHigher, Tie };

struct RunLengthComparison {
    UTestResult test;
    Direction direction = Direction::Tie;
    double median_a = 0.0;
    double median_b = 0.0;
    std::size_t teams_a = 0;  // teams contributing (with ≥1 comment)
    std::size_t teams_b = 0;
};

enum class RunLengthMode {
    PerTeamMean,  // one observation per team: its mean run length
    PooledRuns,   // every run of every team is an observation
};

// U-test over per-team mean run lengths (or pooled runs). Teams without any
// IssueComment are excluded. Throws EmptySample when a group has none left.
RunLengthComparison compare_run_lengths(const std::vector<std::vector<EventType>>& group_a,
                                        const std::vector<std::vector<EventType>>& group_b,
                                        RunLengthMode mode = RunLengthMode::PerTeamMean);

double median(std::vector<double> values);

struct ProportionRow {
    EventType type;
    std::size_t count = 0;
    double percent = 0.0;
};

// Event-type percentages sorted descending by count (ties by type order).
// Types with zero count are omitted. Throws EmptyCorpus on empty input.
std::vector<ProportionRow> proportions(std::span<const EventType> types);
std::vector<ProportionRow> proportions(const std::vector<Event>& events);

const char* to_string(UTestMethod method) noexcept;
const char* to_string(Direction direction) noexcept;

}  // namespace teamflow::stats
