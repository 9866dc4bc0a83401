#pragma once

#include <span>
#include <string>
#include <vector>

#include "teamflow/event_model.hpp"

namespace teamflow::matching {

struct TeamVector {
    RepoId repo_id = 0;
    std::vector<double> counts;
};

struct MatchedPair {
    RepoId minority_repo_id = 0;
    RepoId majority_repo_id = 0;
    double distance = 0.0;

    friend bool operator==(const MatchedPair&, const MatchedPair&) = default;
};

double euclidean(std::span<const double> a, std::span<const double> b);

// Greedy nearest-neighbour matching without replacement. Minority teams are
// processed by descending total count (ties by repo_id); each takes the
// Euclidean-nearest unused majority team, ties to the smaller repo_id.
// Output is in processing order. Throws MajorityExhausted.
std::vector<MatchedPair> match_teams(const std::vector<TeamVector>& minority, const std::vector<TeamVector>& majority,
                                     unsigned threads = 1);

struct MedianRow {
    std::string label;
    double minority = 0.0;
    double majority_all = 0.0;
    double majority_matched = 0.0;
};

struct MedianTable {
    std::vector<MedianRow> rows;
};

// Component-wise medians (even counts average the middle two). `labels`
// names each component.
MedianTable median_table(const std::vector<std::vector<double>>& minority,
                         const std::vector<std::vector<double>>& majority_all,
                         const std::vector<std::vector<double>>& majority_matched,
                         const std::vector<std::string>& labels);

std::vector<double> component_medians(const std::vector<std::vector<double>>& vectors);

std::string render_matches_csv(const std::vector<MatchedPair>& pairs);
std::vector<MatchedPair> read_matches_csv(const std::string& path);
std::string render_medians_csv(const MedianTable& table);

}  // namespace teamflow::matching
