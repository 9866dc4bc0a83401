#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "teamflow/team_seq.hpp"

namespace teamflow::motif {

using Window = std::vector<Symbol>;

struct SequenceGroup {
    std::string name;
    std::vector<std::vector<Symbol>> sequences;
};

struct Motif {
    Window symbols;
    std::string group;
    double mean_dist_own = 0.0;
    double mean_dist_other = 0.0;  // smallest mean over the other groups
    double p_value = 1.0;          // Bonferroni-corrected, largest over the other groups
    std::size_t support = 0;       // own-group sequences containing an exact occurrence
};

struct GroupMotifs {
    std::string group;
    std::size_t candidates = 0;
    std::vector<Motif> motifs;  // ascending mean_dist_own
};

struct ContrastMotifSet {
    std::size_t w = 0;
    std::size_t candidate_count = 0;  // Bonferroni denominator
    std::vector<GroupMotifs> groups;  // same order as the input groups
};

// Candidate limit meaning "every distinct window".
inline constexpr std::size_t kAllWindows = 0;
inline constexpr std::size_t kDefaultCandidates = 50;
inline constexpr double kDefaultAlpha = 0.01;

// The k distinct length-w windows with the highest document frequency; ties
// broken lexicographically in symbol order PU < PR < IS < RC < CR < DE.
// Sequences shorter than w contribute nothing. Throws WindowTooLong when no
// sequence reaches length w.
std::vector<Window> candidates(std::span<const std::vector<Symbol>> group, std::size_t w, std::size_t k);

// Number of sequences containing at least one exact occurrence.
std::size_t document_frequency(std::span<const std::vector<Symbol>> group, std::span<const Symbol> window);

// Minimum normalized Hamming distance over all length-|m| windows of s.
// Throws SequenceTooShort.
double motif_distance(std::span<const Symbol> m, std::span<const Symbol> s);

struct DiscoverOptions {
    std::size_t w = 4;
    std::size_t k = kDefaultCandidates;
    double alpha = kDefaultAlpha;
    unsigned threads = 1;
};

// Per-candidate statistics, exposed for inspection and oracle checks.
struct CandidateStats {
    Window symbols;
    std::size_t group = 0;
    double mean_own = 0.0;
    std::vector<double> mean_other;  // indexed by group (own slot unused)
    std::vector<double> p_raw;       // two-sided U-test p vs each group
    std::size_t support = 0;
};

std::vector<CandidateStats> score_candidates(const std::vector<SequenceGroup>& groups, const DiscoverOptions& options);

// Accepts candidate m for group g iff its mean distance to g is strictly below
// the mean to every other group and every Bonferroni-corrected U-test p-value
// is below alpha.
ContrastMotifSet discover(const std::vector<SequenceGroup>& groups, const DiscoverOptions& options);

struct SweepEntry {
    std::size_t w = 0;
    std::optional<ContrastMotifSet> result;
    std::string error;                         // set when result is empty
    std::map<std::string, std::size_t> excluded;  // sequences shorter than w, per group
};

// discover() for each w in [w_min, w_max]; sequences shorter than w are
// dropped for that w. Failures are recorded per entry.
std::vector<SweepEntry> window_sweep(const std::vector<SequenceGroup>& groups, std::size_t w_min, std::size_t w_max,
                                     const DiscoverOptions& base);

struct MotifGraph {
    std::string group;
    std::set<Symbol> nodes;
    std::map<std::pair<Symbol, Symbol>, std::size_t> edges;
};

MotifGraph motif_graph(std::span<const Motif> motifs, std::string group = {});

std::string render_dot(const MotifGraph& graph);
std::string render_motifs_csv(const std::vector<ContrastMotifSet>& sets);

struct MotifRow {
    std::string group;
    std::size_t w = 0;
    Window symbols;
    double mean_own = 0.0;
    double mean_other = 0.0;
    double p_corrected = 1.0;
    std::size_t support = 0;
};
std::vector<MotifRow> read_motifs_csv(const std::string& path);

}  // namespace teamflow::motif
