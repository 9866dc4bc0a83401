#include "teamflow/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "teamflow/error.hpp"
#include "teamflow/io_util.hpp"
#include "teamflow/stats.hpp"

namespace teamflow::matching {

double euclidean(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw Error(ErrorCode::InvalidArgument, "vector dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

namespace {

struct Candidate {
    double dist2 = std::numeric_limits<double>::infinity();
    RepoId repo = std::numeric_limits<RepoId>::max();
    std::size_t index = 0;

    bool better_than(const Candidate& o) const {
        return dist2 < o.dist2 || (dist2 == o.dist2 && repo < o.repo);
    }
};

Candidate scan(const std::vector<TeamVector>& majority, const std::vector<char>& used, std::span<const double> query,
               std::size_t begin, std::size_t end) {
    Candidate best;
    for (std::size_t j = begin; j < end; ++j) {
        if (used[j]) continue;
        const auto& c = majority[j].counts;
        double s = 0.0;
        for (std::size_t d = 0; d < c.size(); ++d) s += (c[d] - query[d]) * (c[d] - query[d]);
        Candidate cand{s, majority[j].repo_id, j};
        if (cand.better_than(best)) best = cand;
    }
    return best;
}

}  // namespace

std::vector<MatchedPair> match_teams(const std::vector<TeamVector>& minority, const std::vector<TeamVector>& majority,
                                     unsigned threads) {
    if (majority.size() < minority.size()) {
        throw Error(ErrorCode::MajorityExhausted, std::to_string(minority.size()) + " minority teams but only " +
                                                      std::to_string(majority.size()) + " majority teams");
    }
    if (minority.empty()) return {};
    const std::size_t dims = minority.front().counts.size();
    for (const auto* group : {&minority, &majority}) {
        for (const auto& t : *group) {
            if (t.counts.size() != dims) throw Error(ErrorCode::InvalidArgument, "vector dimension mismatch");
        }
    }

    std::vector<std::size_t> order(minority.size());
    std::iota(order.begin(), order.end(), 0);
    auto total = [](const TeamVector& t) { return std::accumulate(t.counts.begin(), t.counts.end(), 0.0); };
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
        const double ta = total(minority[a]), tb = total(minority[b]);
        return ta > tb || (ta == tb && minority[a].repo_id < minority[b].repo_id);
    });

    threads = std::max(1u, threads);
    const bool parallel = threads > 1 && majority.size() >= 4096;
    std::vector<char> used(majority.size(), 0);
    std::vector<MatchedPair> pairs;
    pairs.reserve(minority.size());
    for (auto mi : order) {
        const auto& q = minority[mi].counts;
        Candidate best;
        if (parallel) {
            std::vector<Candidate> partial(threads);
            std::vector<std::jthread> workers;
            const std::size_t chunk = (majority.size() + threads - 1) / threads;
            for (unsigned t = 0; t < threads; ++t) {
                const std::size_t b = std::min(majority.size(), t * chunk);
                const std::size_t e = std::min(majority.size(), b + chunk);
                workers.emplace_back([&, t, b, e] { partial[t] = scan(majority, used, q, b, e); });
            }
            workers.clear();
            for (const auto& c : partial) {
                if (c.better_than(best)) best = c;
            }
        } else {
            best = scan(majority, used, q, 0, majority.size());
        }
        used[best.index] = 1;
        pairs.push_back({minority[mi].repo_id, best.repo, std::sqrt(best.dist2)});
    }
    return pairs;
}

std::vector<double> component_medians(const std::vector<std::vector<double>>& vectors) {
    if (vectors.empty()) throw Error(ErrorCode::EmptySample, "median of an empty group");
    const std::size_t dims = vectors.front().size();
    std::vector<double> out(dims);
    std::vector<double> column(vectors.size());
    for (std::size_t d = 0; d < dims; ++d) {
        for (std::size_t i = 0; i < vectors.size(); ++i) column[i] = vectors[i].at(d);
        out[d] = stats::median(column);
    }
    return out;
}

MedianTable median_table(const std::vector<std::vector<double>>& minority,
                         const std::vector<std::vector<double>>& majority_all,
                         const std::vector<std::vector<double>>& majority_matched,
                         const std::vector<std::string>& labels) {
    const auto a = component_medians(minority);
    const auto b = component_medians(majority_all);
    const auto c = component_medians(majority_matched);
    if (a.size() != labels.size() || b.size() != labels.size() || c.size() != labels.size()) {
        throw Error(ErrorCode::InvalidArgument, "label count does not match vector dimension");
    }
    MedianTable t;
    for (std::size_t d = 0; d < labels.size(); ++d) t.rows.push_back({labels[d], a[d], b[d], c[d]});
    return t;
}

std::string render_matches_csv(const std::vector<MatchedPair>& pairs) {
    io::CsvTable t;
    t.header = {"minority_repo_id", "majority_repo_id", "distance"};
    for (const auto& p : pairs) {
        t.rows.push_back({std::to_string(p.minority_repo_id), std::to_string(p.majority_repo_id),
                          io::format_double(p.distance)});
    }
    return io::render_csv(t);
}

std::vector<MatchedPair> read_matches_csv(const std::string& path) {
    const auto t = io::read_csv(path);
    const auto a = t.column("minority_repo_id"), b = t.column("majority_repo_id"), d = t.column("distance");
    std::vector<MatchedPair> out;
    for (const auto& row : t.rows) {
        out.push_back({io::parse_int(row[a], "minority_repo_id"), io::parse_int(row[b], "majority_repo_id"),
                       io::parse_double(row[d], "distance")});
    }
    return out;
}

std::string render_medians_csv(const MedianTable& table) {
    io::CsvTable t;
    t.header = {"event_type", "human_bot", "human", "downsampled_human"};
    for (const auto& r : table.rows) {
        t.rows.push_back({r.label, io::format_double(r.minority), io::format_double(r.majority_all),
                          io::format_double(r.majority_matched)});
    }
    return io::render_csv(t);
}

}  // namespace teamflow::matching
