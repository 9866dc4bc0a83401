#include "teamflow/bot_detect.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "teamflow/error.hpp"
#include "teamflow/io_util.hpp"
#include "teamflow/rng.hpp"

namespace teamflow::bots {

using nlohmann::json;

namespace {

std::string lowercase(std::string_view s) {
    std::string out(s);
    for (auto& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

bool is_token_char(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

// Sparse term-frequency vector sorted by term id.
using SparseVector = std::vector<std::pair<int, double>>;

double dot(const SparseVector& a, const SparseVector& b) {
    double s = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].first == b[j].first) {
            s += a[i].second * b[j].second;
            ++i;
            ++j;
        } else if (a[i].first < b[j].first) {
            ++i;
        } else {
            ++j;
        }
    }
    return s;
}

void check_finite(std::span<const double> x) {
    for (double v : x) {
        if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteFeature, "feature value is not finite");
    }
}

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// Mean logistic loss for raw scores f and 0/1 targets y.
double log_loss(std::span<const double> f, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        // log(1 + exp(f)) - y f, computed stably
        const double z = f[i];
        const double softplus = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
        s += softplus - y[i] * z;
    }
    return s / static_cast<double>(f.size());
}

// ---------------------------------------------------------------------------
// Gradient-boosted regression trees on logistic loss.

class TreeBuilder {
public:
    TreeBuilder(const FeatureMatrix& x, std::span<const double> residual, std::span<const double> hessian,
                int max_depth, int min_leaf)
        : x_(x), residual_(residual), hessian_(hessian), max_depth_(max_depth), min_leaf_(min_leaf) {}

    RegressionTree build() {
        std::vector<std::size_t> all(x_.size());
        std::iota(all.begin(), all.end(), 0);
        tree_.nodes.clear();
        grow(all, 0);
        return std::move(tree_);
    }

private:
    struct Split {
        int feature = -1;
        double threshold = 0.0;
        double gain = 0.0;
    };

    double leaf_value(const std::vector<std::size_t>& idx) const {
        double num = 0.0, den = 0.0;
        for (auto i : idx) {
            num += residual_[i];
            den += hessian_[i];
        }
        if (std::abs(den) < 1e-150) return 0.0;
        return num / den;
    }

    Split best_split(const std::vector<std::size_t>& idx) const {
        Split best;
        const std::size_t n = idx.size();
        double total = 0.0;
        for (auto i : idx) total += residual_[i];
        const double parent = total * total / static_cast<double>(n);

        std::vector<std::size_t> order = idx;
        const std::size_t n_features = x_.front().size();
        for (std::size_t f = 0; f < n_features; ++f) {
            std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x_[a][f] < x_[b][f]; });
            double left_sum = 0.0;
            for (std::size_t pos = 0; pos + 1 < n; ++pos) {
                left_sum += residual_[order[pos]];
                const double here = x_[order[pos]][f];
                const double next = x_[order[pos + 1]][f];
                if (here == next) continue;
                const auto n_left = pos + 1;
                const auto n_right = n - n_left;
                if (n_left < static_cast<std::size_t>(min_leaf_) || n_right < static_cast<std::size_t>(min_leaf_)) {
                    continue;
                }
                const double right_sum = total - left_sum;
                const double gain = left_sum * left_sum / static_cast<double>(n_left) +
                                    right_sum * right_sum / static_cast<double>(n_right) - parent;
                if (gain > best.gain + 1e-12) {
                    best = {static_cast<int>(f), 0.5 * (here + next), gain};
                }
            }
        }
        return best;
    }

    int grow(const std::vector<std::size_t>& idx, int depth) {
        const int id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.push_back({});
        Split split;
        if (depth < max_depth_ && idx.size() >= 2) split = best_split(idx);
        if (split.feature < 0) {
            tree_.nodes[id].value = leaf_value(idx);
            return id;
        }
        std::vector<std::size_t> left, right;
        for (auto i : idx) (x_[i][split.feature] <= split.threshold ? left : right).push_back(i);
        const int l = grow(left, depth + 1);
        const int r = grow(right, depth + 1);
        auto& node = tree_.nodes[id];
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.left = l;
        node.right = r;
        return id;
    }

    const FeatureMatrix& x_;
    std::span<const double> residual_;
    std::span<const double> hessian_;
    int max_depth_;
    int min_leaf_;
    RegressionTree tree_;
};

void validate_training_set(const FeatureMatrix& x, std::span<const Label> y) {
    if (x.size() != y.size()) throw Error(ErrorCode::DegenerateLabels, "feature/label count mismatch");
    if (x.size() < 2) throw Error(ErrorCode::DegenerateLabels, "need at least two samples");
    const auto bots = std::count(y.begin(), y.end(), Label::Bot);
    if (bots == 0 || bots == static_cast<std::ptrdiff_t>(y.size())) {
        throw Error(ErrorCode::DegenerateLabels, "training labels contain a single class");
    }
    const std::size_t d = x.front().size();
    if (d == 0) throw Error(ErrorCode::InvalidArgument, "empty feature rows");
    for (const auto& row : x) {
        if (row.size() != d) throw Error(ErrorCode::InvalidArgument, "ragged feature matrix");
        check_finite(row);
    }
}

json params_to_json(const ClassifierParams& p) {
    return {{"rounds", p.rounds},         {"max_depth", p.max_depth},
            {"learning_rate", p.learning_rate}, {"min_samples_leaf", p.min_samples_leaf},
            {"l2", p.l2},                 {"max_iterations", p.max_iterations},
            {"tolerance", p.tolerance},   {"threshold", p.threshold},
            {"seed", p.seed}};
}

ClassifierParams params_from_json(const json& j) {
    ClassifierParams p;
    p.rounds = j.value("rounds", p.rounds);
    p.max_depth = j.value("max_depth", p.max_depth);
    p.learning_rate = j.value("learning_rate", p.learning_rate);
    p.min_samples_leaf = j.value("min_samples_leaf", p.min_samples_leaf);
    p.l2 = j.value("l2", p.l2);
    p.max_iterations = j.value("max_iterations", p.max_iterations);
    p.tolerance = j.value("tolerance", p.tolerance);
    p.threshold = j.value("threshold", p.threshold);
    p.seed = j.value("seed", p.seed);
    return p;
}

}  // namespace

bool contains_bot(std::string_view login) { return lowercase(login).find("bot") != std::string::npos; }

std::set<std::string> candidate_accounts(const std::set<std::string>& logins) {
    std::set<std::string> out;
    for (const auto& l : logins) {
        if (contains_bot(l)) out.insert(l);
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (is_token_char(c)) {
            current.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : ch);
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

double comment_similarity(std::span<const std::string> comments, std::size_t cap) {
    if (cap > 0 && comments.size() > cap) comments = comments.subspan(comments.size() - cap);
    if (comments.size() < 2) return -1.0;

    std::unordered_map<std::string, int> vocab;
    std::vector<SparseVector> vectors;
    std::vector<double> norms;
    vectors.reserve(comments.size());
    for (const auto& c : comments) {
        std::map<int, double> tf;
        for (auto& tok : tokenize(c)) {
            auto [it, inserted] = vocab.try_emplace(std::move(tok), static_cast<int>(vocab.size()));
            tf[it->second] += 1.0;
        }
        SparseVector v(tf.begin(), tf.end());
        double n2 = 0.0;
        for (auto& [_, w] : v) n2 += w * w;
        vectors.push_back(std::move(v));
        norms.push_back(std::sqrt(n2));
    }

    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        for (std::size_t j = i + 1; j < vectors.size(); ++j, ++pairs) {
            if (norms[i] == 0.0 || norms[j] == 0.0) continue;
            sum += dot(vectors[i], vectors[j]) / (norms[i] * norms[j]);
        }
    }
    return std::clamp(sum / static_cast<double>(pairs), 0.0, 1.0);
}

BotPlacement bot_name_placement(std::string_view login) {
    const auto l = lowercase(login);
    if (l.starts_with("bot")) return BotPlacement::Beginning;
    if (l.ends_with("bot")) return BotPlacement::End;
    if (l.find("bot") != std::string::npos) return BotPlacement::Middle;
    return BotPlacement::Absent;
}

AccountFeatures extract_features(std::string_view login, std::span<const Event> events, std::size_t comment_cap) {
    if (events.empty()) throw Error(ErrorCode::EmptyHistory, "no events for account '" + std::string(login) + "'");
    AccountFeatures f;
    std::array<bool, kEventTypeCount> seen{};
    std::vector<std::string> comments;
    for (const auto& ev : events) {
        seen[static_cast<std::size_t>(ev.event_type)] = true;
        f.organization_owned = f.organization_owned || ev.org_owned_actor;
        if (ev.comment_body) comments.push_back(*ev.comment_body);
    }
    f.unique_event_types = static_cast<int>(std::count(seen.begin(), seen.end(), true));
    f.comment_similarity = comment_similarity(comments, comment_cap);
    f.bot_placement = bot_name_placement(login);
    return f;
}

std::map<std::string, AccountFeatures> extract_all_features(const std::vector<Event>& events, bool candidates_only,
                                                            std::size_t comment_cap) {
    std::map<std::string, std::vector<Event>> by_login;
    for (const auto& ev : events) {
        if (candidates_only && !contains_bot(ev.actor_login)) continue;
        by_login[ev.actor_login].push_back(ev);
    }
    std::map<std::string, AccountFeatures> out;
    for (auto& [login, evs] : by_login) {
        sort_by_time(evs);
        out.emplace(login, extract_features(login, evs, comment_cap));
    }
    return out;
}

FeatureRow encode(const AccountFeatures& f) {
    FeatureRow row(kFeatureColumns, 0.0);
    row[0] = f.comment_similarity;
    row[1] = f.organization_owned ? 1.0 : 0.0;
    row[2] = static_cast<double>(f.unique_event_types);
    row[3 + static_cast<std::size_t>(f.bot_placement)] = 1.0;
    return row;
}

FeatureMatrix encode(std::span<const AccountFeatures> fs) {
    FeatureMatrix m;
    m.reserve(fs.size());
    for (const auto& f : fs) m.push_back(encode(f));
    return m;
}

// ---------------------------------------------------------------------------

double RegressionTree::predict(std::span<const double> x) const {
    int id = 0;
    while (nodes[id].feature >= 0) {
        const auto& n = nodes[id];
        id = x[n.feature] <= n.threshold ? n.left : n.right;
    }
    return nodes[id].value;
}

double Classifier::predict_proba(std::span<const double> x) const {
    if (!fitted_) throw Error(ErrorCode::UnfittedModel, "classifier has not been trained");
    if (x.size() != n_features_) {
        throw Error(ErrorCode::InvalidArgument, "expected " + std::to_string(n_features_) + " features, got " +
                                                    std::to_string(x.size()));
    }
    check_finite(x);
    if (kind_ == ClassifierKind::GradientBoosting) {
        double score = base_score_;
        for (const auto& t : trees_) score += t.predict(x);
        return sigmoid(score);
    }
    double z = intercept_;
    for (std::size_t j = 0; j < x.size(); ++j) z += weights_[j] * (x[j] - mean_[j]) / scale_[j];
    return sigmoid(z);
}

Classifier train(ClassifierKind kind, const FeatureMatrix& x, std::span<const Label> y, const ClassifierParams& params) {
    validate_training_set(x, y);
    const std::size_t n = x.size();
    const std::size_t d = x.front().size();
    std::vector<double> target(n);
    for (std::size_t i = 0; i < n; ++i) target[i] = y[i] == Label::Bot ? 1.0 : 0.0;

    Classifier model;
    model.kind_ = kind;
    model.params_ = params;
    model.n_features_ = d;

    if (kind == ClassifierKind::GradientBoosting) {
        if (params.rounds < 0 || params.max_depth < 1 || params.learning_rate <= 0.0 || params.min_samples_leaf < 1) {
            throw Error(ErrorCode::InvalidArgument, "invalid gradient boosting parameters");
        }
        const double prior = std::accumulate(target.begin(), target.end(), 0.0) / static_cast<double>(n);
        model.base_score_ = std::log(prior / (1.0 - prior));
        std::vector<double> score(n, model.base_score_);
        std::vector<double> residual(n), hessian(n), candidate(n);
        double loss = log_loss(score, target);

        for (int round = 0; round < params.rounds; ++round) {
            for (std::size_t i = 0; i < n; ++i) {
                const double p = sigmoid(score[i]);
                residual[i] = target[i] - p;
                hessian[i] = p * (1.0 - p);
            }
            RegressionTree tree = TreeBuilder(x, residual, hessian, params.max_depth, params.min_samples_leaf).build();
            std::vector<double> step(n);
            for (std::size_t i = 0; i < n; ++i) step[i] = tree.predict(x[i]);

            // Shrunken Newton step, halved until the training loss does not increase.
            double scale = params.learning_rate;
            double new_loss = loss;
            bool accepted = false;
            for (int attempt = 0; attempt < 40; ++attempt, scale *= 0.5) {
                for (std::size_t i = 0; i < n; ++i) candidate[i] = score[i] + scale * step[i];
                new_loss = log_loss(candidate, target);
                if (new_loss <= loss) {
                    accepted = true;
                    break;
                }
            }
            if (accepted) {
                for (auto& node : tree.nodes) node.value *= scale;
                score.swap(candidate);
                loss = new_loss;
                model.trees_.push_back(std::move(tree));
            }
            model.training_loss_.push_back(loss);
        }
    } else {
        if (params.l2 < 0.0 || params.max_iterations < 1) {
            throw Error(ErrorCode::InvalidArgument, "invalid logistic regression parameters");
        }
        model.mean_.assign(d, 0.0);
        model.scale_.assign(d, 1.0);
        for (std::size_t j = 0; j < d; ++j) {
            double m = 0.0;
            for (const auto& row : x) m += row[j];
            m /= static_cast<double>(n);
            double v = 0.0;
            for (const auto& row : x) v += (row[j] - m) * (row[j] - m);
            v /= static_cast<double>(n);
            model.mean_[j] = m;
            model.scale_[j] = v > 1e-24 ? std::sqrt(v) : 1.0;
        }
        FeatureMatrix z(n, FeatureRow(d));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < d; ++j) z[i][j] = (x[i][j] - model.mean_[j]) / model.scale_[j];
        }
        // Step 1/L with L bounding the Hessian of the mean loss: 0.25 * trace(Z'Z/n + 1) + l2.
        double trace = 1.0;
        for (std::size_t j = 0; j < d; ++j) {
            double s = 0.0;
            for (const auto& row : z) s += row[j] * row[j];
            trace += s / static_cast<double>(n);
        }
        const double step = 1.0 / (0.25 * trace + params.l2);

        std::vector<double> w(d, 0.0), grad(d);
        double b = 0.0;
        for (int iter = 0; iter < params.max_iterations; ++iter) {
            std::fill(grad.begin(), grad.end(), 0.0);
            double grad_b = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double s = b;
                for (std::size_t j = 0; j < d; ++j) s += w[j] * z[i][j];
                const double err = sigmoid(s) - target[i];
                grad_b += err;
                for (std::size_t j = 0; j < d; ++j) grad[j] += err * z[i][j];
            }
            double norm2 = 0.0;
            grad_b /= static_cast<double>(n);
            norm2 += grad_b * grad_b;
            for (std::size_t j = 0; j < d; ++j) {
                grad[j] = grad[j] / static_cast<double>(n) + params.l2 * w[j];
                norm2 += grad[j] * grad[j];
            }
            if (std::sqrt(norm2) < params.tolerance) break;
            b -= step * grad_b;
            for (std::size_t j = 0; j < d; ++j) w[j] -= step * grad[j];
        }
        model.weights_ = std::move(w);
        model.intercept_ = b;
    }
    model.fitted_ = true;
    return model;
}

Classifier train(ClassifierKind kind, std::span<const AccountFeatures> features, std::span<const Label> y,
                 const ClassifierParams& params) {
    return train(kind, encode(features), y, params);
}

Prediction predict(const Classifier& model, std::span<const double> x, double threshold) {
    const double t = threshold < 0.0 ? model.params().threshold : threshold;
    const double p = model.predict_proba(x);
    return {p, p >= t ? Label::Bot : Label::Human};
}

Prediction predict(const Classifier& model, const AccountFeatures& x, double threshold) {
    return predict(model, encode(x), threshold);
}

json Classifier::to_json() const {
    if (!fitted_) throw Error(ErrorCode::UnfittedModel, "cannot persist an unfitted classifier");
    json doc;
    doc["format"] = "teamflow-classifier";
    doc["version"] = 1;
    doc["kind"] = to_string(kind_);
    doc["params"] = params_to_json(params_);
    doc["n_features"] = n_features_;
    if (kind_ == ClassifierKind::GradientBoosting) {
        doc["base_score"] = base_score_;
        json trees = json::array();
        for (const auto& t : trees_) {
            json nodes = json::array();
            for (const auto& nd : t.nodes) {
                nodes.push_back({{"feature", nd.feature},
                                 {"threshold", nd.threshold},
                                 {"left", nd.left},
                                 {"right", nd.right},
                                 {"value", nd.value}});
            }
            trees.push_back(std::move(nodes));
        }
        doc["trees"] = std::move(trees);
        doc["training_loss"] = training_loss_;
    } else {
        doc["mean"] = mean_;
        doc["scale"] = scale_;
        doc["weights"] = weights_;
        doc["intercept"] = intercept_;
    }
    return doc;
}

Classifier Classifier::from_json(const json& doc) {
    try {
        if (doc.at("format") != "teamflow-classifier") throw Error(ErrorCode::MalformedRecord, "not a classifier document");
        if (doc.at("version").get<int>() != 1) throw Error(ErrorCode::MalformedRecord, "unsupported model version");
        Classifier m;
        m.kind_ = parse_classifier_kind(doc.at("kind").get<std::string>());
        m.params_ = params_from_json(doc.at("params"));
        m.n_features_ = doc.at("n_features").get<std::size_t>();
        if (m.kind_ == ClassifierKind::GradientBoosting) {
            m.base_score_ = doc.at("base_score").get<double>();
            for (const auto& t : doc.at("trees")) {
                RegressionTree tree;
                for (const auto& nd : t) {
                    tree.nodes.push_back({nd.at("feature").get<int>(), nd.at("threshold").get<double>(),
                                          nd.at("left").get<int>(), nd.at("right").get<int>(),
                                          nd.at("value").get<double>()});
                }
                const auto count = static_cast<int>(tree.nodes.size());
                if (count == 0) throw Error(ErrorCode::MalformedRecord, "empty tree");
                for (const auto& nd : tree.nodes) {
                    if (nd.feature >= static_cast<int>(m.n_features_) ||
                        (nd.feature >= 0 && (nd.left <= 0 || nd.right <= 0 || nd.left >= count || nd.right >= count))) {
                        throw Error(ErrorCode::MalformedRecord, "invalid tree node");
                    }
                }
                m.trees_.push_back(std::move(tree));
            }
            m.training_loss_ = doc.value("training_loss", std::vector<double>{});
        } else {
            m.mean_ = doc.at("mean").get<std::vector<double>>();
            m.scale_ = doc.at("scale").get<std::vector<double>>();
            m.weights_ = doc.at("weights").get<std::vector<double>>();
            m.intercept_ = doc.at("intercept").get<double>();
            if (m.mean_.size() != m.n_features_ || m.scale_.size() != m.n_features_ ||
                m.weights_.size() != m.n_features_) {
                throw Error(ErrorCode::MalformedRecord, "coefficient length mismatch");
            }
        }
        m.fitted_ = true;
        return m;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedRecord, std::string("model document: ") + e.what());
    }
}

// ---------------------------------------------------------------------------

Folds stratified_kfold(std::span<const Label> labels, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw Error(ErrorCode::InvalidArgument, "k must be at least 2");
    if (k > labels.size()) {
        throw Error(ErrorCode::KTooLarge,
                    "k=" + std::to_string(k) + " exceeds sample count " + std::to_string(labels.size()));
    }
    Rng rng(seed);
    Folds folds(k);
    std::size_t deal = 0;
    for (Label cls : {Label::Bot, Label::Human}) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == cls) idx.push_back(i);
        }
        rng.shuffle(std::span(idx));
        for (auto i : idx) {
            folds[deal].push_back(i);
            deal = (deal + 1) % k;
        }
    }
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

Metrics f1_score(std::size_t tp, std::size_t fp, std::size_t fn) {
    if (tp + fp == 0) throw Error(ErrorCode::UndefinedMetric, "precision undefined: no predicted positives");
    if (tp + fn == 0) throw Error(ErrorCode::UndefinedMetric, "recall undefined: no actual positives");
    return metrics_zero_division(tp, fp, fn);
}

double f1_from(double precision, double recall) {
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

Metrics metrics_zero_division(std::size_t tp, std::size_t fp, std::size_t fn) {
    Metrics m;
    m.precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    m.recall = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    m.f1 = f1_from(m.precision, m.recall);
    return m;
}

CVReport evaluate_cv(ClassifierKind kind, const FeatureMatrix& x, std::span<const Label> y, std::size_t k,
                     std::uint64_t seed, const ClassifierParams& params) {
    validate_training_set(x, y);
    const auto folds = stratified_kfold(y, k, seed);
    CVReport report;
    report.kind = kind;
    report.k = k;
    report.seed = seed;

    std::vector<char> held(x.size());
    for (const auto& fold : folds) {
        std::fill(held.begin(), held.end(), 0);
        for (auto i : fold) held[i] = 1;
        FeatureMatrix train_x;
        std::vector<Label> train_y;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (held[i]) continue;
            train_x.push_back(x[i]);
            train_y.push_back(y[i]);
        }
        const auto model = train(kind, train_x, train_y, params);
        FoldMetrics fm;
        fm.size = fold.size();
        for (auto i : fold) {
            const bool actual = y[i] == Label::Bot;
            const bool predicted = predict(model, x[i]).label == Label::Bot;
            fm.positives += actual;
            if (actual && predicted) ++fm.tp;
            else if (!actual && predicted) ++fm.fp;
            else if (actual && !predicted) ++fm.fn;
            else ++fm.tn;
        }
        fm.metrics = metrics_zero_division(fm.tp, fm.fp, fm.fn);
        report.folds.push_back(fm);
    }
    for (const auto& f : report.folds) {
        report.mean_precision += f.metrics.precision;
        report.mean_recall += f.metrics.recall;
        report.mean_f1 += f.metrics.f1;
    }
    const auto kk = static_cast<double>(report.folds.size());
    report.mean_precision /= kk;
    report.mean_recall /= kk;
    report.mean_f1 /= kk;
    return report;
}

json to_json(const CVReport& report) {
    json folds = json::array();
    for (const auto& f : report.folds) {
        folds.push_back({{"size", f.size},
                         {"positives", f.positives},
                         {"tp", f.tp},
                         {"fp", f.fp},
                         {"fn", f.fn},
                         {"tn", f.tn},
                         {"precision", f.metrics.precision},
                         {"recall", f.metrics.recall},
                         {"f1", f.metrics.f1}});
    }
    return {{"kind", to_string(report.kind)},
            {"k", report.k},
            {"seed", report.seed},
            {"folds", std::move(folds)},
            {"mean_precision", report.mean_precision},
            {"mean_recall", report.mean_recall},
            {"mean_f1", report.mean_f1}};
}

// ---------------------------------------------------------------------------

const char* to_string(BotPlacement p) noexcept {
    switch (p) {
        case BotPlacement::Beginning: return "beginning";
        case BotPlacement::Middle: return "middle";
        case BotPlacement::End: return "end";
        case BotPlacement::Absent: return "absent";
    }
    return "absent";
}

BotPlacement parse_placement(std::string_view s) {
    for (auto p : {BotPlacement::Beginning, BotPlacement::Middle, BotPlacement::End, BotPlacement::Absent}) {
        if (s == to_string(p)) return p;
    }
    throw Error(ErrorCode::MalformedRecord, "unknown bot placement '" + std::string(s) + "'");
}

const char* to_string(Label l) noexcept { return l == Label::Bot ? "bot" : "human"; }

const char* to_string(ClassifierKind k) noexcept {
    return k == ClassifierKind::GradientBoosting ? "gradient_boosting" : "logistic_regression";
}

ClassifierKind parse_classifier_kind(std::string_view s) {
    if (s == "gradient_boosting") return ClassifierKind::GradientBoosting;
    if (s == "logistic_regression") return ClassifierKind::LogisticRegression;
    throw Error(ErrorCode::InvalidArgument, "unknown classifier kind '" + std::string(s) + "'");
}

std::map<std::string, Label> read_labels_csv(const std::filesystem::path& path) {
    const auto table = io::read_csv(path);
    const auto login_col = table.column("login");
    const auto bot_col = table.column("is_bot");
    std::map<std::string, Label> out;
    for (const auto& row : table.rows) {
        const auto& v = row[bot_col];
        if (v != "0" && v != "1") {
            throw Error(ErrorCode::MalformedRecord, path.string() + ": is_bot must be 0 or 1, got '" + v + "'");
        }
        if (row[login_col].empty()) throw Error(ErrorCode::MalformedRecord, path.string() + ": empty login");
        out[row[login_col]] = v == "1" ? Label::Bot : Label::Human;
    }
    return out;
}

std::string render_features_csv(const std::map<std::string, AccountFeatures>& features) {
    io::CsvTable t;
    t.header = {"login", "comment_similarity", "organization_owned", "unique_event_types", "bot_placement"};
    for (const auto& [login, f] : features) {
        t.rows.push_back({login, io::format_double(f.comment_similarity), f.organization_owned ? "1" : "0",
                          std::to_string(f.unique_event_types), to_string(f.bot_placement)});
    }
    return io::render_csv(t);
}

std::map<std::string, AccountFeatures> parse_features_csv(const std::filesystem::path& path) {
    const auto t = io::read_csv(path);
    const auto c_login = t.column("login");
    const auto c_sim = t.column("comment_similarity");
    const auto c_org = t.column("organization_owned");
    const auto c_types = t.column("unique_event_types");
    const auto c_place = t.column("bot_placement");
    std::map<std::string, AccountFeatures> out;
    for (const auto& row : t.rows) {
        AccountFeatures f;
        f.comment_similarity = io::parse_double(row[c_sim], "comment_similarity");
        f.organization_owned = row[c_org] == "1";
        f.unique_event_types = static_cast<int>(io::parse_int(row[c_types], "unique_event_types"));
        f.bot_placement = parse_placement(row[c_place]);
        out[row[c_login]] = f;
    }
    return out;
}

std::string render_predictions_csv(const std::vector<PredictionRow>& rows) {
    io::CsvTable t;
    t.header = {"login", "probability", "label"};
    for (const auto& r : rows) t.rows.push_back({r.login, io::format_double(r.probability), to_string(r.label)});
    return io::render_csv(t);
}

std::vector<PredictionRow> read_predictions_csv(const std::filesystem::path& path) {
    const auto t = io::read_csv(path);
    const auto c_login = t.column("login");
    const auto c_p = t.column("probability");
    const auto c_label = t.column("label");
    std::vector<PredictionRow> out;
    for (const auto& row : t.rows) {
        const auto& l = row[c_label];
        if (l != "bot" && l != "human") throw Error(ErrorCode::MalformedRecord, "bad label '" + l + "'");
        out.push_back({row[c_login], io::parse_double(row[c_p], "probability"), l == "bot" ? Label::Bot : Label::Human});
    }
    return out;
}

}  // namespace teamflow::bots
