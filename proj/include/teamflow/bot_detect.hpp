#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "teamflow/event_model.hpp"

namespace teamflow::bots {

enum class BotPlacement { Beginning, Middle, End, Absent };

enum class Label { Human, Bot };

struct AccountFeatures {
    double comment_similarity = -1.0;  // -1 when fewer than two comments
    bool organization_owned = false;
    int unique_event_types = 0;
    BotPlacement bot_placement = BotPlacement::Absent;

    friend bool operator==(const AccountFeatures&, const AccountFeatures&) = default;
};

struct LabeledAccount {
    std::string login;
    AccountFeatures features;
    Label label = Label::Human;
};

// Most recent comments considered by comment_similarity.
inline constexpr std::size_t kDefaultCommentCap = 200;

bool contains_bot(std::string_view login);

// Logins whose lowercase form contains "bot".
std::set<std::string> candidate_accounts(const std::set<std::string>& logins);

// Lowercased alphanumeric tokens; bytes >= 0x80 are kept as token characters
// so non-ASCII words survive.
std::vector<std::string> tokenize(std::string_view text);

// Mean pairwise cosine similarity of term-frequency vectors, over the last
// `cap` comments. Returns -1 for fewer than two comments.
double comment_similarity(std::span<const std::string> comments, std::size_t cap = kDefaultCommentCap);

BotPlacement bot_name_placement(std::string_view login);

// `events` must all belong to the account, in time order. Throws EmptyHistory.
AccountFeatures extract_features(std::string_view login, std::span<const Event> events,
                                 std::size_t comment_cap = kDefaultCommentCap);

// Groups events by login (input order preserved per account) and extracts
// features for every account, or only for "bot" candidates.
std::map<std::string, AccountFeatures> extract_all_features(const std::vector<Event>& events,
                                                            bool candidates_only,
                                                            std::size_t comment_cap = kDefaultCommentCap);

// ---------------------------------------------------------------------------
// Numeric encoding

inline constexpr std::size_t kFeatureColumns = 7;
inline constexpr std::array<std::string_view, kFeatureColumns> kFeatureNames = {
    "comment_similarity", "organization_owned", "unique_event_types",
    "placement_beginning", "placement_middle",  "placement_end", "placement_absent",
};

using FeatureRow = std::vector<double>;
using FeatureMatrix = std::vector<FeatureRow>;

FeatureRow encode(const AccountFeatures& f);
FeatureMatrix encode(std::span<const AccountFeatures> fs);

// ---------------------------------------------------------------------------
// Classifiers

enum class ClassifierKind { LogisticRegression, GradientBoosting };

struct ClassifierParams {
    // gradient boosting
    int rounds = 100;
    int max_depth = 3;
    double learning_rate = 0.1;
    int min_samples_leaf = 1;
    // logistic regression
    double l2 = 1e-3;
    int max_iterations = 20000;
    double tolerance = 1e-7;
    // both
    double threshold = 0.5;
    std::uint64_t seed = 0;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
};

struct RegressionTree {
    std::vector<TreeNode> nodes;  // root at 0
    double predict(std::span<const double> x) const;
};

class Classifier {
public:
    Classifier() = default;

    ClassifierKind kind() const noexcept { return kind_; }
    const ClassifierParams& params() const noexcept { return params_; }
    bool fitted() const noexcept { return fitted_; }
    std::size_t n_features() const noexcept { return n_features_; }

    // Probability of the Bot class. Throws UnfittedModel / NonFiniteFeature.
    double predict_proba(std::span<const double> x) const;

    // Logistic loss after each boosting round (empty for logistic regression).
    const std::vector<double>& training_loss() const noexcept { return training_loss_; }
    const std::vector<RegressionTree>& trees() const noexcept { return trees_; }

    nlohmann::json to_json() const;
    static Classifier from_json(const nlohmann::json& doc);

    friend Classifier train(ClassifierKind, const FeatureMatrix&, std::span<const Label>, const ClassifierParams&);

private:
    ClassifierKind kind_ = ClassifierKind::GradientBoosting;
    ClassifierParams params_;
    bool fitted_ = false;
    std::size_t n_features_ = 0;
    // gradient boosting
    double base_score_ = 0.0;
    std::vector<RegressionTree> trees_;
    std::vector<double> training_loss_;
    // logistic regression (on standardized inputs)
    std::vector<double> mean_;
    std::vector<double> scale_;
    std::vector<double> weights_;
    double intercept_ = 0.0;
};

// Throws DegenerateLabels (one class or size mismatch), NonFiniteFeature.
Classifier train(ClassifierKind kind, const FeatureMatrix& x, std::span<const Label> y,
                 const ClassifierParams& params = {});
Classifier train(ClassifierKind kind, std::span<const AccountFeatures> features, std::span<const Label> y,
                 const ClassifierParams& params = {});

struct Prediction {
    double probability = 0.0;
    Label label = Label::Human;
};

// Bot iff probability >= threshold (the model's configured threshold when
// negative).
Prediction predict(const Classifier& model, std::span<const double> x, double threshold = -1.0);
Prediction predict(const Classifier& model, const AccountFeatures& x, double threshold = -1.0);

// ---------------------------------------------------------------------------
// Evaluation

using Folds = std::vector<std::vector<std::size_t>>;

// Class-wise shuffled round-robin dealing; the deal position carries over
// from one class to the next so fold sizes also stay within one of each other.
Folds stratified_kfold(std::span<const Label> labels, std::size_t k, std::uint64_t seed);

struct Metrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Strict: throws UndefinedMetric when tp+fp == 0 or tp+fn == 0.
Metrics f1_score(std::size_t tp, std::size_t fp, std::size_t fn);
// Harmonic mean; 0 when precision + recall == 0.
double f1_from(double precision, double recall);
// Lenient variant used inside cross validation: 0 for undefined ratios.
Metrics metrics_zero_division(std::size_t tp, std::size_t fp, std::size_t fn);

struct FoldMetrics {
    std::size_t size = 0;
    std::size_t positives = 0;
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    Metrics metrics;
};

struct CVReport {
    ClassifierKind kind = ClassifierKind::GradientBoosting;
    std::size_t k = 0;
    std::uint64_t seed = 0;
    std::vector<FoldMetrics> folds;
    double mean_precision = 0.0;
    double mean_recall = 0.0;
    double mean_f1 = 0.0;
};

CVReport evaluate_cv(ClassifierKind kind, const FeatureMatrix& x, std::span<const Label> y, std::size_t k,
                     std::uint64_t seed, const ClassifierParams& params = {});

nlohmann::json to_json(const CVReport& report);

// ---------------------------------------------------------------------------
// Names and files

const char* to_string(BotPlacement p) noexcept;
BotPlacement parse_placement(std::string_view s);
const char* to_string(Label l) noexcept;
const char* to_string(ClassifierKind k) noexcept;
ClassifierKind parse_classifier_kind(std::string_view s);

// `login,is_bot` with is_bot in {0,1}.
std::map<std::string, Label> read_labels_csv(const std::filesystem::path& path);
std::string render_features_csv(const std::map<std::string, AccountFeatures>& features);
std::map<std::string, AccountFeatures> parse_features_csv(const std::filesystem::path& path);

struct PredictionRow {
    std::string login;
    double probability = 0.0;
    Label label = Label::Human;
};
std::string render_predictions_csv(const std::vector<PredictionRow>& rows);
std::vector<PredictionRow> read_predictions_csv(const std::filesystem::path& path);

}  // namespace teamflow::bots
