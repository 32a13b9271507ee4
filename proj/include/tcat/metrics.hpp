#pragma once

#include "tcat/corpus.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tcat {

/// counts[i][j] = samples with true class i predicted as class j.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(int n_classes);

    /// Throws std::invalid_argument on length mismatch or out-of-range labels.
    static ConfusionMatrix from_pairs(std::span<const int> y_true, std::span<const int> y_pred,
                                      int n_classes);

    void add(int true_label, int predicted_label);
    std::uint64_t at(int true_label, int predicted_label) const;
    int n_classes() const { return n_; }
    std::uint64_t total() const;

private:
    int n_ = 0;
    std::vector<std::uint64_t> counts_;
};

enum class Averaging { weighted, macro };

struct ClassScore {
    int label = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::uint64_t support = 0;
};

struct AverageScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct MetricsReport {
    std::vector<ClassScore> per_class;
    AverageScore weighted;
    AverageScore macro;
    double accuracy = 0.0;
    std::uint64_t n_samples = 0;
    Averaging averaging = Averaging::weighted; ///< which average rendering shows
};

/// Per-class precision/recall/F1 (0 on zero denominators) plus weighted and
/// macro averages. Weighted recall is computed through its algebraic identity
/// with accuracy (sum of true positives over total), so the two are equal
/// bit for bit. Throws DataError on an empty matrix.
MetricsReport scores(const ConfusionMatrix& cm, Averaging averaging = Averaging::weighted);

/// One table row per hierarchy level, percentages to two decimals, plus the
/// machine-readable JSON carrying the same values.
struct RenderedReport {
    std::string text;
    nlohmann::json json;
};

RenderedReport render_table(const std::vector<std::pair<Level, MetricsReport>>& reports);

/// JSON schema used for all report files:
/// {level, per_class: [...], weighted: {...}, macro: {...}, accuracy, ...}.
nlohmann::json report_to_json(Level level, const MetricsReport& report);

} // namespace tcat
