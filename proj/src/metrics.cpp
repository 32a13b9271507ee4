#include "tcat/metrics.hpp"

#include "tcat/util/error.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>

namespace tcat {

using nlohmann::json;

ConfusionMatrix::ConfusionMatrix(int n_classes) : n_(n_classes) {
    if (n_classes < 1) throw std::invalid_argument("confusion matrix: n_classes must be >= 1");
    counts_.assign(static_cast<std::size_t>(n_) * n_, 0);
}

ConfusionMatrix ConfusionMatrix::from_pairs(std::span<const int> y_true,
                                            std::span<const int> y_pred, int n_classes) {
    if (y_true.size() != y_pred.size()) {
        throw std::invalid_argument("confusion: y_true and y_pred lengths differ");
    }
    ConfusionMatrix cm(n_classes);
    for (std::size_t i = 0; i < y_true.size(); ++i) cm.add(y_true[i], y_pred[i]);
    return cm;
}

void ConfusionMatrix::add(int true_label, int predicted_label) {
    if (true_label < 0 || true_label >= n_ || predicted_label < 0 || predicted_label >= n_) {
        throw std::invalid_argument("confusion: label out of range");
    }
    ++counts_[static_cast<std::size_t>(true_label) * n_ + predicted_label];
}

std::uint64_t ConfusionMatrix::at(int true_label, int predicted_label) const {
    return counts_[static_cast<std::size_t>(true_label) * n_ + predicted_label];
}

std::uint64_t ConfusionMatrix::total() const {
    std::uint64_t t = 0;
    for (std::uint64_t c : counts_) t += c;
    return t;
}

MetricsReport scores(const ConfusionMatrix& cm, Averaging averaging) {
    const std::uint64_t total = cm.total();
    if (total == 0) throw DataError("scores: empty confusion matrix");
    const int n = cm.n_classes();

    MetricsReport report;
    report.averaging = averaging;
    report.n_samples = total;
    report.per_class.resize(static_cast<std::size_t>(n));

    std::uint64_t trace = 0;
    for (int i = 0; i < n; ++i) {
        std::uint64_t tp = cm.at(i, i);
        std::uint64_t fp = 0, fn = 0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            fp += cm.at(j, i);
            fn += cm.at(i, j);
        }
        trace += tp;
        ClassScore& s = report.per_class[static_cast<std::size_t>(i)];
        s.label = i;
        s.support = tp + fn;
        s.precision = (tp + fp) ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
        s.recall = s.support ? static_cast<double>(tp) / static_cast<double>(s.support) : 0.0;
        s.f1 = (s.precision + s.recall) > 0.0
                   ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
                   : 0.0;
    }

    report.accuracy = static_cast<double>(trace) / static_cast<double>(total);

    double wp = 0.0, wf = 0.0, mp = 0.0, mr = 0.0, mf = 0.0;
    for (const ClassScore& s : report.per_class) {
        wp += static_cast<double>(s.support) * s.precision;
        wf += static_cast<double>(s.support) * s.f1;
        mp += s.precision;
        mr += s.recall;
        mf += s.f1;
    }
    report.weighted.precision = wp / static_cast<double>(total);
    // Support-weighted recall telescopes to trace/total; evaluate it as the
    // same expression as accuracy so the identity is exact.
    report.weighted.recall = static_cast<double>(trace) / static_cast<double>(total);
    report.weighted.f1 = wf / static_cast<double>(total);
    report.macro.precision = mp / n;
    report.macro.recall = mr / n;
    report.macro.f1 = mf / n;
    return report;
}

namespace {

std::string pct(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", value * 100.0);
    return buf;
}

std::string display_name(Level level) {
    switch (level) {
        case Level::general: return "General Level";
        case Level::specific: return "Specific Level";
        default: return "Course Level";
    }
}

json average_to_json(const AverageScore& a) {
    return json{{"precision", a.precision}, {"recall", a.recall}, {"f1", a.f1}};
}

} // namespace

json report_to_json(Level level, const MetricsReport& report) {
    json per_class = json::array();
    for (const ClassScore& s : report.per_class) {
        per_class.push_back(json{{"label", s.label},
                                 {"precision", s.precision},
                                 {"recall", s.recall},
                                 {"f1", s.f1},
                                 {"support", s.support}});
    }
    return json{{"level", std::string(level_name(level))},
                {"per_class", std::move(per_class)},
                {"weighted", average_to_json(report.weighted)},
                {"macro", average_to_json(report.macro)},
                {"accuracy", report.accuracy},
                {"n_samples", report.n_samples},
                {"averaging", report.averaging == Averaging::weighted ? "weighted" : "macro"}};
}

RenderedReport render_table(const std::vector<std::pair<Level, MetricsReport>>& reports) {
    RenderedReport out;
    out.json = json::array();
    std::string text =
        "Category       | Precision (%) | Recall (%) | F1 Score (%) | Accuracy (%)\n";
    for (const auto& [level, report] : reports) {
        const AverageScore& avg =
            report.averaging == Averaging::weighted ? report.weighted : report.macro;
        char line[160];
        std::snprintf(line, sizeof line, "%-14s | %13s | %10s | %12s | %12s\n",
                      display_name(level).c_str(), pct(avg.precision).c_str(),
                      pct(avg.recall).c_str(), pct(avg.f1).c_str(),
                      pct(report.accuracy).c_str());
        text += line;
        out.json.push_back(report_to_json(level, report));
    }
    out.text = std::move(text);
    return out;
}

} // namespace tcat
