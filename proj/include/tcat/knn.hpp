#pragma once

#include "tcat/vectorizer.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <vector>

namespace tcat {

enum class Metric { cosine, euclidean };

std::string_view metric_name(Metric m);
std::optional<Metric> metric_from_name(std::string_view name);

/// Non-owning view of one sparse vector with its nominal dimensionality.
struct SparseVecView {
    std::span<const std::uint32_t> cols;
    std::span<const double> vals;
    std::size_t dim = 0;
};

/// Cosine distance 1 - a.b/(|a||b|) (defined as 1 when either norm is zero)
/// or Euclidean |a-b|. Throws std::invalid_argument on dimension mismatch.
double distance(const SparseVecView& a, const SparseVecView& b, Metric metric);

struct Prediction {
    int label = 0;
    std::vector<std::uint32_t> neighbor_ids; ///< k nearest rows, distance order
    std::map<int, int> votes;                ///< label -> count, sums to k
};

/// Instance store plus vote logic — there is no training beyond keeping the
/// data. Neighbor ties break on the lower row index; vote ties break on the
/// smaller cumulative distance, then the smaller label id.
class KnnModel {
public:
    KnnModel() = default;

    /// Requires 1 <= k <= rows and one label per row.
    static KnnModel fit(DocTermMatrix instances, std::vector<int> labels, int k = 7,
                        Metric metric = Metric::cosine);

    Prediction predict(const SparseVecView& query) const;
    std::vector<int> predict_batch(const DocTermMatrix& queries) const;

    int k() const { return k_; }
    Metric metric() const { return metric_; }
    const DocTermMatrix& instances() const { return instances_; }
    const std::vector<int>& labels() const { return labels_; }

    /// Writes <prefix>.dtm (instances) and <prefix>.json (k, metric, labels,
    /// optional label names).
    void save(const std::filesystem::path& prefix,
              const std::vector<std::string>& label_names = {}) const;
    static KnnModel load(const std::filesystem::path& prefix);

private:
    /// Distances from a densified query to every instance row.
    std::vector<double> all_distances(const SparseVecView& query, std::vector<double>& dense) const;

    DocTermMatrix instances_;
    std::vector<int> labels_;
    int k_ = 7;
    Metric metric_ = Metric::cosine;
    std::vector<double> row_sq_norms_; ///< cached at fit
};

} // namespace tcat
