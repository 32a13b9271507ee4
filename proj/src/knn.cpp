#include "tcat/knn.hpp"

#include "tcat/kern/kernels.hpp"
#include "tcat/util/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace tcat {

using nlohmann::json;

std::string_view metric_name(Metric m) {
    return m == Metric::cosine ? "cosine" : "euclidean";
}

std::optional<Metric> metric_from_name(std::string_view name) {
    if (name == "cosine") return Metric::cosine;
    if (name == "euclidean") return Metric::euclidean;
    return std::nullopt;
}

namespace {

/// Merge-join dot product of two sorted sparse vectors.
double sparse_sparse_dot(const SparseVecView& a, const SparseVecView& b) {
    double acc = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.cols.size() && j < b.cols.size()) {
        if (a.cols[i] < b.cols[j]) {
            ++i;
        } else if (a.cols[i] > b.cols[j]) {
            ++j;
        } else {
            acc += a.vals[i] * b.vals[j];
            ++i;
            ++j;
        }
    }
    return acc;
}

double sq_norm(std::span<const double> vals) {
    return kern::sum_squares(vals.data(), vals.size());
}

double cosine_from_parts(double dot, double sq_a, double sq_b) {
    if (sq_a == 0.0 || sq_b == 0.0) return 1.0;
    return 1.0 - dot / (std::sqrt(sq_a) * std::sqrt(sq_b));
}

double euclidean_from_parts(double dot, double sq_a, double sq_b) {
    return std::sqrt(std::max(0.0, sq_a + sq_b - 2.0 * dot));
}

} // namespace

double distance(const SparseVecView& a, const SparseVecView& b, Metric metric) {
    if (a.dim != b.dim) throw std::invalid_argument("distance: dimension mismatch");
    const double dot = sparse_sparse_dot(a, b);
    const double sa = sq_norm(a.vals);
    const double sb = sq_norm(b.vals);
    return metric == Metric::cosine ? cosine_from_parts(dot, sa, sb)
                                    : euclidean_from_parts(dot, sa, sb);
}

KnnModel KnnModel::fit(DocTermMatrix instances, std::vector<int> labels, int k, Metric metric) {
    if (labels.size() != instances.n_rows()) {
        throw std::invalid_argument("knn fit: label count does not match instance rows");
    }
    if (k < 1 || static_cast<std::size_t>(k) > instances.n_rows()) {
        throw std::invalid_argument("knn fit: k must lie in [1, n_instances]");
    }
    KnnModel m;
    m.instances_ = std::move(instances);
    m.labels_ = std::move(labels);
    m.k_ = k;
    m.metric_ = metric;
    m.row_sq_norms_.resize(m.instances_.n_rows());
    for (std::size_t r = 0; r < m.instances_.n_rows(); ++r) {
        m.row_sq_norms_[r] = sq_norm(m.instances_.row_vals(r));
    }
    return m;
}

std::vector<double> KnnModel::all_distances(const SparseVecView& query,
                                            std::vector<double>& dense) const {
    if (query.dim != instances_.n_cols()) {
        throw std::invalid_argument("knn predict: query dimension mismatch");
    }
    dense.assign(instances_.n_cols(), 0.0);
    for (std::size_t i = 0; i < query.cols.size(); ++i) dense[query.cols[i]] = query.vals[i];
    const double sq_q = sq_norm(query.vals);

    std::vector<double> dist(instances_.n_rows());
    for (std::size_t r = 0; r < instances_.n_rows(); ++r) {
        const auto rc = instances_.row_cols(r);
        const auto rv = instances_.row_vals(r);
        const double dot = kern::sparse_dense_dot(rc.data(), rv.data(), rc.size(), dense.data());
        dist[r] = metric_ == Metric::cosine
                      ? cosine_from_parts(dot, row_sq_norms_[r], sq_q)
                      : euclidean_from_parts(dot, row_sq_norms_[r], sq_q);
    }
    return dist;
}

Prediction KnnModel::predict(const SparseVecView& query) const {
    std::vector<double> dense;
    const std::vector<double> dist = all_distances(query, dense);

    std::vector<std::uint32_t> order(dist.size());
    std::iota(order.begin(), order.end(), 0u);
    const auto k = static_cast<std::size_t>(k_);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](std::uint32_t a, std::uint32_t b) {
                          if (dist[a] != dist[b]) return dist[a] < dist[b];
                          return a < b;
                      });
    order.resize(k);

    Prediction p;
    p.neighbor_ids = order;
    std::map<int, double> cumdist;
    for (std::uint32_t r : order) {
        ++p.votes[labels_[r]];
        cumdist[labels_[r]] += dist[r];
    }
    int best_label = -1;
    int best_count = -1;
    double best_cum = 0.0;
    for (const auto& [label, count] : p.votes) {
        const double cd = cumdist[label];
        const bool wins = count > best_count ||
                          (count == best_count && cd < best_cum) ||
                          (count == best_count && cd == best_cum && label < best_label);
        if (wins) {
            best_label = label;
            best_count = count;
            best_cum = cd;
        }
    }
    p.label = best_label;
    return p;
}

std::vector<int> KnnModel::predict_batch(const DocTermMatrix& queries) const {
    if (queries.n_cols() != instances_.n_cols()) {
        throw std::invalid_argument("knn predict_batch: dimension mismatch");
    }
    std::vector<int> out;
    out.reserve(queries.n_rows());
    for (std::size_t r = 0; r < queries.n_rows(); ++r) {
        const SparseVecView q{queries.row_cols(r), queries.row_vals(r), queries.n_cols()};
        out.push_back(predict(q).label);
    }
    return out;
}

void KnnModel::save(const std::filesystem::path& prefix,
                    const std::vector<std::string>& label_names) const {
    instances_.save(prefix.string() + ".dtm");
    json j;
    j["version"] = 1;
    j["k"] = k_;
    j["metric"] = std::string(metric_name(metric_));
    j["labels"] = labels_;
    if (!label_names.empty()) j["label_names"] = label_names;
    std::ofstream out(prefix.string() + ".json");
    if (!out) throw DataError("cannot write knn sidecar " + prefix.string() + ".json");
    out << j.dump(2) << '\n';
}

KnnModel KnnModel::load(const std::filesystem::path& prefix) {
    DocTermMatrix instances = DocTermMatrix::load(prefix.string() + ".dtm");
    std::ifstream in(prefix.string() + ".json");
    if (!in) throw DataError("cannot open knn sidecar " + prefix.string() + ".json");
    json j = json::parse(in);
    const auto metric = metric_from_name(j.at("metric").get<std::string>());
    if (!metric) throw DataError("knn sidecar: unknown metric");
    return fit(std::move(instances), j.at("labels").get<std::vector<int>>(),
               j.at("k").get<int>(), *metric);
}

} // namespace tcat
