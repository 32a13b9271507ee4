#include "tcat/vectorizer.hpp"

#include "tcat/kern/kernels.hpp"
#include "tcat/util/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>

namespace tcat {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Vocabulary

Vocabulary Vocabulary::fit(const std::vector<TokenSequence>& seqs, std::size_t max_features) {
    std::unordered_map<std::string, std::uint32_t> df;
    bool any = false;
    std::vector<std::string_view> seen;
    for (const TokenSequence& seq : seqs) {
        if (!seq.tokens.empty()) any = true;
        seen.clear();
        for (const std::string& tok : seq.tokens) seen.push_back(tok);
        std::sort(seen.begin(), seen.end());
        seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
        for (std::string_view tok : seen) ++df[std::string(tok)];
    }
    if (!any) throw DataError("vocabulary fit: every token sequence is empty");

    std::vector<std::pair<std::string, std::uint32_t>> order(df.begin(), df.end());
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (max_features != 0 && order.size() > max_features) order.resize(max_features);

    Vocabulary v;
    v.tokens_.reserve(order.size());
    v.df_.reserve(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        v.index_.emplace(order[i].first, static_cast<std::uint32_t>(i));
        v.tokens_.push_back(std::move(order[i].first));
        v.df_.push_back(order[i].second);
    }
    return v;
}

std::optional<std::uint32_t> Vocabulary::index_of(std::string_view token) const {
    auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

json Vocabulary::to_json() const {
    json j = json::object();
    for (std::size_t i = 0; i < tokens_.size(); ++i) j[tokens_[i]] = i;
    return j;
}

Vocabulary Vocabulary::from_json(const json& j) {
    Vocabulary v;
    v.tokens_.resize(j.size());
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto idx = it.value().get<std::uint32_t>();
        if (idx >= v.tokens_.size() || !v.tokens_[idx].empty()) {
            throw DataError("vocabulary JSON: indexes must be contiguous from 0");
        }
        v.tokens_[idx] = it.key();
    }
    v.df_.assign(v.tokens_.size(), 0);
    for (std::size_t i = 0; i < v.tokens_.size(); ++i) {
        if (v.tokens_[i].empty()) throw DataError("vocabulary JSON: empty token");
        v.index_.emplace(v.tokens_[i], static_cast<std::uint32_t>(i));
    }
    return v;
}

// ---------------------------------------------------------------------------
// DocTermMatrix

void DocTermMatrix::add_row(std::span<const std::uint32_t> cols, std::span<const double> vals) {
    if (cols.size() != vals.size()) throw std::invalid_argument("row: cols/vals size mismatch");
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i > 0 && cols[i] <= cols[i - 1]) {
            throw std::invalid_argument("row: column indexes must strictly increase");
        }
        if (cols[i] >= n_cols_) throw std::invalid_argument("row: column index out of range");
        if (vals[i] == 0.0) throw std::invalid_argument("row: stored zero value");
    }
    cols_.insert(cols_.end(), cols.begin(), cols.end());
    vals_.insert(vals_.end(), vals.begin(), vals.end());
    offsets_.push_back(cols_.size());
}

DocTermMatrix DocTermMatrix::select_rows(std::span<const std::size_t> rows) const {
    DocTermMatrix out(n_cols_);
    for (std::size_t r : rows) {
        if (r >= n_rows()) throw std::invalid_argument("select_rows: row out of range");
        out.add_row(row_cols(r), row_vals(r));
    }
    return out;
}

namespace {

constexpr char kMatrixMagic[4] = {'T', 'C', 'D', 'M'};
constexpr std::uint32_t kMatrixVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

template <typename T>
void write_vec(std::ofstream& out, const std::vector<T>& v) {
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <typename T>
void read_pod(std::ifstream& in, T& value) {
    in.read(reinterpret_cast<char*>(&value), sizeof value);
}

template <typename T>
void read_vec(std::ifstream& in, std::vector<T>& v, std::size_t count) {
    v.resize(count);
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(count * sizeof(T)));
}

} // namespace

void DocTermMatrix::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write matrix file " + path.string());
    out.write(kMatrixMagic, sizeof kMatrixMagic);
    write_pod(out, kMatrixVersion);
    write_pod(out, static_cast<std::uint64_t>(n_rows()));
    write_pod(out, static_cast<std::uint64_t>(n_cols_));
    write_pod(out, static_cast<std::uint64_t>(nnz()));
    write_vec(out, offsets_);
    write_vec(out, cols_);
    write_vec(out, vals_);
    if (!out) throw DataError("failed writing matrix file " + path.string());
}

DocTermMatrix DocTermMatrix::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open matrix file " + path.string());
    char magic[4];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMatrixMagic, sizeof magic) != 0) {
        throw DataError("not a matrix file: " + path.string());
    }
    std::uint32_t version = 0;
    read_pod(in, version);
    if (version != kMatrixVersion) {
        throw DataError("unsupported matrix version " + std::to_string(version));
    }
    std::uint64_t rows = 0, cols = 0, nnz = 0;
    read_pod(in, rows);
    read_pod(in, cols);
    read_pod(in, nnz);
    DocTermMatrix m(cols);
    read_vec(in, m.offsets_, rows + 1);
    read_vec(in, m.cols_, nnz);
    read_vec(in, m.vals_, nnz);
    if (!in) throw DataError("truncated matrix file " + path.string());
    if (m.offsets_.empty() || m.offsets_.front() != 0 || m.offsets_.back() != nnz ||
        !std::is_sorted(m.offsets_.begin(), m.offsets_.end())) {
        throw DataError("corrupt matrix file " + path.string());
    }
    return m;
}

// ---------------------------------------------------------------------------
// Operations

DocTermMatrix count_vectorize(const std::vector<TokenSequence>& seqs, const Vocabulary& vocab) {
    DocTermMatrix m(vocab.size());
    std::map<std::uint32_t, double> counts;
    std::vector<std::uint32_t> cols;
    std::vector<double> vals;
    for (const TokenSequence& seq : seqs) {
        counts.clear();
        for (const std::string& tok : seq.tokens) {
            if (auto idx = vocab.index_of(tok)) ++counts[*idx];
        }
        cols.clear();
        vals.clear();
        for (const auto& [col, count] : counts) {
            cols.push_back(col);
            vals.push_back(count);
        }
        m.add_row(cols, vals);
    }
    return m;
}

TfidfModel fit_idf(const DocTermMatrix& counts, const TfidfOptions& options) {
    if (counts.n_rows() == 0) throw DataError("fit_idf: zero-document matrix");
    std::vector<std::uint64_t> df(counts.n_cols(), 0);
    for (std::size_t r = 0; r < counts.n_rows(); ++r) {
        for (std::uint32_t c : counts.row_cols(r)) ++df[c];
    }
    const auto n = static_cast<double>(counts.n_rows());
    TfidfModel model;
    model.options = options;
    model.idf.resize(counts.n_cols());
    for (std::size_t t = 0; t < df.size(); ++t) {
        if (options.smooth) {
            model.idf[t] = std::log((1.0 + n) / (1.0 + static_cast<double>(df[t]))) + 1.0;
        } else {
            // df = 0 cannot arise when the model is fit on the same corpus as
            // the vocabulary; treat it as 1 to keep the weight finite.
            const double d = df[t] > 0 ? static_cast<double>(df[t]) : 1.0;
            model.idf[t] = std::log(n / d) + 1.0;
        }
    }
    return model;
}

DocTermMatrix tfidf_transform(const DocTermMatrix& counts, const TfidfModel& model) {
    if (counts.n_cols() != model.idf.size()) {
        throw std::invalid_argument("tfidf_transform: dimension mismatch");
    }
    DocTermMatrix out(counts.n_cols());
    std::vector<std::uint32_t> cols;
    std::vector<double> vals;
    for (std::size_t r = 0; r < counts.n_rows(); ++r) {
        const auto rc = counts.row_cols(r);
        const auto rv = counts.row_vals(r);
        cols.assign(rc.begin(), rc.end());
        vals.assign(rv.begin(), rv.end());
        for (std::size_t i = 0; i < cols.size(); ++i) vals[i] *= model.idf[cols[i]];
        if (model.options.norm == TfidfOptions::Norm::l2 && !vals.empty()) {
            const double norm = std::sqrt(kern::sum_squares(vals.data(), vals.size()));
            if (norm > 0.0) kern::scale(vals.size(), 1.0 / norm, vals.data());
        }
        out.add_row(cols, vals);
    }
    return out;
}

std::vector<PaddedSequence> encode_sequences(const std::vector<TokenSequence>& seqs,
                                             const Vocabulary& vocab, std::size_t max_len) {
    if (max_len < 1) throw std::invalid_argument("encode_sequences: max_len must be >= 1");
    std::vector<PaddedSequence> out;
    out.reserve(seqs.size());
    for (const TokenSequence& seq : seqs) {
        PaddedSequence p;
        p.doc_id = seq.doc_id;
        p.ids.assign(max_len, Vocabulary::kPadId);
        const std::size_t n = std::min(seq.tokens.size(), max_len);
        for (std::size_t i = 0; i < n; ++i) {
            const auto idx = vocab.index_of(seq.tokens[i]);
            p.ids[i] = idx ? *idx + Vocabulary::kIdOffset : Vocabulary::kOovId;
        }
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<std::string> decode_sequence(const PaddedSequence& seq, const Vocabulary& vocab) {
    std::vector<std::string> tokens;
    for (std::uint32_t id : seq.ids) {
        if (id == Vocabulary::kPadId) break;
        if (id == Vocabulary::kOovId) {
            tokens.emplace_back("<oov>");
        } else {
            tokens.push_back(vocab.token_at(id - Vocabulary::kIdOffset));
        }
    }
    return tokens;
}

} // namespace tcat
