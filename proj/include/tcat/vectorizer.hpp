#pragma once

#include "tcat/textprep.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace tcat {

/// Token -> contiguous index map, capped to the most document-frequent
/// tokens. Order before capping is (document frequency desc, token asc), and
/// indexes are assigned in that order. In sequence mode ids are shifted by 2:
/// 0 is padding, 1 is out-of-vocabulary.
class Vocabulary {
public:
    static constexpr std::uint32_t kPadId = 0;
    static constexpr std::uint32_t kOovId = 1;
    static constexpr std::uint32_t kIdOffset = 2;

    Vocabulary() = default;

    /// max_features = 0 means uncapped. Throws DataError when every sequence
    /// is empty.
    static Vocabulary fit(const std::vector<TokenSequence>& seqs, std::size_t max_features);

    std::optional<std::uint32_t> index_of(std::string_view token) const;
    const std::string& token_at(std::uint32_t index) const { return tokens_[index]; }
    std::uint32_t df_of(std::uint32_t index) const { return df_[index]; }
    std::size_t size() const { return tokens_.size(); }
    /// Embedding-table size for the sequence path (vocabulary plus pad/OOV).
    std::size_t sequence_vocab_size() const { return size() + kIdOffset; }

    /// JSON object {token: index}. Document frequencies do not round-trip.
    nlohmann::json to_json() const;
    static Vocabulary from_json(const nlohmann::json& j);

private:
    std::vector<std::string> tokens_;
    std::vector<std::uint32_t> df_;
    std::unordered_map<std::string, std::uint32_t> index_;
};

/// Sparse document x term matrix, CSR layout. Column indexes are strictly
/// increasing within a row and zero values are never stored.
class DocTermMatrix {
public:
    DocTermMatrix() = default;
    explicit DocTermMatrix(std::size_t n_cols) : n_cols_(n_cols) {}

    /// Entries must arrive sorted by column with no duplicates or zeros.
    void add_row(std::span<const std::uint32_t> cols, std::span<const double> vals);

    std::size_t n_rows() const { return offsets_.size() - 1; }
    std::size_t n_cols() const { return n_cols_; }
    std::size_t nnz() const { return cols_.size(); }

    std::span<const std::uint32_t> row_cols(std::size_t r) const {
        return {cols_.data() + offsets_[r], cols_.data() + offsets_[r + 1]};
    }
    std::span<const double> row_vals(std::size_t r) const {
        return {vals_.data() + offsets_[r], vals_.data() + offsets_[r + 1]};
    }
    std::span<double> row_vals_mut(std::size_t r) {
        return {vals_.data() + offsets_[r], vals_.data() + offsets_[r + 1]};
    }

    /// Copies selected rows (in the given order) into a new matrix.
    DocTermMatrix select_rows(std::span<const std::size_t> rows) const;

    /// Versioned little-endian binary layout: magic "TCDM", u32 version,
    /// u64 rows/cols/nnz, row offsets, column indexes, values.
    void save(const std::filesystem::path& path) const;
    static DocTermMatrix load(const std::filesystem::path& path);

private:
    std::vector<std::uint64_t> offsets_{0};
    std::vector<std::uint32_t> cols_;
    std::vector<double> vals_;
    std::size_t n_cols_ = 0;
};

/// Raw token counts: entry (d,t) is the number of occurrences of vocabulary
/// token t in document d. Out-of-vocabulary tokens are ignored.
DocTermMatrix count_vectorize(const std::vector<TokenSequence>& seqs, const Vocabulary& vocab);

struct TfidfOptions {
    bool smooth = true;
    enum class Norm { l2, none } norm = Norm::l2;
};

/// Per-term inverse document frequency weights.
struct TfidfModel {
    std::vector<double> idf;
    TfidfOptions options;
};

/// Smoothed: idf(t) = ln((1+N)/(1+df(t))) + 1. Unsmoothed: ln(N/df(t)) + 1.
/// Throws DataError on a zero-document matrix.
TfidfModel fit_idf(const DocTermMatrix& counts, const TfidfOptions& options = {});

/// count * idf per entry, then each nonzero row scaled to unit Euclidean norm
/// when the l2 option is set. Throws std::invalid_argument on dimension
/// mismatch.
DocTermMatrix tfidf_transform(const DocTermMatrix& counts, const TfidfModel& model);

/// Fixed-length integer encoding of one document for the sequence model.
struct PaddedSequence {
    std::string doc_id;
    std::vector<std::uint32_t> ids; ///< length exactly max_len; 0 = pad, 1 = OOV
};

/// Known tokens map to vocabulary index + 2, unknown to 1; the tail is padded
/// with 0 and anything beyond max_len is truncated.
std::vector<PaddedSequence> encode_sequences(const std::vector<TokenSequence>& seqs,
                                             const Vocabulary& vocab, std::size_t max_len);

/// Inverse of encode_sequences up to the first pad id; OOV ids decode to
/// "<oov>". Debug/test helper.
std::vector<std::string> decode_sequence(const PaddedSequence& seq, const Vocabulary& vocab);

} // namespace tcat
