#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace tcat {

/// The three levels of the label hierarchy, coarse to fine.
enum class Level { general = 0, specific = 1, course = 2 };

inline constexpr std::array<Level, 3> kAllLevels{Level::general, Level::specific, Level::course};

std::string_view level_name(Level level);
std::optional<Level> level_from_name(std::string_view name);

/// Full label path of one transcript. The per-corpus hierarchy must form a
/// tree: a specific category has exactly one general parent, a course exactly
/// one specific parent.
struct LabelPath {
    std::string general;
    std::string specific;
    std::string course;

    const std::string& at(Level level) const {
        switch (level) {
            case Level::general: return general;
            case Level::specific: return specific;
            default: return course;
        }
    }
};

/// One video transcript: the unit of classification.
struct Transcript {
    std::string id;
    std::string text;
    LabelPath labels;
};

/// Bijection between category names and contiguous integer ids at one level.
/// Ids are assigned in lexicographic name order, so they are stable across
/// input orderings.
class LabelIndex {
public:
    LabelIndex() = default;
    /// Names must be unique; they are sorted internally.
    explicit LabelIndex(std::vector<std::string> names);

    int id_of(std::string_view name) const; ///< throws DataError for unknown names
    const std::string& name_of(int id) const;
    bool contains(std::string_view name) const;
    int size() const { return static_cast<int>(names_.size()); }
    const std::vector<std::string>& names() const { return names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, int> ids_;
};

struct LoadOptions {
    bool allow_empty_text = false;
};

/// Immutable transcript collection with per-level label indexes. Construction
/// validates id uniqueness and the label-tree invariants; instances are safe
/// to share read-only.
class Corpus {
public:
    Corpus() = default;

    /// Validates and indexes. Throws DataError on duplicate ids, empty label
    /// fields, hierarchy violations, or (unless allowed) empty text.
    static Corpus from_transcripts(std::vector<Transcript> docs, const LoadOptions& opts = {});

    const std::vector<Transcript>& transcripts() const { return docs_; }
    std::size_t size() const { return docs_.size(); }
    const LabelIndex& labels(Level level) const { return index_[static_cast<int>(level)]; }

    /// Per-document integer label at a level.
    std::vector<int> label_ids(Level level) const;

private:
    std::vector<Transcript> docs_;
    std::array<LabelIndex, 3> index_;
};

enum class CorpusFormat { csv, jsonl };

/// Reads a corpus file. CSV requires the exact header
/// `id,text,general,specific,course` and RFC 4180 quoting; JSONL expects one
/// object per line with those keys. Errors carry the offending line number.
Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                   const LoadOptions& opts = {});

struct SplitSpec {
    double train_fraction = 0.8;
    std::uint64_t seed = 0;
    std::optional<Level> stratify; ///< nullopt: unstratified
};

/// Train/test id lists in corpus order. The JSON form of this is the split
/// manifest written by the harness.
struct SplitIds {
    std::vector<std::string> train;
    std::vector<std::string> test;
};

/// Deterministic disjoint cover of the corpus. Stratified mode keeps each
/// stratum's train share within one item of train_fraction and requires
/// every stratum to have at least two members.
SplitIds split_ids(const Corpus& corpus, const SplitSpec& spec);

/// Same split, materialized as two corpora (each re-indexed over the labels
/// it actually contains).
std::pair<Corpus, Corpus> split_train_test(const Corpus& corpus, const SplitSpec& spec);

/// Parameters for the synthetic corpus generator, a desk-scale stand-in for
/// a real transcript dataset. Documents mix tokens drawn from their general,
/// specific, and course category vocabularies with shared noise tokens, so
/// the levels are separable but imperfectly so.
struct SyntheticSpec {
    int n_general = 2;
    std::array<int, 2> branching{2, 2}; ///< specifics per general, courses per specific
    int docs_per_course = 5;
    int vocab_per_category = 12;
    std::uint64_t seed = 0;
};

Corpus generate_synthetic_corpus(const SyntheticSpec& spec);

} // namespace tcat
