#pragma once

#include "tcat/corpus.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace tcat {

/// Settings for the cleaning chain: noise removal, lowercasing, tokenization,
/// stopword removal, lemmatization.
struct PrepConfig {
    /// Literal markers deleted from the raw text, e.g. "[MUSIC]".
    std::vector<std::string> noise_patterns{"[MUSIC]"};
    /// Replace every byte outside ASCII letters and whitespace with a space.
    bool strip_non_letters = true;
    /// Lowercase tokens dropped after tokenization.
    std::unordered_set<std::string> stopwords;
    /// word -> lemma lookup, consulted before the suffix rules.
    std::unordered_map<std::string, std::string> lemma_lexicon;
    /// Suffix rules tried in order when the lexicon misses. A rule output
    /// shorter than two characters reverts to the original token.
    std::vector<std::pair<std::string, std::string>> suffix_rules{
        {"ies", "y"}, {"sses", "ss"}, {"ing", ""}, {"ed", ""}, {"s", ""}};
    std::size_t min_token_len = 2;
};

/// The cleaned form of one transcript: lowercase alphabetic tokens, stopwords
/// removed, lemmatized. May be empty (callers flag empty sequences).
struct TokenSequence {
    std::string doc_id;
    std::vector<std::string> tokens;
};

/// Deletes every noise-pattern occurrence (repeatedly, so no fragments
/// survive), then optionally replaces non-letter bytes with spaces.
std::string remove_noise(std::string_view text, const PrepConfig& config);

/// UTF-8 aware lowercasing (ASCII, Latin-1 supplement, Latin Extended-A).
/// Idempotent; bytes that do not form valid UTF-8 pass through unchanged.
std::string normalize_case(std::string_view text);

/// Splits on whitespace runs and drops tokens shorter than min_token_len.
std::vector<std::string> tokenize(std::string_view text, const PrepConfig& config);

/// Order-preserving stopword filter.
std::vector<std::string> remove_stopwords(std::vector<std::string> tokens,
                                          const PrepConfig& config);

/// Lexicon-first lemmatization with suffix-rule fallback. The trailing-"s"
/// rule does not fire on "ss" endings.
std::vector<std::string> lemmatize(std::vector<std::string> tokens, const PrepConfig& config);

/// The full chain:
/// lemmatize(remove_stopwords(tokenize(normalize_case(remove_noise(text))))).
TokenSequence preprocess(const Transcript& doc, const PrepConfig& config);

/// Loads one lowercase token per line. Throws ConfigError on unreadable files.
std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path);

/// Loads a TSV lexicon: word<TAB>lemma per line.
std::unordered_map<std::string, std::string> load_lemma_lexicon(
    const std::filesystem::path& path);

} // namespace tcat
