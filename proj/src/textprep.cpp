#include "tcat/textprep.hpp"

#include "tcat/util/error.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

namespace tcat {

namespace {

bool is_ascii_letter(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool is_ws(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

/// Simple lowercase mapping for ASCII, the Latin-1 supplement, and Latin
/// Extended-A. Codepoints outside these ranges pass through.
char32_t lower_codepoint(char32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
    if (cp == 0x130) return 0x69; // dotted capital I
    if (cp >= 0x100 && cp <= 0x137 && cp % 2 == 0) return cp + 1;
    if (cp >= 0x139 && cp <= 0x147 && cp % 2 == 1) return cp + 1;
    if (cp >= 0x14A && cp <= 0x177 && cp % 2 == 0) return cp + 1;
    if (cp == 0x178) return 0xFF;
    if (cp >= 0x179 && cp <= 0x17D && cp % 2 == 1) return cp + 1;
    return cp;
}

void encode_utf8(char32_t cp, std::string& out) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

/// Decodes one codepoint at position i. Returns the number of bytes consumed,
/// or 0 when the bytes do not form valid UTF-8.
std::size_t decode_utf8(std::string_view s, std::size_t i, char32_t& cp) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    std::size_t len;
    if (b0 < 0x80) {
        cp = b0;
        return 1;
    } else if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        return 0;
    }
    if (i + len > s.size()) return 0;
    for (std::size_t k = 1; k < len; ++k) {
        const auto b = static_cast<unsigned char>(s[i + k]);
        if ((b & 0xC0) != 0x80) return 0;
        cp = (cp << 6) | (b & 0x3F);
    }
    return len;
}

} // namespace

std::string remove_noise(std::string_view text, const PrepConfig& config) {
    std::string s(text);
    for (const std::string& pat : config.noise_patterns) {
        if (pat.empty()) continue;
        // Re-scan until no occurrence is left, so deletions cannot splice a
        // new occurrence together.
        for (std::size_t pos = s.find(pat); pos != std::string::npos; pos = s.find(pat)) {
            s.erase(pos, pat.size());
        }
    }
    if (config.strip_non_letters) {
        for (char& c : s) {
            const auto uc = static_cast<unsigned char>(c);
            if (!is_ascii_letter(uc) && !is_ws(uc)) c = ' ';
        }
    }
    return s;
}

std::string normalize_case(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        char32_t cp = 0;
        const std::size_t len = decode_utf8(text, i, cp);
        if (len == 0) {
            out.push_back(text[i]);
            ++i;
            continue;
        }
        encode_utf8(lower_codepoint(cp), out);
        i += len;
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view text, const PrepConfig& config) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_ws(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t start = i;
        while (i < text.size() && !is_ws(static_cast<unsigned char>(text[i]))) ++i;
        if (i - start >= config.min_token_len) {
            tokens.emplace_back(text.substr(start, i - start));
        }
    }
    return tokens;
}

std::vector<std::string> remove_stopwords(std::vector<std::string> tokens,
                                          const PrepConfig& config) {
    std::erase_if(tokens, [&](const std::string& t) { return config.stopwords.count(t) != 0; });
    return tokens;
}

std::vector<std::string> lemmatize(std::vector<std::string> tokens, const PrepConfig& config) {
    for (std::string& tok : tokens) {
        auto hit = config.lemma_lexicon.find(tok);
        if (hit != config.lemma_lexicon.end()) {
            tok = hit->second;
            continue;
        }
        for (const auto& [suffix, replacement] : config.suffix_rules) {
            if (tok.size() < suffix.size() || !tok.ends_with(suffix)) continue;
            if (suffix == "s" && tok.ends_with("ss")) continue;
            std::string candidate = tok.substr(0, tok.size() - suffix.size()) + replacement;
            if (candidate.size() >= 2) tok = std::move(candidate);
            break; // first matching rule decides
        }
    }
    return tokens;
}

TokenSequence preprocess(const Transcript& doc, const PrepConfig& config) {
    return TokenSequence{
        doc.id,
        lemmatize(remove_stopwords(tokenize(normalize_case(remove_noise(doc.text, config)),
                                            config),
                                   config),
                  config)};
}

std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open stopword list " + path.string());
    std::unordered_set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) {
            line.pop_back();
        }
        if (line.empty()) continue;
        std::transform(line.begin(), line.end(), line.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        words.insert(line);
    }
    return words;
}

std::unordered_map<std::string, std::string> load_lemma_lexicon(
    const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open lemma lexicon " + path.string());
    std::unordered_map<std::string, std::string> lex;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) {
            line.pop_back();
        }
        if (line.empty()) continue;
        const std::size_t tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
            throw ConfigError("lemma lexicon " + path.string() + " line " +
                              std::to_string(lineno) + ": expected word<TAB>lemma");
        }
        lex.emplace(line.substr(0, tab), line.substr(tab + 1));
    }
    return lex;
}

} // namespace tcat
