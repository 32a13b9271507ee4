#include "tcat/corpus.hpp"

#include "tcat/util/error.hpp"
#include "tcat/util/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

namespace tcat {

namespace {

using nlohmann::json;

std::string quoted(std::string_view s) { return "'" + std::string(s) + "'"; }

/// specific -> general and course -> specific must be functions.
void validate_tree(const std::vector<Transcript>& docs) {
    std::map<std::string, std::string> parent_of_specific;
    std::map<std::string, std::string> parent_of_course;
    for (const Transcript& d : docs) {
        if (d.labels.general.empty() || d.labels.specific.empty() || d.labels.course.empty()) {
            throw DataError("record " + quoted(d.id) + ": empty label field");
        }
        auto [sit, snew] = parent_of_specific.emplace(d.labels.specific, d.labels.general);
        if (!snew && sit->second != d.labels.general) {
            throw DataError("hierarchy violation: specific " + quoted(d.labels.specific) +
                            " appears under generals " + quoted(sit->second) + " and " +
                            quoted(d.labels.general));
        }
        auto [cit, cnew] = parent_of_course.emplace(d.labels.course, d.labels.specific);
        if (!cnew && cit->second != d.labels.specific) {
            throw DataError("hierarchy violation: course " + quoted(d.labels.course) +
                            " appears under specifics " + quoted(cit->second) + " and " +
                            quoted(d.labels.specific));
        }
    }
}

} // namespace

std::string_view level_name(Level level) {
    switch (level) {
        case Level::general: return "general";
        case Level::specific: return "specific";
        default: return "course";
    }
}

std::optional<Level> level_from_name(std::string_view name) {
    if (name == "general") return Level::general;
    if (name == "specific") return Level::specific;
    if (name == "course") return Level::course;
    return std::nullopt;
}

LabelIndex::LabelIndex(std::vector<std::string> names) : names_(std::move(names)) {
    std::sort(names_.begin(), names_.end());
    names_.erase(std::unique(names_.begin(), names_.end()), names_.end());
    ids_.reserve(names_.size());
    for (std::size_t i = 0; i < names_.size(); ++i) ids_.emplace(names_[i], static_cast<int>(i));
}

int LabelIndex::id_of(std::string_view name) const {
    auto it = ids_.find(std::string(name));
    if (it == ids_.end()) throw DataError("unknown label " + quoted(name));
    return it->second;
}

const std::string& LabelIndex::name_of(int id) const {
    if (id < 0 || id >= size()) throw DataError("label id out of range: " + std::to_string(id));
    return names_[static_cast<std::size_t>(id)];
}

bool LabelIndex::contains(std::string_view name) const {
    return ids_.count(std::string(name)) != 0;
}

Corpus Corpus::from_transcripts(std::vector<Transcript> docs, const LoadOptions& opts) {
    std::set<std::string_view> seen;
    for (const Transcript& d : docs) {
        if (d.id.empty()) throw DataError("record with empty id");
        if (!seen.insert(d.id).second) throw DataError("duplicate id " + quoted(d.id));
        if (d.text.empty() && !opts.allow_empty_text) {
            throw DataError("record " + quoted(d.id) + ": empty text (allow_empty not set)");
        }
    }
    validate_tree(docs);

    Corpus c;
    c.docs_ = std::move(docs);
    for (Level level : kAllLevels) {
        std::vector<std::string> names;
        names.reserve(c.docs_.size());
        for (const Transcript& d : c.docs_) names.push_back(d.labels.at(level));
        c.index_[static_cast<int>(level)] = LabelIndex(std::move(names));
    }
    return c;
}

std::vector<int> Corpus::label_ids(Level level) const {
    const LabelIndex& idx = labels(level);
    std::vector<int> out;
    out.reserve(docs_.size());
    for (const Transcript& d : docs_) out.push_back(idx.id_of(d.labels.at(level)));
    return out;
}

// ---------------------------------------------------------------------------
// File loading

namespace {

/// RFC 4180 CSV reader. Returns one record per call; tracks physical line
/// numbers (a quoted field may span lines).
class CsvReader {
public:
    explicit CsvReader(std::istream& in) : in_(in) {}

    /// Reads one record. Returns false on clean EOF.
    bool next(std::vector<std::string>& fields, std::size_t& record_line) {
        fields.clear();
        int c = in_.get();
        if (c == EOF) return false;
        record_line = line_;
        std::string field;
        bool in_quotes = false;
        bool field_was_quoted = false;
        while (true) {
            if (c == EOF) {
                if (in_quotes) {
                    throw DataError("line " + std::to_string(record_line) +
                                    ": unterminated quoted field");
                }
                fields.push_back(std::move(field));
                return true;
            }
            const char ch = static_cast<char>(c);
            if (ch == '\n') ++line_;
            if (in_quotes) {
                if (ch == '"') {
                    if (in_.peek() == '"') {
                        in_.get();
                        field.push_back('"');
                    } else {
                        in_quotes = false;
                    }
                } else {
                    field.push_back(ch);
                }
            } else if (ch == '"' && field.empty() && !field_was_quoted) {
                in_quotes = true;
                field_was_quoted = true;
            } else if (ch == ',') {
                fields.push_back(std::move(field));
                field.clear();
                field_was_quoted = false;
            } else if (ch == '\r' && in_.peek() == '\n') {
                // swallow; the '\n' ends the record on the next iteration
            } else if (ch == '\n') {
                fields.push_back(std::move(field));
                return true;
            } else {
                field.push_back(ch);
            }
            c = in_.get();
        }
    }

private:
    std::istream& in_;
    std::size_t line_ = 1;
};

Corpus load_csv(std::istream& in, const LoadOptions& opts) {
    CsvReader reader(in);
    std::vector<std::string> fields;
    std::size_t line = 0;
    if (!reader.next(fields, line)) throw DataError("empty corpus file");
    const std::vector<std::string> expected{"id", "text", "general", "specific", "course"};
    if (fields != expected) {
        throw DataError("line 1: expected header id,text,general,specific,course");
    }
    std::vector<Transcript> docs;
    while (reader.next(fields, line)) {
        if (fields.size() == 1 && fields[0].empty()) continue; // trailing blank line
        if (fields.size() != 5) {
            throw DataError("line " + std::to_string(line) + ": expected 5 fields, got " +
                            std::to_string(fields.size()));
        }
        docs.push_back(Transcript{fields[0], fields[1], LabelPath{fields[2], fields[3], fields[4]}});
    }
    return Corpus::from_transcripts(std::move(docs), opts);
}

Corpus load_jsonl(std::istream& in, const LoadOptions& opts) {
    std::vector<Transcript> docs;
    std::string linebuf;
    std::size_t line = 0;
    while (std::getline(in, linebuf)) {
        ++line;
        if (linebuf.empty()) continue;
        json j;
        try {
            j = json::parse(linebuf);
        } catch (const json::exception& e) {
            throw DataError("line " + std::to_string(line) + ": malformed JSON: " + e.what());
        }
        for (const char* key : {"id", "text", "general", "specific", "course"}) {
            if (!j.contains(key) || !j[key].is_string()) {
                throw DataError("line " + std::to_string(line) + ": missing string field '" +
                                key + "'");
            }
        }
        docs.push_back(Transcript{j["id"].get<std::string>(), j["text"].get<std::string>(),
                                  LabelPath{j["general"].get<std::string>(),
                                            j["specific"].get<std::string>(),
                                            j["course"].get<std::string>()}});
    }
    return Corpus::from_transcripts(std::move(docs), opts);
}

} // namespace

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                   const LoadOptions& opts) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open corpus file " + path.string());
    return format == CorpusFormat::csv ? load_csv(in, opts) : load_jsonl(in, opts);
}

// ---------------------------------------------------------------------------
// Splitting

SplitIds split_ids(const Corpus& corpus, const SplitSpec& spec) {
    if (corpus.size() == 0) throw DataError("split: empty corpus");
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
        throw std::invalid_argument("train_fraction must lie in (0,1)");
    }

    // Strata in label-id order; a single stratum when unstratified.
    std::vector<std::vector<std::size_t>> strata;
    if (spec.stratify) {
        strata.resize(static_cast<std::size_t>(corpus.labels(*spec.stratify).size()));
        const std::vector<int> ids = corpus.label_ids(*spec.stratify);
        for (std::size_t i = 0; i < ids.size(); ++i) {
            strata[static_cast<std::size_t>(ids[i])].push_back(i);
        }
        for (std::size_t s = 0; s < strata.size(); ++s) {
            if (strata[s].size() < 2) {
                throw DataError("stratum " + quoted(corpus.labels(*spec.stratify).name_of(
                                    static_cast<int>(s))) +
                                " has fewer than 2 members");
            }
        }
    } else {
        strata.emplace_back();
        for (std::size_t i = 0; i < corpus.size(); ++i) strata[0].push_back(i);
    }

    Rng rng(spec.seed);
    std::vector<char> in_train(corpus.size(), 0);
    for (std::vector<std::size_t>& members : strata) {
        rng.shuffle(members);
        const auto n = static_cast<double>(members.size());
        auto n_train = static_cast<std::size_t>(std::llround(spec.train_fraction * n));
        if (spec.stratify) {
            n_train = std::clamp<std::size_t>(n_train, 1, members.size() - 1);
        }
        for (std::size_t i = 0; i < n_train; ++i) in_train[members[i]] = 1;
    }

    SplitIds out;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        (in_train[i] ? out.train : out.test).push_back(corpus.transcripts()[i].id);
    }
    return out;
}

std::pair<Corpus, Corpus> split_train_test(const Corpus& corpus, const SplitSpec& spec) {
    const SplitIds ids = split_ids(corpus, spec);
    const std::set<std::string> train_set(ids.train.begin(), ids.train.end());
    std::vector<Transcript> train_docs, test_docs;
    for (const Transcript& d : corpus.transcripts()) {
        (train_set.count(d.id) ? train_docs : test_docs).push_back(d);
    }
    LoadOptions opts;
    opts.allow_empty_text = true; // already validated by the parent corpus
    return {Corpus::from_transcripts(std::move(train_docs), opts),
            Corpus::from_transcripts(std::move(test_docs), opts)};
}

// ---------------------------------------------------------------------------
// Synthetic corpus

namespace {

/// Two lowercase letters encoding i in [0, 676).
std::string alpha2(int i) {
    return {static_cast<char>('a' + i / 26), static_cast<char>('a' + i % 26)};
}

std::vector<std::string> category_vocab(char prefix, int category, int n_words) {
    std::vector<std::string> v;
    v.reserve(static_cast<std::size_t>(n_words));
    for (int w = 0; w < n_words; ++w) {
        v.push_back(std::string(1, prefix) + alpha2(category) + "w" + alpha2(w));
    }
    return v;
}

} // namespace

Corpus generate_synthetic_corpus(const SyntheticSpec& spec) {
    if (spec.n_general < 1 || spec.branching[0] < 1 || spec.branching[1] < 1 ||
        spec.docs_per_course < 1 || spec.vocab_per_category < 1) {
        throw std::invalid_argument("synthetic corpus: all counts must be >= 1");
    }
    if (spec.vocab_per_category > 676 || spec.n_general > 676) {
        throw std::invalid_argument("synthetic corpus: counts exceed name space");
    }
    const int n_specific = spec.n_general * spec.branching[0];
    const int n_course = n_specific * spec.branching[1];
    if (n_specific > 676 || n_course > 676) {
        throw std::invalid_argument("synthetic corpus: counts exceed name space");
    }

    std::vector<std::vector<std::string>> gen_vocab, spe_vocab, crs_vocab;
    for (int g = 0; g < spec.n_general; ++g) {
        gen_vocab.push_back(category_vocab('g', g, spec.vocab_per_category));
    }
    for (int s = 0; s < n_specific; ++s) {
        spe_vocab.push_back(category_vocab('s', s, spec.vocab_per_category));
    }
    for (int c = 0; c < n_course; ++c) {
        crs_vocab.push_back(category_vocab('c', c, spec.vocab_per_category));
    }
    const std::vector<std::string> noise_vocab =
        category_vocab('n', 0, std::max(20, 2 * spec.vocab_per_category));

    Rng rng(spec.seed);
    std::vector<Transcript> docs;
    docs.reserve(static_cast<std::size_t>(n_course) * spec.docs_per_course);
    int doc_counter = 0;
    for (int c = 0; c < n_course; ++c) {
        const int s = c / spec.branching[1];
        const int g = s / spec.branching[0];
        const LabelPath labels{"gen" + alpha2(g), "spe" + alpha2(s), "crs" + alpha2(c)};
        for (int d = 0; d < spec.docs_per_course; ++d) {
            const std::size_t length = 45 + rng.below(31); // 45..75 tokens
            std::vector<std::string> tokens;
            tokens.reserve(length);
            for (std::size_t t = 0; t < length; ++t) {
                const double u = rng.uniform();
                const std::vector<std::string>* pool;
                if (u < 0.30) {
                    pool = &noise_vocab;
                } else if (u < 0.58) {
                    pool = &gen_vocab[static_cast<std::size_t>(g)];
                } else if (u < 0.82) {
                    pool = &spe_vocab[static_cast<std::size_t>(s)];
                } else {
                    pool = &crs_vocab[static_cast<std::size_t>(c)];
                }
                tokens.push_back((*pool)[rng.below(pool->size())]);
            }

            // Light transcript-style formatting: sentences with leading
            // capitals and periods, plus occasional noise markers.
            std::string text;
            std::size_t i = 0;
            while (i < tokens.size()) {
                if (rng.uniform() < 0.03) text += "[MUSIC] ";
                const std::size_t sentence_len = std::min(tokens.size() - i, 8 + rng.below(7));
                for (std::size_t k = 0; k < sentence_len; ++k) {
                    std::string tok = tokens[i + k];
                    if (k == 0) tok[0] = static_cast<char>(tok[0] - 'a' + 'A');
                    text += tok;
                    text += (k + 1 == sentence_len) ? "." : " ";
                }
                text += " ";
                i += sentence_len;
            }

            char idbuf[16];
            std::snprintf(idbuf, sizeof idbuf, "vid%05d", doc_counter++);
            docs.push_back(Transcript{idbuf, std::move(text), labels});
        }
    }
    return Corpus::from_transcripts(std::move(docs));
}

} // namespace tcat
