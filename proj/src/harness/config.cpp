#include "tcat/harness.hpp"
#include "tcat/util/error.hpp"
#include "tcat/util/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>

namespace tcat {

using nlohmann::json;

std::string_view model_name(ModelKind m) { return m == ModelKind::knn ? "knn" : "lstm"; }

std::optional<ModelKind> model_from_name(std::string_view name) {
    if (name == "knn") return ModelKind::knn;
    if (name == "lstm") return ModelKind::lstm;
    return std::nullopt;
}

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

Level parse_level(const std::string& name) {
    const auto level = level_from_name(name);
    if (!level) throw ConfigError("unknown level '" + name + "'");
    return *level;
}

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::filesystem::path& p) {
    return p.is_absolute() ? p : base / p;
}

} // namespace

PrepConfig ExperimentConfig::prep_config() const {
    PrepConfig prep;
    prep.noise_patterns = noise_patterns;
    prep.strip_non_letters = strip_non_letters;
    prep.min_token_len = min_token_len;
    prep.stopwords = load_stopwords(stopword_path);
    prep.lemma_lexicon = load_lemma_lexicon(lemma_path);
    return prep;
}

json ExperimentConfig::to_json() const {
    json j;
    j["seed"] = seed;
    j["out_dir"] = out_dir.string();
    j["allow_empty"] = allow_empty;
    if (corpus.type == CorpusSource::Type::file) {
        j["corpus"] = {{"type", "file"},
                       {"path", corpus.path.string()},
                       {"format", corpus.format == CorpusFormat::csv ? "csv" : "jsonl"}};
    } else {
        j["corpus"] = {{"type", "synthetic"},
                       {"n_general", corpus.synthetic.n_general},
                       {"branching", corpus.synthetic.branching},
                       {"docs_per_course", corpus.synthetic.docs_per_course},
                       {"vocab_per_category", corpus.synthetic.vocab_per_category},
                       {"seed", corpus.synthetic.seed}};
    }
    j["prep"] = {{"stopwords", stopword_path.string()},
                 {"lemmas", lemma_path.string()},
                 {"noise_patterns", noise_patterns},
                 {"strip_non_letters", strip_non_letters},
                 {"min_token_len", min_token_len}};
    j["split"] = {{"train_fraction", split.train_fraction},
                  {"seed", split.seed},
                  {"stratify", split.stratify ? std::string(level_name(*split.stratify))
                                              : std::string("none")}};
    json levels_json = json::array();
    for (Level level : levels) levels_json.push_back(std::string(level_name(level)));
    j["levels"] = std::move(levels_json);
    j["vocab_cap"] = vocab_cap;
    j["knn"] = {{"k", knn.k}, {"metric", std::string(metric_name(knn.metric))}};
    j["lstm"] = {{"embed_dim", lstm.embed_dim},
                 {"hidden", lstm.hidden},
                 {"max_len", lstm.max_len},
                 {"dropout", lstm.dropout},
                 {"recurrent_dropout", lstm.recurrent_dropout},
                 {"train",
                  {{"learning_rate", lstm.train.learning_rate},
                   {"beta1", lstm.train.beta1},
                   {"beta2", lstm.train.beta2},
                   {"epsilon", lstm.train.epsilon},
                   {"batch_size", lstm.train.batch_size},
                   {"max_epochs", lstm.train.max_epochs},
                   {"validation_fraction", lstm.train.validation_fraction},
                   {"patience", lstm.train.patience},
                   {"seed", lstm.train.seed}}}};
    j["sweep_val_fraction"] = sweep_val_fraction;
    return j;
}

std::string ExperimentConfig::config_hash() const {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(to_json().dump())));
    return buf;
}

ExperimentConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
    ExperimentConfig c;
    c.seed = get_or<std::uint64_t>(j, "seed", 0);
    c.out_dir = resolve(base_dir, get_or<std::string>(j, "out_dir", "runs/out"));
    c.allow_empty = get_or<bool>(j, "allow_empty", false);

    if (j.contains("corpus")) {
        const json& cj = j.at("corpus");
        const auto type = get_or<std::string>(cj, "type", "file");
        if (type == "file") {
            c.corpus.type = CorpusSource::Type::file;
            if (!cj.contains("path")) throw ConfigError("corpus.path is required");
            c.corpus.path = resolve(base_dir, cj.at("path").get<std::string>());
            const auto format = get_or<std::string>(cj, "format", "jsonl");
            if (format == "csv") {
                c.corpus.format = CorpusFormat::csv;
            } else if (format == "jsonl") {
                c.corpus.format = CorpusFormat::jsonl;
            } else {
                throw ConfigError("corpus.format must be csv or jsonl");
            }
        } else if (type == "synthetic") {
            c.corpus.type = CorpusSource::Type::synthetic;
            c.corpus.synthetic.n_general = get_or<int>(cj, "n_general", 2);
            c.corpus.synthetic.branching = get_or<std::array<int, 2>>(cj, "branching", {2, 2});
            c.corpus.synthetic.docs_per_course = get_or<int>(cj, "docs_per_course", 5);
            c.corpus.synthetic.vocab_per_category = get_or<int>(cj, "vocab_per_category", 12);
            c.corpus.synthetic.seed = get_or<std::uint64_t>(cj, "seed", c.seed);
        } else {
            throw ConfigError("corpus.type must be file or synthetic");
        }
    } else {
        throw ConfigError("config requires a corpus section");
    }

    const json prep = j.contains("prep") ? j.at("prep") : json::object();
    c.stopword_path = resolve(base_dir, get_or<std::string>(prep, "stopwords", "data/stopwords_en.txt"));
    c.lemma_path = resolve(base_dir, get_or<std::string>(prep, "lemmas", "data/lemmas_en.tsv"));
    c.noise_patterns = get_or<std::vector<std::string>>(prep, "noise_patterns", {"[MUSIC]"});
    c.strip_non_letters = get_or<bool>(prep, "strip_non_letters", true);
    c.min_token_len = get_or<std::size_t>(prep, "min_token_len", 2);

    if (j.contains("levels")) {
        c.levels.clear();
        for (const auto& name : j.at("levels")) c.levels.push_back(parse_level(name.get<std::string>()));
        if (c.levels.empty()) throw ConfigError("levels must not be empty");
    }

    const json split = j.contains("split") ? j.at("split") : json::object();
    c.split.train_fraction = get_or<double>(split, "train_fraction", 0.8);
    c.split.seed = get_or<std::uint64_t>(split, "seed", c.seed);
    if (split.contains("stratify")) {
        const auto name = split.at("stratify").get<std::string>();
        c.split.stratify = name == "none" ? std::nullopt : std::optional<Level>(parse_level(name));
    } else {
        // default: stratify at the finest level being run
        c.split.stratify = *std::max_element(c.levels.begin(), c.levels.end());
    }

    c.vocab_cap = get_or<std::size_t>(j, "vocab_cap", 50000);

    const json knn = j.contains("knn") ? j.at("knn") : json::object();
    c.knn.k = get_or<int>(knn, "k", 7);
    const auto metric = metric_from_name(get_or<std::string>(knn, "metric", "cosine"));
    if (!metric) throw ConfigError("knn.metric must be cosine or euclidean");
    c.knn.metric = *metric;

    const json lstm = j.contains("lstm") ? j.at("lstm") : json::object();
    c.lstm.embed_dim = get_or<std::size_t>(lstm, "embed_dim", 100);
    c.lstm.hidden = get_or<std::size_t>(lstm, "hidden", 100);
    c.lstm.max_len = get_or<std::size_t>(lstm, "max_len", 3002);
    c.lstm.dropout = get_or<double>(lstm, "dropout", 0.2);
    c.lstm.recurrent_dropout = get_or<double>(lstm, "recurrent_dropout", 0.2);
    const json train = lstm.contains("train") ? lstm.at("train") : json::object();
    c.lstm.train.learning_rate = get_or<double>(train, "learning_rate", 0.001);
    c.lstm.train.beta1 = get_or<double>(train, "beta1", 0.9);
    c.lstm.train.beta2 = get_or<double>(train, "beta2", 0.999);
    c.lstm.train.epsilon = get_or<double>(train, "epsilon", 1e-8);
    c.lstm.train.batch_size = get_or<std::size_t>(train, "batch_size", 64);
    c.lstm.train.max_epochs = get_or<std::size_t>(train, "max_epochs", 50);
    c.lstm.train.validation_fraction = get_or<double>(train, "validation_fraction", 0.1);
    c.lstm.train.patience = get_or<int>(train, "patience", 3);
    c.lstm.train.seed = get_or<std::uint64_t>(train, "seed", c.seed);

    c.sweep_val_fraction = get_or<double>(j, "sweep_val_fraction", 0.2);

    // existence checks for referenced files
    if (c.corpus.type == CorpusSource::Type::file && !std::filesystem::exists(c.corpus.path)) {
        throw ConfigError("corpus file does not exist: " + c.corpus.path.string());
    }
    for (const auto& p : {c.stopword_path, c.lemma_path}) {
        if (!std::filesystem::exists(p)) {
            throw ConfigError("referenced file does not exist: " + p.string());
        }
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + path.string() + ": " + e.what());
    }
    return config_from_json(j, std::filesystem::absolute(path).parent_path());
}

} // namespace tcat
