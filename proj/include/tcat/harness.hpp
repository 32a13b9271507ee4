#pragma once

#include "tcat/corpus.hpp"
#include "tcat/knn.hpp"
#include "tcat/metrics.hpp"
#include "tcat/seqnet.hpp"
#include "tcat/textprep.hpp"
#include "tcat/vectorizer.hpp"

#include <nlohmann/json_fwd.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace tcat {

enum class ModelKind { knn, lstm };

std::string_view model_name(ModelKind m);
std::optional<ModelKind> model_from_name(std::string_view name);

/// Where the corpus comes from: a CSV/JSONL file or the synthetic generator.
struct CorpusSource {
    enum class Type { file, synthetic } type = Type::file;
    std::filesystem::path path;
    CorpusFormat format = CorpusFormat::jsonl;
    SyntheticSpec synthetic;
};

struct KnnSettings {
    int k = 7;
    Metric metric = Metric::cosine;
};

struct LstmSettings {
    std::size_t embed_dim = 100;
    std::size_t hidden = 100;
    std::size_t max_len = 3002;
    double dropout = 0.2;
    double recurrent_dropout = 0.2;
    TrainConfig train;
};

/// Declarative experiment description: one JSON file drives every command.
/// Relative paths resolve against the config file's directory.
struct ExperimentConfig {
    std::uint64_t seed = 0;
    std::filesystem::path out_dir = "runs/out";
    CorpusSource corpus;
    bool allow_empty = false;

    std::filesystem::path stopword_path;
    std::filesystem::path lemma_path;
    std::vector<std::string> noise_patterns{"[MUSIC]"};
    bool strip_non_letters = true;
    std::size_t min_token_len = 2;

    SplitSpec split;                 ///< stratify defaults to the finest requested level
    std::vector<Level> levels{Level::general, Level::specific, Level::course};
    std::size_t vocab_cap = 50000;
    KnnSettings knn;
    LstmSettings lstm;
    double sweep_val_fraction = 0.2;

    PrepConfig prep_config() const; ///< loads the stopword/lemma files
    std::string config_hash() const;
    nlohmann::json to_json() const;
};

/// Parses and validates a config file; referenced files must exist.
/// Throws ConfigError.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig config_from_json(const nlohmann::json& j,
                                  const std::filesystem::path& base_dir);

/// On-disk layout of one run directory.
struct RunPaths {
    std::filesystem::path root;

    std::filesystem::path manifest() const { return root / "manifest.json"; }
    std::filesystem::path prepared() const { return root / "prepared"; }
    std::filesystem::path tokens() const { return prepared() / "tokens.jsonl"; }
    std::filesystem::path vocabulary() const { return prepared() / "vocabulary.json"; }
    std::filesystem::path labels() const { return prepared() / "labels.json"; }
    std::filesystem::path split() const { return prepared() / "split.json"; }
    std::filesystem::path prep_manifest() const { return prepared() / "prep_manifest.json"; }
    std::filesystem::path models() const { return root / "models"; }
    std::filesystem::path reports() const { return root / "reports"; }
    std::filesystem::path report(ModelKind m, Level l) const;
    std::filesystem::path model_prefix(ModelKind m, Level l) const;
};

/// Atomic write: temp file in the target directory, then rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Prepared artifacts loaded back for train/evaluate/sweep.
struct PreparedData {
    std::vector<TokenSequence> tokens;  ///< corpus order
    Vocabulary vocabulary;
    std::array<std::vector<std::string>, 3> label_names; ///< per level, id order
    std::vector<std::array<int, 3>> doc_labels;          ///< per doc, per level
    std::vector<std::string> doc_ids;
    std::vector<std::size_t> train_rows, test_rows;      ///< row indexes into tokens

    int n_classes(Level level) const {
        return static_cast<int>(label_names[static_cast<int>(level)].size());
    }
};

PreparedData load_prepared(const RunPaths& paths);

/// prepare: ingest + preprocess + vocabulary + split manifest. Idempotent for
/// a fixed config (byte-identical artifacts).
void cmd_prepare(const ExperimentConfig& config);

/// train: fit the chosen model at the chosen level on the train split,
/// evaluate on the test split, persist checkpoint and JSON report.
MetricsReport cmd_train(const ExperimentConfig& config, ModelKind model, Level level);

/// evaluate: reload the persisted model and re-run test-split evaluation.
MetricsReport cmd_evaluate(const ExperimentConfig& config, ModelKind model, Level level);

struct ExperimentOutcome {
    /// cell reports in (model, level) order as run
    std::vector<std::tuple<ModelKind, Level, MetricsReport>> cells;
    bool knn_non_increasing = true;
    bool lstm_non_increasing = true;
    std::string tables_text;
};

/// experiment: every requested level for both models, a rendered table per
/// model, and the accuracy-vs-depth trend record.
ExperimentOutcome cmd_experiment(const ExperimentConfig& config);

struct SweepResult {
    std::vector<int> ks;
    std::vector<double> accuracies;
    int best_k = 0;
    std::vector<std::string> val_ids; ///< held-out validation documents
};

/// sweep-k: KNN accuracy on a held-out validation slice of the train split
/// for each k in [k_min, k_max]; argmax with low-k tie-breaking.
SweepResult cmd_sweep_k(const ExperimentConfig& config, Level level, int k_min, int k_max);

/// Structural validation of emitted JSON against the documented schemas.
void validate_report_json(const nlohmann::json& j);
void validate_experiment_json(const nlohmann::json& j);
void validate_sweep_json(const nlohmann::json& j);

/// CLI entry point (verbs: prepare, train, evaluate, experiment, sweep-k).
/// Returns the process exit code: 0 ok, 2 config error, 3 data error,
/// 4 training failure.
int run_cli(int argc, const char* const* argv);

} // namespace tcat
