#pragma once

#include "tcat/vectorizer.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace tcat {

/// Dense row-major tensor. Plumbing type: shape plus flat values.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> v;

    static Tensor zeros(std::vector<std::size_t> shape);
    std::size_t size() const { return v.size(); }
    double* data() { return v.data(); }
    const double* data() const { return v.data(); }
    bool all_finite() const;
};

/// Dense row-major matrix of batch results (probabilities, targets).
struct DenseMat {
    std::size_t rows = 0, cols = 0;
    std::vector<double> v;

    DenseMat() = default;
    DenseMat(std::size_t r, std::size_t c) : rows(r), cols(c), v(r * c, 0.0) {}
    std::span<double> row(std::size_t r) { return {v.data() + r * cols, cols}; }
    std::span<const double> row(std::size_t r) const { return {v.data() + r * cols, cols}; }
};

/// Single-layer LSTM classifier: embedding, one LSTM layer with input and
/// recurrent dropout, dense softmax head.
///
/// Gate weights are stored packed as [*, 4*hidden] in gate order i|f|g|o.
/// Checkpoints serialize the per-gate slices separately.
struct LstmNetwork {
    std::size_t vocab_size = 0; ///< embedding rows, including pad (0) and OOV (1)
    std::size_t embed_dim = 0;
    std::size_t hidden = 0;
    std::size_t n_classes = 0;
    double dropout_rate = 0.2;
    double recurrent_dropout_rate = 0.2;

    Tensor embedding; ///< [vocab_size, embed_dim]
    Tensor w_x;       ///< [embed_dim, 4*hidden]
    Tensor w_h;       ///< [hidden, 4*hidden]
    Tensor bias;      ///< [4*hidden]; forget slice initialized to 1
    Tensor w_out;     ///< [hidden, n_classes]
    Tensor b_out;     ///< [n_classes]

    struct ParamRef {
        const char* name;
        Tensor* tensor;
    };
    /// Parameter registry in checkpoint order.
    std::vector<ParamRef> params();
    std::vector<ParamRef> params() const = delete;
};

/// Gradients with the same shapes as the network parameters.
struct LstmGradients {
    Tensor embedding, w_x, w_h, bias, w_out, b_out;

    static LstmGradients zeros_like(const LstmNetwork& net);
    std::vector<Tensor*> tensors();
};

/// Glorot-uniform weights (bound sqrt(6/(fan_in+fan_out)) per matrix), zero
/// biases except the forget-gate slice at 1. Deterministic under seed.
LstmNetwork init_network(std::size_t vocab_size, std::size_t embed_dim, std::size_t hidden,
                         std::size_t n_classes, std::uint64_t seed, double dropout_rate = 0.2,
                         double recurrent_dropout_rate = 0.2);

/// Activations cached by forward for backpropagation through time. Padding
/// steps (id 0) are skipped entirely, so cached steps are the processed ones.
struct SeqCache {
    std::vector<std::uint32_t> step_ids; ///< token id per processed step
    std::vector<double> x;               ///< [steps, embed] masked inputs
    std::vector<double> h_in;            ///< [steps, hidden] masked previous h
    std::vector<double> gates;           ///< [steps, 4*hidden] i|f|g|o post-activation
    std::vector<double> c_prev;          ///< [steps, hidden]
    std::vector<double> tanh_c;          ///< [steps, hidden]
    std::vector<double> h_final;         ///< [hidden]
    std::vector<double> mask_x;          ///< inverted dropout mask, empty if unused
    std::vector<double> mask_h;
};

struct ForwardResult {
    DenseMat probs; ///< [batch, n_classes]; rows sum to 1
    std::vector<SeqCache> cache;
};

/// Runs the gate recurrence over each sequence. Padding ids leave (h, c)
/// unchanged; in train mode one inverted-dropout mask per sequence is applied
/// to the embedded input and another to the recurrent input, reused across
/// timesteps. Throws std::invalid_argument for ids outside the vocabulary.
ForwardResult forward(const LstmNetwork& net, std::span<const PaddedSequence> batch,
                      bool train_mode, std::uint64_t mask_seed);

/// Mean categorical cross-entropy. Probabilities are clipped to [1e-12, 1]
/// before the log; rows must already sum to ~1. Accepts soft targets; one-hot
/// rows give -mean ln p[target].
double cross_entropy(const DenseMat& probs, const DenseMat& targets);

/// BPTT adjoints of forward for the mean cross-entropy loss. Padding steps
/// contribute zero gradient.
LstmGradients backward(const LstmNetwork& net, const ForwardResult& fwd, const DenseMat& targets);

struct TrainConfig {
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::size_t batch_size = 64;
    std::size_t max_epochs = 50;
    double validation_fraction = 0.1;
    int patience = 3;
    std::uint64_t seed = 0;
};

/// Adam moment buffers; one slot per parameter tensor, plus the shared step
/// count and running beta powers.
struct AdamState {
    std::uint64_t t = 0;
    double beta1_pow = 1.0;
    double beta2_pow = 1.0;
    std::vector<Tensor> m, v;
};

/// One Adam update over every parameter tensor.
void adam_step(LstmNetwork& net, const LstmGradients& grads, AdamState& state,
               const TrainConfig& config);

/// Patience rule on validation loss: stop after `patience` consecutive epochs
/// without strict improvement over the best seen.
class EarlyStopper {
public:
    explicit EarlyStopper(int patience) : patience_(patience) {}

    /// Feed one epoch's validation loss; true means stop after this epoch.
    bool observe(double val_loss);
    int best_epoch() const { return best_epoch_; }
    double best_loss() const { return best_loss_; }

private:
    int patience_;
    int epoch_ = -1;
    int best_epoch_ = -1;
    double best_loss_ = 0.0;
    int stale_ = 0;
};

struct TrainingHistory {
    std::vector<double> train_loss;
    std::vector<double> val_loss;
    std::vector<double> val_accuracy;
    int best_epoch = -1; ///< index of the minimum validation loss

    std::string to_csv() const;
};

/// Full training loop: seeded shuffling per epoch, Adam updates, per-epoch
/// validation with dropout off, early stopping with best-epoch weight
/// restoration. The validation partition is carved from the given data using
/// config.validation_fraction (seeded).
TrainingHistory train(LstmNetwork& net, const std::vector<PaddedSequence>& sequences,
                      const std::vector<int>& labels, const TrainConfig& config);

/// Argmax classes with dropout disabled; ties resolve to the smaller id.
std::vector<int> predict_classes(const LstmNetwork& net, std::span<const PaddedSequence> batch);

/// Versioned binary checkpoint: magic "TCNW", dims, dropout rates, parameter
/// arrays in declared order (per-gate slices for the packed weights).
void save_checkpoint(const LstmNetwork& net, const std::filesystem::path& path);
LstmNetwork load_checkpoint(const std::filesystem::path& path);

} // namespace tcat
