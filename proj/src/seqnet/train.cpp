#include "tcat/seqnet.hpp"
#include "tcat/util/error.hpp"
#include "tcat/util/log.hpp"
#include "tcat/util/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace tcat {

bool EarlyStopper::observe(double val_loss) {
    ++epoch_;
    if (best_epoch_ < 0 || val_loss < best_loss_) {
        best_loss_ = val_loss;
        best_epoch_ = epoch_;
        stale_ = 0;
        return false;
    }
    ++stale_;
    return stale_ >= patience_;
}

std::string TrainingHistory::to_csv() const {
    std::string out = "epoch,train_loss,val_loss,val_accuracy\n";
    char line[128];
    for (std::size_t e = 0; e < train_loss.size(); ++e) {
        std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g\n", e, train_loss[e], val_loss[e],
                      val_accuracy[e]);
        out += line;
    }
    return out;
}

namespace {

DenseMat one_hot(std::span<const int> labels, std::size_t n_classes) {
    DenseMat t(labels.size(), n_classes);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        t.row(i)[static_cast<std::size_t>(labels[i])] = 1.0;
    }
    return t;
}

struct EvalResult {
    double loss = 0.0;
    double accuracy = 0.0;
};

EvalResult evaluate(const LstmNetwork& net, const std::vector<PaddedSequence>& sequences,
                    const std::vector<int>& labels, std::span<const std::size_t> subset,
                    std::size_t batch_size) {
    double loss_sum = 0.0;
    std::size_t correct = 0;
    std::vector<PaddedSequence> batch;
    std::vector<int> batch_labels;
    for (std::size_t start = 0; start < subset.size(); start += batch_size) {
        const std::size_t n = std::min(batch_size, subset.size() - start);
        batch.clear();
        batch_labels.clear();
        for (std::size_t i = 0; i < n; ++i) {
            batch.push_back(sequences[subset[start + i]]);
            batch_labels.push_back(labels[subset[start + i]]);
        }
        const ForwardResult fwd = forward(net, batch, false, 0);
        const DenseMat targets = one_hot(batch_labels, net.n_classes);
        loss_sum += cross_entropy(fwd.probs, targets) * static_cast<double>(n);
        for (std::size_t r = 0; r < n; ++r) {
            const auto p = fwd.probs.row(r);
            std::size_t best = 0;
            for (std::size_t c = 1; c < p.size(); ++c) {
                if (p[c] > p[best]) best = c;
            }
            if (static_cast<int>(best) == batch_labels[r]) ++correct;
        }
    }
    EvalResult r;
    r.loss = loss_sum / static_cast<double>(subset.size());
    r.accuracy = static_cast<double>(correct) / static_cast<double>(subset.size());
    return r;
}

std::vector<Tensor> snapshot_params(LstmNetwork& net) {
    std::vector<Tensor> out;
    for (auto& p : net.params()) out.push_back(*p.tensor);
    return out;
}

void restore_params(LstmNetwork& net, const std::vector<Tensor>& snapshot) {
    auto params = net.params();
    for (std::size_t i = 0; i < params.size(); ++i) *params[i].tensor = snapshot[i];
}

} // namespace

TrainingHistory train(LstmNetwork& net, const std::vector<PaddedSequence>& sequences,
                      const std::vector<int>& labels, const TrainConfig& config) {
    if (sequences.size() != labels.size()) {
        throw std::invalid_argument("train: sequence/label count mismatch");
    }
    if (!(config.validation_fraction > 0.0 && config.validation_fraction < 1.0)) {
        throw std::invalid_argument("train: validation_fraction must lie in (0,1)");
    }
    if (config.patience < 1) throw std::invalid_argument("train: patience must be >= 1");
    for (int label : labels) {
        if (label < 0 || static_cast<std::size_t>(label) >= net.n_classes) {
            throw std::invalid_argument("train: label out of range");
        }
    }

    Rng rng(config.seed);
    std::vector<std::size_t> order(sequences.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    const auto n_val = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(config.validation_fraction *
                                               static_cast<double>(sequences.size()))));
    if (n_val >= sequences.size()) throw TrainError("train: empty train partition");
    std::vector<std::size_t> val_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
    std::vector<std::size_t> train_idx(order.begin() + static_cast<std::ptrdiff_t>(n_val),
                                       order.end());

    TrainingHistory history;
    EarlyStopper stopper(config.patience);
    AdamState adam;
    std::vector<Tensor> best_params;

    std::vector<PaddedSequence> batch;
    std::vector<int> batch_labels;
    for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
        rng.shuffle(train_idx);
        double loss_sum = 0.0;
        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < train_idx.size();
             start += config.batch_size, ++batch_index) {
            const std::size_t n = std::min(config.batch_size, train_idx.size() - start);
            batch.clear();
            batch_labels.clear();
            for (std::size_t i = 0; i < n; ++i) {
                batch.push_back(sequences[train_idx[start + i]]);
                batch_labels.push_back(labels[train_idx[start + i]]);
            }
            const std::uint64_t mask_seed = mix64(mix64(config.seed, epoch), batch_index);
            const ForwardResult fwd = forward(net, batch, true, mask_seed);
            const DenseMat targets = one_hot(batch_labels, net.n_classes);
            const double loss = cross_entropy(fwd.probs, targets);
            if (!std::isfinite(loss)) throw TrainError("train: non-finite loss");
            loss_sum += loss * static_cast<double>(n);
            const LstmGradients grads = backward(net, fwd, targets);
            adam_step(net, grads, adam, config);
        }

        const double train_loss = loss_sum / static_cast<double>(train_idx.size());
        const EvalResult val = evaluate(net, sequences, labels, val_idx, config.batch_size);
        history.train_loss.push_back(train_loss);
        history.val_loss.push_back(val.loss);
        history.val_accuracy.push_back(val.accuracy);

        const bool stop = stopper.observe(val.loss);
        if (stopper.best_epoch() == static_cast<int>(epoch)) {
            best_params = snapshot_params(net);
        }
        log::debug("epoch " + std::to_string(epoch) + " train_loss " + std::to_string(train_loss) +
                   " val_loss " + std::to_string(val.loss) + " val_acc " +
                   std::to_string(val.accuracy));
        if (stop) break;
    }

    history.best_epoch = stopper.best_epoch();
    if (!best_params.empty()) restore_params(net, best_params);
    return history;
}

} // namespace tcat
