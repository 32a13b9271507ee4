#include "tcat/kern/kernels.hpp"
#include "tcat/seqnet.hpp"
#include "tcat/util/error.hpp"
#include "tcat/util/rng.hpp"

#include <algorithm>
#include <cmath>

namespace tcat {

namespace {

// Gate slice order within the packed [*, 4*hidden] weights.
constexpr std::size_t kGateI = 0, kGateF = 1, kGateG = 2, kGateO = 3;

double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

/// y[0..cols) += x . W for row-major W[rows, cols].
void matvec_add(std::span<const double> x, const Tensor& w, std::size_t cols, double* y) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] != 0.0) kern::axpy(cols, x[i], w.data() + i * cols, y);
    }
}

/// out[i] = W.row(i) . d for row-major W[rows, cols].
void matvec_transpose(const Tensor& w, std::span<const double> d, std::size_t rows,
                      std::size_t cols, double* out) {
    for (std::size_t i = 0; i < rows; ++i) {
        out[i] = kern::dot(w.data() + i * cols, d.data(), cols);
    }
}

/// G[i, :] += x[i] * d for row-major G[rows, cols].
void outer_add(std::span<const double> x, std::span<const double> d, Tensor& g,
               std::size_t cols) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] != 0.0) kern::axpy(cols, x[i], d.data(), g.data() + i * cols);
    }
}

void softmax_row(std::span<double> logits) {
    double maxv = logits[0];
    for (double x : logits) maxv = std::max(maxv, x);
    double sum = 0.0;
    for (double& x : logits) {
        x = std::exp(x - maxv);
        sum += x;
    }
    for (double& x : logits) x /= sum;
}

void fill_dropout_mask(std::vector<double>& mask, std::size_t n, double rate, Rng& rng) {
    mask.resize(n);
    const double keep = 1.0 - rate;
    for (std::size_t i = 0; i < n; ++i) {
        mask[i] = rng.uniform() < keep ? 1.0 / keep : 0.0;
    }
}

} // namespace

Tensor Tensor::zeros(std::vector<std::size_t> shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    Tensor t;
    t.shape = std::move(shape);
    t.v.assign(n, 0.0);
    return t;
}

bool Tensor::all_finite() const {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

std::vector<LstmNetwork::ParamRef> LstmNetwork::params() {
    return {{"embedding", &embedding}, {"w_x", &w_x},     {"w_h", &w_h},
            {"bias", &bias},           {"w_out", &w_out}, {"b_out", &b_out}};
}

LstmGradients LstmGradients::zeros_like(const LstmNetwork& net) {
    LstmGradients g;
    g.embedding = Tensor::zeros(net.embedding.shape);
    g.w_x = Tensor::zeros(net.w_x.shape);
    g.w_h = Tensor::zeros(net.w_h.shape);
    g.bias = Tensor::zeros(net.bias.shape);
    g.w_out = Tensor::zeros(net.w_out.shape);
    g.b_out = Tensor::zeros(net.b_out.shape);
    return g;
}

std::vector<Tensor*> LstmGradients::tensors() {
    return {&embedding, &w_x, &w_h, &bias, &w_out, &b_out};
}

LstmNetwork init_network(std::size_t vocab_size, std::size_t embed_dim, std::size_t hidden,
                         std::size_t n_classes, std::uint64_t seed, double dropout_rate,
                         double recurrent_dropout_rate) {
    if (vocab_size < 1 || embed_dim < 1 || hidden < 1 || n_classes < 1) {
        throw std::invalid_argument("init_network: all dimensions must be >= 1");
    }
    if (dropout_rate < 0.0 || dropout_rate >= 1.0 || recurrent_dropout_rate < 0.0 ||
        recurrent_dropout_rate >= 1.0) {
        throw std::invalid_argument("init_network: dropout rates must lie in [0,1)");
    }

    LstmNetwork net;
    net.vocab_size = vocab_size;
    net.embed_dim = embed_dim;
    net.hidden = hidden;
    net.n_classes = n_classes;
    net.dropout_rate = dropout_rate;
    net.recurrent_dropout_rate = recurrent_dropout_rate;

    net.embedding = Tensor::zeros({vocab_size, embed_dim});
    net.w_x = Tensor::zeros({embed_dim, 4 * hidden});
    net.w_h = Tensor::zeros({hidden, 4 * hidden});
    net.bias = Tensor::zeros({4 * hidden});
    net.w_out = Tensor::zeros({hidden, n_classes});
    net.b_out = Tensor::zeros({n_classes});

    Rng rng(seed);
    auto glorot = [&rng](Tensor& t, std::size_t fan_in, std::size_t fan_out) {
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        for (double& x : t.v) x = rng.uniform(-limit, limit);
    };
    glorot(net.embedding, vocab_size, embed_dim);
    // each gate's logical matrix shares the [embed|hidden, hidden] fan pair
    glorot(net.w_x, embed_dim, hidden);
    glorot(net.w_h, hidden, hidden);
    glorot(net.w_out, hidden, n_classes);
    std::fill(net.bias.v.begin() + static_cast<std::ptrdiff_t>(kGateF * hidden),
              net.bias.v.begin() + static_cast<std::ptrdiff_t>((kGateF + 1) * hidden), 1.0);
    return net;
}

ForwardResult forward(const LstmNetwork& net, std::span<const PaddedSequence> batch,
                      bool train_mode, std::uint64_t mask_seed) {
    const std::size_t H = net.hidden;
    const std::size_t E = net.embed_dim;
    const std::size_t G = 4 * H;

    ForwardResult result;
    result.probs = DenseMat(batch.size(), net.n_classes);
    result.cache.resize(batch.size());

    std::vector<double> h(H), c(H), pre(G), x(E), h_in(H);
    for (std::size_t s = 0; s < batch.size(); ++s) {
        const PaddedSequence& seq = batch[s];
        SeqCache& cache = result.cache[s];

        const bool use_in_mask = train_mode && net.dropout_rate > 0.0;
        const bool use_rec_mask = train_mode && net.recurrent_dropout_rate > 0.0;
        if (use_in_mask || use_rec_mask) {
            Rng rng(mix64(mask_seed, s));
            // draw both masks from one stream, input mask first
            if (use_in_mask) fill_dropout_mask(cache.mask_x, E, net.dropout_rate, rng);
            if (use_rec_mask) fill_dropout_mask(cache.mask_h, H, net.recurrent_dropout_rate, rng);
        }

        std::fill(h.begin(), h.end(), 0.0);
        std::fill(c.begin(), c.end(), 0.0);

        for (std::uint32_t id : seq.ids) {
            if (id >= net.vocab_size) {
                throw std::invalid_argument("forward: token id out of range");
            }
            if (id == Vocabulary::kPadId) continue; // padding freezes state

            const double* emb = net.embedding.data() + static_cast<std::size_t>(id) * E;
            for (std::size_t i = 0; i < E; ++i) {
                x[i] = use_in_mask ? emb[i] * cache.mask_x[i] : emb[i];
            }
            for (std::size_t i = 0; i < H; ++i) {
                h_in[i] = use_rec_mask ? h[i] * cache.mask_h[i] : h[i];
            }

            std::copy(net.bias.v.begin(), net.bias.v.end(), pre.begin());
            matvec_add(x, net.w_x, G, pre.data());
            matvec_add(h_in, net.w_h, G, pre.data());

            cache.step_ids.push_back(id);
            cache.x.insert(cache.x.end(), x.begin(), x.end());
            cache.h_in.insert(cache.h_in.end(), h_in.begin(), h_in.end());
            cache.c_prev.insert(cache.c_prev.end(), c.begin(), c.end());

            const std::size_t base = cache.gates.size();
            cache.gates.resize(base + G);
            double* gate = cache.gates.data() + base;
            for (std::size_t i = 0; i < H; ++i) gate[kGateI * H + i] = sigmoid(pre[kGateI * H + i]);
            for (std::size_t i = 0; i < H; ++i) gate[kGateF * H + i] = sigmoid(pre[kGateF * H + i]);
            for (std::size_t i = 0; i < H; ++i) gate[kGateG * H + i] = std::tanh(pre[kGateG * H + i]);
            for (std::size_t i = 0; i < H; ++i) gate[kGateO * H + i] = sigmoid(pre[kGateO * H + i]);

            const std::size_t tc_base = cache.tanh_c.size();
            cache.tanh_c.resize(tc_base + H);
            for (std::size_t i = 0; i < H; ++i) {
                c[i] = gate[kGateF * H + i] * c[i] + gate[kGateI * H + i] * gate[kGateG * H + i];
                const double tc = std::tanh(c[i]);
                cache.tanh_c[tc_base + i] = tc;
                h[i] = gate[kGateO * H + i] * tc;
            }
        }

        cache.h_final.assign(h.begin(), h.end());

        auto probs = result.probs.row(s);
        std::copy(net.b_out.v.begin(), net.b_out.v.end(), probs.begin());
        matvec_add(h, net.w_out, net.n_classes, probs.data());
        softmax_row(probs);
    }
    return result;
}

double cross_entropy(const DenseMat& probs, const DenseMat& targets) {
    if (probs.rows != targets.rows || probs.cols != targets.cols) {
        throw std::invalid_argument("cross_entropy: shape mismatch");
    }
    if (probs.rows == 0) throw std::invalid_argument("cross_entropy: empty batch");
    double loss = 0.0;
    for (std::size_t r = 0; r < probs.rows; ++r) {
        const auto p = probs.row(r);
        const auto t = targets.row(r);
        double sum = 0.0;
        for (double x : p) sum += x;
        if (std::abs(sum - 1.0) > 1e-6) {
            throw std::invalid_argument("cross_entropy: probability row does not sum to 1");
        }
        for (std::size_t c = 0; c < probs.cols; ++c) {
            if (t[c] != 0.0) {
                loss -= t[c] * std::log(std::clamp(p[c], 1e-12, 1.0));
            }
        }
    }
    return loss / static_cast<double>(probs.rows);
}

LstmGradients backward(const LstmNetwork& net, const ForwardResult& fwd, const DenseMat& targets) {
    const std::size_t H = net.hidden;
    const std::size_t E = net.embed_dim;
    const std::size_t G = 4 * H;
    const std::size_t C = net.n_classes;
    if (fwd.probs.rows != targets.rows || fwd.probs.cols != targets.cols ||
        fwd.probs.rows != fwd.cache.size()) {
        throw std::invalid_argument("backward: cache/target mismatch");
    }
    const double inv_batch = 1.0 / static_cast<double>(fwd.probs.rows);

    LstmGradients grads = LstmGradients::zeros_like(net);
    std::vector<double> dlogits(C), dh(H), dc(H), dpre(G), dx(E), dh_prev(H);

    for (std::size_t s = 0; s < fwd.cache.size(); ++s) {
        const SeqCache& cache = fwd.cache[s];
        const auto p = fwd.probs.row(s);
        const auto t = targets.row(s);

        // softmax + cross-entropy adjoint, scaled for the batch mean
        for (std::size_t i = 0; i < C; ++i) dlogits[i] = (p[i] - t[i]) * inv_batch;

        kern::axpy(C, 1.0, dlogits.data(), grads.b_out.data());
        outer_add(cache.h_final, dlogits, grads.w_out, C);
        matvec_transpose(net.w_out, dlogits, H, C, dh.data());
        std::fill(dc.begin(), dc.end(), 0.0);

        for (std::size_t step = cache.step_ids.size(); step-- > 0;) {
            const double* gate = cache.gates.data() + step * G;
            const double* tanh_c = cache.tanh_c.data() + step * H;
            const double* c_prev = cache.c_prev.data() + step * H;
            const double* x = cache.x.data() + step * E;
            const double* h_in = cache.h_in.data() + step * H;

            for (std::size_t i = 0; i < H; ++i) {
                const double gi = gate[kGateI * H + i];
                const double gf = gate[kGateF * H + i];
                const double gg = gate[kGateG * H + i];
                const double go = gate[kGateO * H + i];
                const double tc = tanh_c[i];

                const double do_ = dh[i] * tc;
                dc[i] += dh[i] * go * (1.0 - tc * tc);
                const double di = dc[i] * gg;
                const double df = dc[i] * c_prev[i];
                const double dg = dc[i] * gi;

                dpre[kGateI * H + i] = di * gi * (1.0 - gi);
                dpre[kGateF * H + i] = df * gf * (1.0 - gf);
                dpre[kGateG * H + i] = dg * (1.0 - gg * gg);
                dpre[kGateO * H + i] = do_ * go * (1.0 - go);

                dc[i] *= gf; // carry to the previous step
            }

            kern::axpy(G, 1.0, dpre.data(), grads.bias.data());
            outer_add({x, E}, dpre, grads.w_x, G);
            outer_add({h_in, H}, dpre, grads.w_h, G);
            matvec_transpose(net.w_x, dpre, E, G, dx.data());
            matvec_transpose(net.w_h, dpre, H, G, dh_prev.data());

            if (!cache.mask_h.empty()) {
                for (std::size_t i = 0; i < H; ++i) dh_prev[i] *= cache.mask_h[i];
            }
            std::swap(dh, dh_prev);

            if (!cache.mask_x.empty()) {
                for (std::size_t i = 0; i < E; ++i) dx[i] *= cache.mask_x[i];
            }
            const std::size_t id = cache.step_ids[step];
            kern::axpy(E, 1.0, dx.data(), grads.embedding.data() + id * E);
        }
    }
    return grads;
}

void adam_step(LstmNetwork& net, const LstmGradients& grads, AdamState& state,
               const TrainConfig& config) {
    auto params = net.params();
    const LstmGradients& g = grads;
    const std::vector<const Tensor*> gts{&g.embedding, &g.w_x, &g.w_h,
                                         &g.bias,      &g.w_out, &g.b_out};
    if (state.m.empty()) {
        for (auto& p : params) {
            state.m.push_back(Tensor::zeros(p.tensor->shape));
            state.v.push_back(Tensor::zeros(p.tensor->shape));
        }
    }
    state.t += 1;
    state.beta1_pow *= config.beta1;
    state.beta2_pow *= config.beta2;
    const double corr1 = 1.0 - state.beta1_pow;
    const double corr2 = 1.0 - state.beta2_pow;
    for (std::size_t i = 0; i < params.size(); ++i) {
        Tensor& p = *params[i].tensor;
        const Tensor& gr = *gts[i];
        if (p.size() != gr.size() || p.size() != state.m[i].size()) {
            throw std::invalid_argument("adam_step: shape mismatch");
        }
        kern::adam_update(p.size(), p.data(), state.m[i].data(), state.v[i].data(), gr.data(),
                          config.learning_rate, config.beta1, config.beta2, config.epsilon, corr1,
                          corr2);
    }
}

std::vector<int> predict_classes(const LstmNetwork& net, std::span<const PaddedSequence> batch) {
    std::vector<int> out;
    out.reserve(batch.size());
    constexpr std::size_t kChunk = 64;
    for (std::size_t start = 0; start < batch.size(); start += kChunk) {
        const std::size_t n = std::min(kChunk, batch.size() - start);
        const ForwardResult fwd = forward(net, batch.subspan(start, n), false, 0);
        for (std::size_t r = 0; r < n; ++r) {
            const auto p = fwd.probs.row(r);
            int best = 0;
            for (std::size_t c = 1; c < p.size(); ++c) {
                if (p[c] > p[best]) best = static_cast<int>(c);
            }
            out.push_back(best);
        }
    }
    return out;
}

} // namespace tcat
