#include "tcat/seqnet.hpp"
#include "tcat/util/error.hpp"

#include <cstring>
#include <fstream>

namespace tcat {

namespace {

constexpr char kMagic[4] = {'T', 'C', 'N', 'W'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
void read_pod(std::ifstream& in, T& v) {
    in.read(reinterpret_cast<char*>(&v), sizeof v);
}

void write_array(std::ofstream& out, const double* data, std::size_t n) {
    write_pod(out, static_cast<std::uint64_t>(n));
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
}

void read_array(std::ifstream& in, double* data, std::size_t expected) {
    std::uint64_t n = 0;
    read_pod(in, n);
    if (n != expected) throw DataError("checkpoint: parameter size mismatch");
    in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
}

/// Writes one gate slice of a packed [rows, 4*hidden] weight as a
/// [rows, hidden] array.
void write_gate_slice(std::ofstream& out, const Tensor& packed, std::size_t rows,
                      std::size_t hidden, std::size_t gate) {
    std::vector<double> slice(rows * hidden);
    for (std::size_t r = 0; r < rows; ++r) {
        const double* src = packed.data() + r * 4 * hidden + gate * hidden;
        std::copy(src, src + hidden, slice.data() + r * hidden);
    }
    write_array(out, slice.data(), slice.size());
}

void read_gate_slice(std::ifstream& in, Tensor& packed, std::size_t rows, std::size_t hidden,
                     std::size_t gate) {
    std::vector<double> slice(rows * hidden);
    read_array(in, slice.data(), slice.size());
    for (std::size_t r = 0; r < rows; ++r) {
        std::copy(slice.data() + r * hidden, slice.data() + (r + 1) * hidden,
                  packed.data() + r * 4 * hidden + gate * hidden);
    }
}

} // namespace

// Parameter order: embedding, W_i..W_o, U_i..U_o, b_i..b_o, W_y, b_y.
void save_checkpoint(const LstmNetwork& net, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write checkpoint " + path.string());
    out.write(kMagic, sizeof kMagic);
    write_pod(out, kVersion);
    write_pod(out, static_cast<std::uint64_t>(net.vocab_size));
    write_pod(out, static_cast<std::uint64_t>(net.embed_dim));
    write_pod(out, static_cast<std::uint64_t>(net.hidden));
    write_pod(out, static_cast<std::uint64_t>(net.n_classes));
    write_pod(out, net.dropout_rate);
    write_pod(out, net.recurrent_dropout_rate);

    write_array(out, net.embedding.data(), net.embedding.size());
    for (std::size_t gate = 0; gate < 4; ++gate) {
        write_gate_slice(out, net.w_x, net.embed_dim, net.hidden, gate);
    }
    for (std::size_t gate = 0; gate < 4; ++gate) {
        write_gate_slice(out, net.w_h, net.hidden, net.hidden, gate);
    }
    for (std::size_t gate = 0; gate < 4; ++gate) {
        write_array(out, net.bias.data() + gate * net.hidden, net.hidden);
    }
    write_array(out, net.w_out.data(), net.w_out.size());
    write_array(out, net.b_out.data(), net.b_out.size());
    if (!out) throw DataError("failed writing checkpoint " + path.string());
}

LstmNetwork load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint " + path.string());
    char magic[4];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) {
        throw DataError("not a checkpoint file: " + path.string());
    }
    std::uint32_t version = 0;
    read_pod(in, version);
    if (version != kVersion) {
        throw DataError("unsupported checkpoint version " + std::to_string(version));
    }
    std::uint64_t vocab = 0, embed = 0, hidden = 0, classes = 0;
    read_pod(in, vocab);
    read_pod(in, embed);
    read_pod(in, hidden);
    read_pod(in, classes);
    double dropout = 0.0, rec_dropout = 0.0;
    read_pod(in, dropout);
    read_pod(in, rec_dropout);
    if (!in || vocab < 1 || embed < 1 || hidden < 1 || classes < 1) {
        throw DataError("corrupt checkpoint header " + path.string());
    }

    LstmNetwork net = init_network(vocab, embed, hidden, classes, 0, dropout, rec_dropout);
    read_array(in, net.embedding.data(), net.embedding.size());
    for (std::size_t gate = 0; gate < 4; ++gate) {
        read_gate_slice(in, net.w_x, net.embed_dim, net.hidden, gate);
    }
    for (std::size_t gate = 0; gate < 4; ++gate) {
        read_gate_slice(in, net.w_h, net.hidden, net.hidden, gate);
    }
    for (std::size_t gate = 0; gate < 4; ++gate) {
        read_array(in, net.bias.data() + gate * net.hidden, net.hidden);
    }
    read_array(in, net.w_out.data(), net.w_out.size());
    read_array(in, net.b_out.data(), net.b_out.size());
    if (!in) throw DataError("truncated checkpoint " + path.string());
    return net;
}

} // namespace tcat
