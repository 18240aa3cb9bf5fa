#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "anet/activation.hpp"
#include "anet/scalar.hpp"

namespace anet {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

namespace detail {

inline void check_matrix(const Matrix& m, Field f, const char* what)
{
    for (Eigen::Index i = 0; i < m.size(); ++i) check_scalar(m.data()[i], f, what);
}

inline void check_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const char* what)
{
    if (m.rows() != rows || m.cols() != cols)
        throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(rows) + "x" + std::to_string(cols) +
                                    ", got " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

inline Vector to_vector(std::span<const Scalar> z)
{
    Vector v(static_cast<Eigen::Index>(z.size()));
    for (std::size_t i = 0; i < z.size(); ++i) v[static_cast<Eigen::Index>(i)] = z[i];
    return v;
}

inline Vector apply_activation(const Activation& act, const Vector& v)
{
    Vector out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = eval_activation_unchecked(act, v[i]);
    return out;
}

inline void check_input(std::span<const Scalar> z, Eigen::Index dim, Field f, const char* who)
{
    if (static_cast<Eigen::Index>(z.size()) != dim) throw std::invalid_argument(std::string(who) + ": dimension mismatch");
    if (f == Field::Real)
        for (const auto& zi : z)
            if (zi.imag() != 0.0) throw std::invalid_argument(std::string(who) + ": complex input under the Real tag");
}

} // namespace detail

/// Residual block z ← z + A σ(W z + b).
struct ResBlock {
    Matrix A; ///< d₀ × D
    Matrix W; ///< D × d₀
    Vector b; ///< D

    [[nodiscard]] Eigen::Index width() const noexcept { return W.rows(); }
};

/// Residual network: z⁰ = A⁰z + b⁰, z^ℓ = z^{ℓ-1} + A^ℓσ(W^ℓz^{ℓ-1} + b^ℓ),
/// output A^L z^{L-1}. Matrices act on z directly (no conjugation).
class ResNet {
public:
    ResNet(Activation act, Matrix entry, Vector entry_bias, std::vector<ResBlock> blocks, Matrix exit)
        : act_(std::move(act)), entry_(std::move(entry)), entry_bias_(std::move(entry_bias)), blocks_(std::move(blocks)),
          exit_(std::move(exit))
    {
        const Eigen::Index d0 = entry_.rows();
        if (d0 < 1 || entry_.cols() < 1) throw std::invalid_argument("ResNet: empty entry layer");
        detail::check_shape(Matrix(entry_bias_), d0, 1, "ResNet entry bias");
        detail::check_shape(exit_, 1, d0, "ResNet exit row");
        const Field f = act_.field();
        detail::check_matrix(entry_, f, "ResNet entry weight");
        detail::check_matrix(entry_bias_, f, "ResNet entry bias");
        detail::check_matrix(exit_, f, "ResNet exit weight");
        for (const auto& blk : blocks_) {
            const Eigen::Index D = blk.W.rows();
            if (D < 1) throw std::invalid_argument("ResNet: block width must be at least 1");
            detail::check_shape(blk.A, d0, D, "ResNet block A");
            detail::check_shape(blk.W, D, d0, "ResNet block W");
            detail::check_shape(Matrix(blk.b), D, 1, "ResNet block bias");
            detail::check_matrix(blk.A, f, "ResNet block weight");
            detail::check_matrix(blk.W, f, "ResNet block weight");
            detail::check_matrix(blk.b, f, "ResNet block bias");
        }
    }

    [[nodiscard]] const Activation& activation() const noexcept { return act_; }
    [[nodiscard]] Field field() const noexcept { return act_.field(); }
    [[nodiscard]] std::size_t input_dim() const noexcept { return static_cast<std::size_t>(entry_.cols()); }
    [[nodiscard]] std::size_t inner_dim() const noexcept { return static_cast<std::size_t>(entry_.rows()); }
    [[nodiscard]] const Matrix& entry() const noexcept { return entry_; }
    [[nodiscard]] const Vector& entry_bias() const noexcept { return entry_bias_; }
    [[nodiscard]] const std::vector<ResBlock>& blocks() const noexcept { return blocks_; }
    [[nodiscard]] const Matrix& exit() const noexcept { return exit_; }
    [[nodiscard]] std::size_t max_block_width() const noexcept
    {
        Eigen::Index w = 0;
        for (const auto& b : blocks_) w = std::max(w, b.width());
        return static_cast<std::size_t>(w);
    }

private:
    Activation act_;
    Matrix entry_;
    Vector entry_bias_;
    std::vector<ResBlock> blocks_;
    Matrix exit_;
};

inline Vector resnet_state(const ResNet& net, std::span<const Scalar> z)
{
    detail::check_input(z, net.entry().cols(), net.field(), "eval_resnet");
    Vector s = net.entry() * detail::to_vector(z) + net.entry_bias();
    for (const auto& blk : net.blocks()) s += blk.A * detail::apply_activation(net.activation(), blk.W * s + blk.b);
    return s;
}

inline Scalar eval_resnet(const ResNet& net, std::span<const Scalar> z) { return (net.exit() * resnet_state(net, z))(0, 0); }

/// Affine layer z ↦ A z + b.
struct Layer {
    Matrix A;
    Vector b;
};

/// Fully connected network: σ after every layer except the last, which has
/// one output.
class MLP {
public:
    MLP(Activation act, std::vector<Layer> layers) : act_(std::move(act)), layers_(std::move(layers))
    {
        if (layers_.empty()) throw std::invalid_argument("MLP: need at least one layer");
        Eigen::Index prev = layers_.front().A.cols();
        if (prev < 1) throw std::invalid_argument("MLP: input dimension must be positive");
        for (const auto& l : layers_) {
            if (l.A.cols() != prev || l.A.rows() < 1 || l.b.size() != l.A.rows())
                throw std::invalid_argument("MLP: layer shapes do not chain");
            detail::check_matrix(l.A, act_.field(), "MLP weight");
            detail::check_matrix(l.b, act_.field(), "MLP bias");
            prev = l.A.rows();
        }
        if (prev != 1) throw std::invalid_argument("MLP: last layer must have one output");
    }

    [[nodiscard]] const Activation& activation() const noexcept { return act_; }
    [[nodiscard]] Field field() const noexcept { return act_.field(); }
    [[nodiscard]] const std::vector<Layer>& layers() const noexcept { return layers_; }
    [[nodiscard]] std::size_t input_dim() const noexcept { return static_cast<std::size_t>(layers_.front().A.cols()); }
    /// (d_0, d_1, …, d_L).
    [[nodiscard]] std::vector<std::size_t> widths() const
    {
        std::vector<std::size_t> w{input_dim()};
        for (const auto& l : layers_) w.push_back(static_cast<std::size_t>(l.A.rows()));
        return w;
    }

private:
    Activation act_;
    std::vector<Layer> layers_;
};

/// Post-activation states ẑ^0 = z, ẑ^1, …, ẑ^{L-1} followed by the output z^L.
inline std::vector<Vector> mlp_trace(const MLP& net, std::span<const Scalar> z)
{
    detail::check_input(z, static_cast<Eigen::Index>(net.input_dim()), net.field(), "eval_mlp");
    std::vector<Vector> states{detail::to_vector(z)};
    const auto& layers = net.layers();
    for (std::size_t i = 0; i < layers.size(); ++i) {
        Vector pre = layers[i].A * states.back() + layers[i].b;
        states.push_back(i + 1 == layers.size() ? pre : detail::apply_activation(net.activation(), pre));
    }
    return states;
}

inline Scalar eval_mlp(const MLP& net, std::span<const Scalar> z) { return mlp_trace(net, z).back()[0]; }

/// DenseNet: layer ℓ reads the concatenation (ẑ⁰; …; ẑ^{ℓ-1}) with ẑ⁰ = z the
/// raw input; σ after every layer except the last, which has one output.
class DenseNet {
public:
    DenseNet(Activation act, std::size_t input_dim, std::vector<Layer> layers)
        : act_(std::move(act)), input_dim_(input_dim), layers_(std::move(layers))
    {
        if (input_dim_ == 0 || layers_.empty()) throw std::invalid_argument("DenseNet: empty network");
        Eigen::Index n = static_cast<Eigen::Index>(input_dim_);
        for (const auto& l : layers_) {
            if (l.A.cols() != n || l.A.rows() < 1 || l.b.size() != l.A.rows())
                throw std::invalid_argument("DenseNet: layer " + std::to_string(&l - layers_.data() + 1) +
                                            " must read all " + std::to_string(n) + " previous states");
            detail::check_matrix(l.A, act_.field(), "DenseNet weight");
            detail::check_matrix(l.b, act_.field(), "DenseNet bias");
            n += l.A.rows();
        }
        if (layers_.back().A.rows() != 1) throw std::invalid_argument("DenseNet: last layer must have one output");
    }

    [[nodiscard]] const Activation& activation() const noexcept { return act_; }
    [[nodiscard]] Field field() const noexcept { return act_.field(); }
    [[nodiscard]] std::size_t input_dim() const noexcept { return input_dim_; }
    [[nodiscard]] const std::vector<Layer>& layers() const noexcept { return layers_; }
    /// (d_0, d_1, …, d_L).
    [[nodiscard]] std::vector<std::size_t> widths() const
    {
        std::vector<std::size_t> w{input_dim_};
        for (const auto& l : layers_) w.push_back(static_cast<std::size_t>(l.A.rows()));
        return w;
    }

private:
    Activation act_;
    std::size_t input_dim_;
    std::vector<Layer> layers_;
};

inline Scalar eval_densenet(const DenseNet& net, std::span<const Scalar> z)
{
    detail::check_input(z, static_cast<Eigen::Index>(net.input_dim()), net.field(), "eval_densenet");
    Vector state = detail::to_vector(z);
    const auto& layers = net.layers();
    for (std::size_t i = 0; i + 1 < layers.size(); ++i) {
        Vector next = detail::apply_activation(net.activation(), layers[i].A * state + layers[i].b);
        Vector grown(state.size() + next.size());
        grown << state, next;
        state = std::move(grown);
    }
    return (layers.back().A * state + layers.back().b)[0];
}

} // namespace anet
