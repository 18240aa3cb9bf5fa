#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Eigenvalues>

#include "anet/deep.hpp"
#include "anet/networks.hpp"
#include "anet/shallow.hpp"

namespace anet {

/// x ↦ ⟨w, x⟩ + b on ℝ^d.
struct AffinePiece {
    std::vector<double> w;
    double b = 0.0;

    [[nodiscard]] double operator()(std::span<const double> x) const
    {
        double acc = b;
        for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * x[i];
        return acc;
    }
};

/// max{0, piece_1(x), …, piece_L(x)}.
inline double max_affine(std::span<const AffinePiece> pieces, std::span<const double> x)
{
    double m = 0.0;
    for (const auto& p : pieces) m = std::max(m, p(x));
    return m;
}

/// f, f', f'' on [a, b].
struct C2FunctionSpec {
    std::function<double(double)> f, df, d2f;
    double a = 0.0, b = 1.0;
};

/// f(x) = f(a)ReLU(1) + f'(a)ReLU(x-a) + ∫_a^b f''(t)ReLU(x-t)dt on [a, b], with
/// the integral replaced by the left-endpoint Riemann sum on T cells. T+2
/// neurons; error O(1/T).
inline ShallowNet shallow_from_c2(const C2FunctionSpec& spec, unsigned T)
{
    if (T < 1) throw std::invalid_argument("shallow_from_c2: need at least one Riemann node");
    if (!(spec.a < spec.b)) throw std::invalid_argument("shallow_from_c2: interval must be nondegenerate");
    ShallowNet net(1, Activation::relu());
    net.add({spec.f(spec.a), {0.0}, 1.0});
    net.add({spec.df(spec.a), {1.0}, -spec.a});
    const double dt = (spec.b - spec.a) / T;
    for (unsigned j = 0; j < T; ++j) {
        const double t = spec.a + j * dt;
        net.add({spec.d2f(t) * dt, {1.0}, -t});
    }
    return net;
}

namespace detail {

inline void check_pieces(std::span<const AffinePiece> pieces, std::size_t d, const char* who)
{
    for (const auto& p : pieces) {
        if (p.w.size() != d) throw std::invalid_argument(std::string(who) + ": pieces must share one dimension");
        if (!std::isfinite(p.b) || !std::all_of(p.w.begin(), p.w.end(), [](double v) { return std::isfinite(v); }))
            throw std::invalid_argument(std::string(who) + ": non-finite piece");
    }
}

} // namespace detail

/// ReLU ResNet of inner width d+1 computing max{0, pieces…}: state (g; x), and
/// block ℓ performs g ← g + σ(⟨w_ℓ,x⟩ + b_ℓ - g) = max{g, ⟨w_ℓ,x⟩ + b_ℓ}.
inline ResNet resnet_max_affine(std::span<const AffinePiece> pieces)
{
    if (pieces.empty()) throw std::invalid_argument("resnet_max_affine: need at least one piece");
    const std::size_t d = pieces[0].w.size();
    if (d == 0) throw std::invalid_argument("resnet_max_affine: pieces need a positive dimension");
    detail::check_pieces(pieces, d, "resnet_max_affine");
    const Eigen::Index d0 = detail::idx(d + 1);
    Matrix entry = Matrix::Zero(d0, detail::idx(d));
    entry.bottomRows(detail::idx(d)).setIdentity();
    std::vector<ResBlock> blocks;
    for (const auto& p : pieces) {
        ResBlock b{Matrix::Zero(d0, 1), Matrix::Zero(1, d0), Vector::Zero(1)};
        b.W(0, 0) = -1.0;
        for (std::size_t i = 0; i < d; ++i) b.W(0, detail::idx(i + 1)) = p.w[i];
        b.b[0] = p.b;
        b.A(0, 0) = 1.0;
        blocks.push_back(std::move(b));
    }
    Matrix exit = Matrix::Zero(1, d0);
    exit(0, 0) = 1.0;
    return ResNet(Activation::relu(), std::move(entry), Vector::Zero(d0), std::move(blocks), std::move(exit));
}

/// ReLU ResNet of inner width d+2 computing max-affine(f1) - max-affine(f2):
/// state (g₁; g₂; x), width-2 blocks update both maxima at once, exit row
/// (1, -1, 0, …). The shorter list repeats its last piece, which leaves its
/// maximum unchanged.
inline ResNet resnet_dc(std::span<const AffinePiece> f1, std::span<const AffinePiece> f2)
{
    if (f1.empty() || f2.empty()) throw std::invalid_argument("resnet_dc: both piece lists must be nonempty");
    const std::size_t d = f1[0].w.size();
    if (d == 0) throw std::invalid_argument("resnet_dc: pieces need a positive dimension");
    detail::check_pieces(f1, d, "resnet_dc");
    detail::check_pieces(f2, d, "resnet_dc");
    const Eigen::Index d0 = detail::idx(d + 2);
    Matrix entry = Matrix::Zero(d0, detail::idx(d));
    entry.bottomRows(detail::idx(d)).setIdentity();
    std::vector<ResBlock> blocks;
    const std::size_t depth = std::max(f1.size(), f2.size());
    for (std::size_t l = 0; l < depth; ++l) {
        ResBlock b{Matrix::Zero(d0, 2), Matrix::Zero(2, d0), Vector::Zero(2)};
        const AffinePiece* pieces[2] = {&f1[std::min(l, f1.size() - 1)], &f2[std::min(l, f2.size() - 1)]};
        for (Eigen::Index r = 0; r < 2; ++r) {
            b.W(r, r) = -1.0;
            for (std::size_t i = 0; i < d; ++i) b.W(r, detail::idx(i + 2)) = pieces[r]->w[i];
            b.b[r] = pieces[r]->b;
            b.A(r, r) = 1.0;
        }
        blocks.push_back(std::move(b));
    }
    Matrix exit = Matrix::Zero(1, d0);
    exit(0, 0) = 1.0;
    exit(0, 1) = -1.0;
    return ResNet(Activation::relu(), std::move(entry), Vector::Zero(d0), std::move(blocks), std::move(exit));
}

/// g = f₁ - f₂ with f₁ = g + (λ/2)|x|² + c and f₂ = (λ/2)|x|² + c.
struct DcPair {
    RealFunction f1, f2;
};

inline DcPair dc_decompose(RealFunction g, double lambda, double c)
{
    if (!(lambda > 0.0)) throw std::invalid_argument("dc_decompose: lambda must be positive");
    auto quad = [lambda, c](std::span<const double> x) {
        double s = 0.0;
        for (double v : x) s += v * v;
        return 0.5 * lambda * s + c;
    };
    return {[g = std::move(g), quad](std::span<const double> x) { return g(x) + quad(x); }, quad};
}

/// Smallest eigenvalue of the central-difference Hessian of f over the sample
/// points; a diagnostic for the convexity of a dc_decompose part.
inline double min_hessian_eigenvalue_fd(const RealFunction& f, std::span<const std::vector<double>> points, double h)
{
    double lowest = std::numeric_limits<double>::infinity();
    for (const auto& x0 : points) {
        const std::size_t d = x0.size();
        Eigen::MatrixXd H(detail::idx(d), detail::idx(d));
        std::vector<double> x = x0;
        auto at = [&](std::size_t i, double di, std::size_t j, double dj) {
            x = x0;
            x[i] += di;
            x[j] += dj;
            return f(x);
        };
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i; j < d; ++j) {
                const double v = (at(i, h, j, h) - at(i, h, j, -h) - at(i, -h, j, h) + at(i, -h, j, -h)) / (4 * h * h);
                H(detail::idx(i), detail::idx(j)) = H(detail::idx(j), detail::idx(i)) = v;
            }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
        lowest = std::min(lowest, es.eigenvalues().minCoeff());
    }
    return lowest;
}

namespace detail {

/// Stage bookkeeping for log_depth_max: for c lane values, the hidden neurons
/// of one stage (as rows over the c values) and the readout from those neurons
/// to the ⌈c/2⌉ pairwise maxima. Pairs (a, b) use ReLU(a), ReLU(-a),
/// ReLU(b-a); an odd last lane uses ReLU(y), ReLU(-y).
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> max_stage(Eigen::Index c)
{
    const Eigen::Index pairs = c / 2, odd = c % 2;
    const Eigen::Index neurons = 3 * pairs + 2 * odd, out = pairs + odd;
    Eigen::MatrixXd in = Eigen::MatrixXd::Zero(neurons, c);
    Eigen::MatrixXd read = Eigen::MatrixXd::Zero(out, neurons);
    for (Eigen::Index p = 0; p < pairs; ++p) {
        const Eigen::Index a = 2 * p, b = 2 * p + 1, r = 3 * p;
        in(r, a) = 1.0;
        in(r + 1, a) = -1.0;
        in(r + 2, b) = 1.0;
        in(r + 2, a) = -1.0;
        read(p, r) = 1.0;
        read(p, r + 1) = -1.0;
        read(p, r + 2) = 1.0;
    }
    if (odd) {
        const Eigen::Index r = 3 * pairs;
        in(r, c - 1) = 1.0;
        in(r + 1, c - 1) = -1.0;
        read(pairs, r) = 1.0;
        read(pairs, r + 1) = -1.0;
    }
    return {in, read};
}

inline Matrix complexify(const Eigen::MatrixXd& m) { return m.cast<Scalar>(); }

} // namespace detail

/// Number of pairwise-max stages for k inputs: ⌈log₂ k⌉.
inline unsigned max_stage_count(std::size_t k)
{
    unsigned s = 0;
    for (std::size_t c = k; c > 1; c = (c + 1) / 2) ++s;
    return s;
}

/// Readout matrices R_s mapping the hidden activations of stage s to the
/// lane values after that stage (each lane = max of its group of 2^s inputs).
inline std::vector<Eigen::MatrixXd> log_depth_max_readouts(std::size_t k)
{
    std::vector<Eigen::MatrixXd> out;
    for (Eigen::Index c = detail::idx(k); c > 1; c = (c + 1) / 2) out.push_back(detail::max_stage(c).second);
    return out;
}

/// ReLU MLP returning max(y_1, …, y_k) exactly with ⌈log₂ k⌉ hidden layers,
/// one per pairwise-max stage. Each hidden layer's weights compose the
/// previous stage's readout with the current stage's neuron map.
inline MLP log_depth_max(std::size_t k)
{
    if (k == 0) throw std::invalid_argument("log_depth_max: need at least one input");
    std::vector<Layer> layers;
    Eigen::MatrixXd readout = Eigen::MatrixXd::Identity(detail::idx(k), detail::idx(k));
    for (Eigen::Index c = detail::idx(k); c > 1; c = (c + 1) / 2) {
        auto [in, read] = detail::max_stage(c);
        const Eigen::MatrixXd A = in * readout;
        layers.push_back({detail::complexify(A), Vector::Zero(A.rows())});
        readout = read;
    }
    layers.push_back({detail::complexify(readout), Vector::Zero(1)});
    return MLP(Activation::relu(), std::move(layers));
}

/// Exact ReLU MLP for a ReLU shallow network on a box, widths d_ℓ = d+2+m_ℓ.
/// Lanes: (positive partial sum I⁺; negated negative partial sum I⁻; the m_ℓ
/// neurons of block ℓ; shifted input x + β ≥ 1 on the box). Both partial sums
/// and the shifted input are non-negative, so ReLU passes them unchanged.
inline MLP mlp_exact_from_shallow_relu(const ShallowNet& s, std::span<const double> lower, std::span<const double> upper,
                                       std::span<const std::size_t> widths)
{
    if (s.activation().family() != Family::ReLU)
        throw std::invalid_argument("mlp_exact_from_shallow_relu: source network must use ReLU");
    detail::check_partition(widths, s.size(), "mlp_exact_from_shallow_relu");
    const std::size_t d = s.dim();
    if (lower.size() != d || upper.size() != d) throw std::invalid_argument("mlp_exact_from_shallow_relu: box dimension mismatch");
    for (std::size_t i = 0; i < d; ++i)
        if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]) || !(lower[i] < upper[i]))
            throw std::invalid_argument("mlp_exact_from_shallow_relu: box must be bounded with lower < upper");
    const Eigen::Index D = detail::idx(d);
    Vector shift(D);
    for (std::size_t i = 0; i < d; ++i) shift[detail::idx(i)] = -lower[i] + 1.0;

    std::vector<Layer> layers;
    std::size_t offset = 0;
    auto unit_rows = [&](Layer& L, std::size_t count, bool from_shift) {
        for (std::size_t j = 0; j < count; ++j) {
            const auto& n = s.neurons()[offset + j];
            const Eigen::Index r = 2 + detail::idx(j);
            Scalar bias = n.b;
            for (std::size_t i = 0; i < d; ++i) {
                L.A(r, L.A.cols() - D + detail::idx(i)) = n.w[i];
                if (from_shift) bias -= n.w[i] * shift[detail::idx(i)];
            }
            L.b[r] = bias;
        }
    };
    {
        const Eigen::Index rows = 2 + detail::idx(widths[0]) + D;
        Layer L{Matrix::Zero(rows, D), Vector::Zero(rows)};
        unit_rows(L, widths[0], false);
        L.A.bottomRows(D).setIdentity();
        L.b.tail(D) = shift;
        layers.push_back(std::move(L));
    }
    for (std::size_t ell = 0; ell < widths.size(); ++ell) {
        const std::size_t m = widths[ell];
        const bool last = ell + 1 == widths.size();
        const Eigen::Index cols = 2 + detail::idx(m) + D;
        const Eigen::Index rows = last ? 1 : 2 + detail::idx(widths[ell + 1]) + D;
        Layer L{Matrix::Zero(rows, cols), Vector::Zero(rows)};
        if (last) {
            L.A(0, 0) = 1.0;
            L.A(0, 1) = -1.0;
            for (std::size_t j = 0; j < m; ++j) L.A(0, 2 + detail::idx(j)) = s.neurons()[offset + j].a;
        } else {
            L.A(0, 0) = 1.0;
            L.A(1, 1) = 1.0;
            for (std::size_t j = 0; j < m; ++j) {
                const Scalar a = s.neurons()[offset + j].a;
                if (a.real() >= 0.0) L.A(0, 2 + detail::idx(j)) = a;
                else L.A(1, 2 + detail::idx(j)) = -a;
            }
        }
        offset += m;
        if (!last) {
            unit_rows(L, widths[ell + 1], true);
            L.A.bottomRightCorner(D, D).setIdentity();
        }
        layers.push_back(std::move(L));
    }
    return MLP(Activation::relu(), std::move(layers));
}

} // namespace anet
