#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "anet/finite_difference.hpp"
#include "anet/mpoly.hpp"

namespace anet {

/// k×d matrix with P·Pᵀ = I_k (an orthogonal projection ℝ^d → ℝ^k).
class OrthProjection {
public:
    explicit OrthProjection(Eigen::MatrixXd P) : P_(std::move(P))
    {
        if (P_.rows() < 1 || P_.rows() > P_.cols()) throw std::invalid_argument("OrthProjection: need 1 <= k <= d");
        const Eigen::MatrixXd gram = P_ * P_.transpose();
        const double err = (gram - Eigen::MatrixXd::Identity(P_.rows(), P_.rows())).cwiseAbs().maxCoeff();
        if (!(err <= 1e-12)) throw std::invalid_argument("OrthProjection: P·P^T differs from the identity");
    }

    /// First k coordinates of ℝ^d.
    static OrthProjection coordinate(std::size_t k, std::size_t d)
    {
        Eigen::MatrixXd P = Eigen::MatrixXd::Zero(Eigen::Index(k), Eigen::Index(d));
        P.leftCols(Eigen::Index(k)).setIdentity();
        return OrthProjection(std::move(P));
    }

    [[nodiscard]] const Eigen::MatrixXd& matrix() const noexcept { return P_; }
    [[nodiscard]] std::size_t k() const noexcept { return std::size_t(P_.rows()); }
    [[nodiscard]] std::size_t d() const noexcept { return std::size_t(P_.cols()); }

private:
    Eigen::MatrixXd P_;
};

/// Seeded random rotation: Gaussian matrix, QR, column signs fixed so R has a
/// positive diagonal, then one column flipped if needed for det = +1.
template <class Rng>
Eigen::MatrixXd random_rotation(std::size_t d, Rng& rng)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd G(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < G.size(); ++i) G.data()[i] = normal(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
    Eigen::MatrixXd Q = qr.householderQ();
    const Eigen::MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < Q.cols(); ++i)
        if (R(i, i) < 0) Q.col(i) *= -1.0;
    if (Q.determinant() < 0) Q.col(0) *= -1.0;
    return Q;
}

template <class Rng>
OrthProjection random_projection(std::size_t k, std::size_t d, Rng& rng)
{
    return OrthProjection(random_rotation(d, rng).topRows(Eigen::Index(k)));
}

/// Activation σ: ℝ^k → ℝ for harmonic networks. `poly` holds the polynomial
/// form when there is one.
struct HarmonicActivation {
    std::string name;
    std::size_t k = 2;
    RealFunction eval;
    std::optional<MPoly> poly;

    static HarmonicActivation from_poly(MPoly p, std::string name = "poly")
    {
        if (p.field() != Field::Real) throw std::invalid_argument("HarmonicActivation: polynomial must be real");
        const std::size_t k = p.dim();
        auto eval = [p](std::span<const double> u) {
            ScalarVec z(u.begin(), u.end());
            return eval_mpoly(p, z).real();
        };
        return {std::move(name), k, std::move(eval), std::move(p)};
    }

    /// u² - v².
    static HarmonicActivation quadratic()
    {
        MPoly p(2, Field::Real);
        p.add_term({2, 0}, 1.0).add_term({0, 2}, -1.0);
        return from_poly(std::move(p), "quadratic");
    }
    /// u³ - 3uv² = Re (u+iv)³.
    static HarmonicActivation cubic()
    {
        MPoly p(2, Field::Real);
        p.add_term({3, 0}, 1.0).add_term({1, 2}, -3.0);
        return from_poly(std::move(p), "cubic");
    }
    /// e^u cos v = Re e^{u+iv}.
    static HarmonicActivation expcos()
    {
        return {"expcos", 2, [](std::span<const double> u) { return std::exp(u[0]) * std::cos(u[1]); }, std::nullopt};
    }
    /// u², which is not harmonic (Δ = 2); a negative control.
    static HarmonicActivation square_u()
    {
        MPoly p(2, Field::Real);
        p.add_term({2, 0}, 1.0);
        return from_poly(std::move(p), "square_u");
    }

    static HarmonicActivation by_name(std::string_view name)
    {
        if (name == "quadratic") return quadratic();
        if (name == "cubic") return cubic();
        if (name == "expcos") return expcos();
        if (name == "square_u") return square_u();
        throw std::invalid_argument("unknown harmonic activation '" + std::string(name) + "'");
    }
};

/// One term a·σ(ρPx + b).
struct HarmonicTerm {
    double a = 1.0;
    double rho = 1.0;
    OrthProjection P;
    std::vector<double> b;
};

/// Σ_i a_i σ(ρ_i P_i x + b_i). When σ has a polynomial form it must be
/// harmonic unless the network was built with `unchecked`.
class HarmonicNet {
public:
    HarmonicNet(HarmonicActivation act, std::size_t dim, std::vector<HarmonicTerm> terms)
        : HarmonicNet(std::move(act), dim, std::move(terms), true)
    {
    }

    /// Skips the harmonicity check; for negative controls.
    static HarmonicNet unchecked(HarmonicActivation act, std::size_t dim, std::vector<HarmonicTerm> terms)
    {
        return HarmonicNet(std::move(act), dim, std::move(terms), false);
    }

    [[nodiscard]] const HarmonicActivation& activation() const noexcept { return act_; }
    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t k() const noexcept { return act_.k; }
    [[nodiscard]] const std::vector<HarmonicTerm>& terms() const noexcept { return terms_; }

private:
    HarmonicNet(HarmonicActivation act, std::size_t dim, std::vector<HarmonicTerm> terms, bool check)
        : act_(std::move(act)), dim_(dim), terms_(std::move(terms))
    {
        if (dim_ < act_.k) throw std::invalid_argument("HarmonicNet: need d >= k");
        if (check && act_.poly && !symbolic_laplacian(*act_.poly).is_zero())
            throw std::invalid_argument("HarmonicNet: activation polynomial is not harmonic");
        for (const auto& t : terms_) {
            if (t.P.k() != act_.k || t.P.d() != dim_) throw std::invalid_argument("HarmonicNet: projection shape mismatch");
            if (t.b.size() != act_.k) throw std::invalid_argument("HarmonicNet: bias length must equal k");
            if (!std::isfinite(t.a) || !std::isfinite(t.rho)) throw std::invalid_argument("HarmonicNet: non-finite weight");
        }
    }

    HarmonicActivation act_;
    std::size_t dim_;
    std::vector<HarmonicTerm> terms_;
};

inline double eval_harmonic_net(const HarmonicNet& net, std::span<const double> x)
{
    if (x.size() != net.dim()) throw std::invalid_argument("eval_harmonic_net: dimension mismatch");
    const Eigen::Map<const Eigen::VectorXd> xv(x.data(), Eigen::Index(x.size()));
    double acc = 0.0;
    std::vector<double> u(net.k());
    for (const auto& t : net.terms()) {
        const Eigen::VectorXd px = t.P.matrix() * xv;
        for (std::size_t l = 0; l < u.size(); ++l) u[l] = t.rho * px[Eigen::Index(l)] + t.b[l];
        acc += t.a * net.activation().eval(u);
    }
    return acc;
}

inline std::size_t param_count(const HarmonicNet& net)
{
    return net.terms().size() * (2 + net.k() * net.dim() + net.k());
}

/// max over the sample points of |Δ_h f| for the network's FD Laplacian.
inline double verify_network_harmonic(const HarmonicNet& net, std::span<const std::vector<double>> points, double h)
{
    const RealFunction f = [&net](std::span<const double> x) { return eval_harmonic_net(net, x); };
    double m = 0.0;
    for (const auto& x : points) m = std::max(m, std::abs(laplacian_fd(f, x, h)));
    return m;
}

/// Gegenbauer C_n^λ(t): C₀ = 1, C₁ = 2λt, nC_n = 2(n+λ-1)tC_{n-1} - (n+2λ-2)C_{n-2}.
inline double gegenbauer(unsigned n, double lambda, double t)
{
    if (!(lambda > 0.0)) throw std::invalid_argument("gegenbauer: lambda must be positive");
    if (n == 0) return 1.0;
    double prev = 1.0, cur = 2.0 * lambda * t;
    for (unsigned k = 2; k <= n; ++k) {
        const double next = (2.0 * (k + lambda - 1.0) * t * cur - (k + 2.0 * lambda - 2.0) * prev) / k;
        prev = cur;
        cur = next;
    }
    return cur;
}

inline double gegenbauer_lambda(std::size_t d)
{
    if (d < 3) throw std::invalid_argument("Gegenbauer parameter (d-2)/2 must be positive: need d >= 3");
    return (double(d) - 2.0) / 2.0;
}

/// Homogeneous extension |x|^n C_n^λ(⟨x/|x|, y⟩) of the zonal harmonic with
/// pole y, λ = (d-2)/2.
inline double zonal_harmonic(unsigned n, std::size_t d, std::span<const double> y, std::span<const double> x)
{
    if (y.size() != d || x.size() != d) throw std::invalid_argument("zonal_harmonic: dimension mismatch");
    const double lambda = gegenbauer_lambda(d);
    double ny = 0.0, nx = 0.0, dot = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        ny += y[i] * y[i];
        nx += x[i] * x[i];
        dot += x[i] * y[i];
    }
    if (std::abs(std::sqrt(ny) - 1.0) > 1e-12) throw std::invalid_argument("zonal_harmonic: pole must be a unit vector");
    if (n == 0) return 1.0;
    if (nx == 0.0) return 0.0;
    const double r = std::sqrt(nx);
    return std::pow(r, double(n)) * gegenbauer(n, lambda, dot / r);
}

/// dim 𝓗𝓟^d_j = C(j+d-1, d-1) - C(j+d-3, d-1).
inline std::size_t hp_dimension(std::size_t d, unsigned j)
{
    const double all = binomial(unsigned(j + d - 1), unsigned(d - 1));
    const double lower = j >= 2 ? binomial(unsigned(j + d - 3), unsigned(d - 1)) : 0.0;
    return std::size_t(all - lower);
}

namespace detail {

struct HarmonicKernel {
    std::vector<MultiIndex> monomials; ///< degree-j monomials (columns)
    std::vector<std::size_t> free_columns;
    std::vector<MPoly> basis; ///< basis[k] has coefficient 1 at free_columns[k], 0 at the other free columns
};

inline HarmonicKernel harmonic_kernel(std::size_t d, unsigned j)
{
    if (d == 0) throw std::invalid_argument("hp_basis: dimension must be positive");
    HarmonicKernel out;
    out.monomials = monomials_of_degree(d, j);
    const std::size_t n = out.monomials.size();
    if (j < 2) {
        for (std::size_t c = 0; c < n; ++c) {
            out.free_columns.push_back(c);
            out.basis.push_back(MPoly::monomial(Field::Real, out.monomials[c]));
        }
        return out;
    }
    const auto targets = monomials_of_degree(d, j - 2);
    std::map<MultiIndex, std::size_t> row_of;
    for (std::size_t r = 0; r < targets.size(); ++r) row_of[targets[r]] = r;
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(Eigen::Index(targets.size()), Eigen::Index(n));
    for (std::size_t c = 0; c < n; ++c) {
        const MPoly lap = symbolic_laplacian(MPoly::monomial(Field::Real, out.monomials[c]));
        for (const auto& [m, v] : lap.terms()) L(Eigen::Index(row_of.at(m)), Eigen::Index(c)) = v.real();
    }
    // Reduced row echelon form with partial pivoting.
    std::vector<std::size_t> pivot_cols;
    Eigen::Index row = 0;
    for (Eigen::Index c = 0; c < L.cols() && row < L.rows(); ++c) {
        Eigen::Index best;
        const double piv = L.col(c).segment(row, L.rows() - row).cwiseAbs().maxCoeff(&best);
        if (piv < 1e-9) continue;
        best += row;
        L.row(row).swap(L.row(best));
        L.row(row) /= L(row, c);
        for (Eigen::Index r = 0; r < L.rows(); ++r)
            if (r != row && L(r, c) != 0.0) L.row(r) -= L(r, c) * L.row(row);
        pivot_cols.push_back(std::size_t(c));
        ++row;
    }
    std::vector<bool> is_pivot(n, false);
    for (auto c : pivot_cols) is_pivot[c] = true;
    for (std::size_t f = 0; f < n; ++f) {
        if (is_pivot[f]) continue;
        MPoly p(d, Field::Real);
        p.add_term(out.monomials[f], 1.0);
        for (std::size_t r = 0; r < pivot_cols.size(); ++r) {
            const double v = -L(Eigen::Index(r), Eigen::Index(f));
            if (std::abs(v) > 1e-12) p.add_term(out.monomials[pivot_cols[r]], v);
        }
        out.free_columns.push_back(f);
        out.basis.push_back(std::move(p));
    }
    return out;
}

} // namespace detail

/// Basis of 𝓗𝓟^d_j, the kernel of the Laplacian on homogeneous degree-j
/// polynomials, from Gaussian elimination on the monomial coefficient matrix.
inline std::vector<MPoly> hp_basis(std::size_t d, unsigned j) { return detail::harmonic_kernel(d, j).basis; }

/// Rotation by θ about the unit axis y in ℝ³ (axis-angle formula).
inline Eigen::Matrix3d axis_rotation(const Eigen::Vector3d& y, double theta)
{
    Eigen::Matrix3d K;
    K << 0, -y[2], y[1], y[2], 0, -y[0], -y[1], y[0], 0;
    return std::cos(theta) * Eigen::Matrix3d::Identity() + std::sin(theta) * K + (1 - std::cos(theta)) * y * y.transpose();
}

inline MPoly compose_rotation(const MPoly& p, const Eigen::MatrixXd& O)
{
    std::vector<Scalar> m(std::size_t(O.size()));
    for (Eigen::Index r = 0; r < O.rows(); ++r)
        for (Eigen::Index c = 0; c < O.cols(); ++c) m[std::size_t(r * O.cols() + c)] = O(r, c);
    return substitute_linear(p, m, std::size_t(O.cols()));
}

/// Average of x ↦ p(R(y, 2πs/K)x) over s = 0…K-1, the rotations about the axis
/// y in ℝ³. Exact Haar average over that circle when K > 2·deg p.
inline MPoly rotation_average(const MPoly& p, std::span<const double> y, unsigned K)
{
    if (p.dim() != 3 || y.size() != 3) throw std::invalid_argument("rotation_average: implemented for d = 3 only");
    if (p.field() != Field::Real) throw std::invalid_argument("rotation_average: polynomial must be real");
    const Eigen::Vector3d axis(y[0], y[1], y[2]);
    if (std::abs(axis.norm() - 1.0) > 1e-12) throw std::invalid_argument("rotation_average: axis must be a unit vector");
    if (K < 2 * p.degree() + 1) throw std::invalid_argument("rotation_average: K <= 2 deg p aliases the average");
    MPoly acc(3, Field::Real);
    for (unsigned s = 0; s < K; ++s)
        acc += compose_rotation(p, axis_rotation(axis, 2.0 * std::numbers::pi * s / K));
    acc *= 1.0 / K;
    acc.prune(1e-14 * std::max(1.0, p.max_abs_coefficient()));
    return acc;
}

/// Rank of a matrix through pivoted elimination on its Gram matrix, pivots
/// counted relative to the largest diagonal entry.
inline std::size_t numerical_rank_gram(const Eigen::MatrixXd& C, double rel_tol = 1e-8)
{
    Eigen::MatrixXd G = C.transpose() * C;
    const double scale = G.diagonal().cwiseAbs().maxCoeff();
    if (!(scale > 0.0)) return 0;
    std::size_t rank = 0;
    for (Eigen::Index step = 0; step < G.rows(); ++step) {
        Eigen::Index r, c;
        const double piv = G.bottomRightCorner(G.rows() - step, G.cols() - step).cwiseAbs().maxCoeff(&r, &c);
        if (piv <= rel_tol * scale) break;
        r += step;
        c += step;
        G.row(step).swap(G.row(r));
        G.col(step).swap(G.col(c));
        for (Eigen::Index i = step + 1; i < G.rows(); ++i) G.row(i) -= (G(i, step) / G(step, step)) * G.row(step);
        ++rank;
    }
    return rank;
}

/// Numerical dimension of span{p∘O_r : r < R} for seeded random rotations,
/// measured in 𝓗𝓟^d_j coordinates.
inline std::size_t rotation_span_rank(const MPoly& p, std::size_t d, unsigned j, std::size_t R, std::uint64_t seed)
{
    if (p.field() != Field::Real || p.dim() != d) throw std::invalid_argument("rotation_span_rank: p must be real in d variables");
    if (p.is_zero()) throw std::invalid_argument("rotation_span_rank: p must be nonzero");
    if (!is_homogeneous(p, j)) throw std::invalid_argument("rotation_span_rank: p is not homogeneous of degree j");
    if (!symbolic_laplacian(p).is_zero()) throw std::invalid_argument("rotation_span_rank: p is not harmonic");
    const auto kernel = detail::harmonic_kernel(d, j);
    const std::size_t dim = kernel.basis.size();
    if (R < dim) throw std::invalid_argument("rotation_span_rank: need at least dim HP rotations");
    std::mt19937_64 rng(seed);
    Eigen::MatrixXd C(static_cast<Eigen::Index>(R), static_cast<Eigen::Index>(dim));
    for (std::size_t r = 0; r < R; ++r) {
        const MPoly q = compose_rotation(p, random_rotation(d, rng));
        // Basis vectors are 1 at their own free monomial and 0 at the others,
        // so coordinates are read off the free monomials.
        for (std::size_t k = 0; k < dim; ++k)
            C(Eigen::Index(r), Eigen::Index(k)) = q.coefficient(kernel.monomials[kernel.free_columns[k]]).real();
    }
    return numerical_rank_gram(C);
}

inline Eigen::MatrixXd gegenbauer_gram(std::span<const std::vector<double>> points, unsigned n, double lambda)
{
    const Eigen::Index N = Eigen::Index(points.size());
    Eigen::MatrixXd G(N, N);
    for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::Index k = 0; k < N; ++k) {
            const auto& a = points[std::size_t(i)];
            const auto& b = points[std::size_t(k)];
            if (a.size() != b.size()) throw std::invalid_argument("gegenbauer_gram: points differ in dimension");
            double dot = 0.0;
            for (std::size_t l = 0; l < a.size(); ++l) dot += a[l] * b[l];
            G(i, k) = gegenbauer(n, lambda, dot);
        }
    return G;
}

struct FundamentalSystemResult {
    double det = 0.0;
    std::size_t expected_count = 0; ///< dim 𝓗𝓟^d_n
    bool count_matches = false;
};

/// det[C_n^λ(⟨x_i, x_k⟩)]; strictly positive for a fundamental system. A wrong
/// point count is reported through `count_matches` rather than rejected.
inline FundamentalSystemResult fundamental_system_det(std::span<const std::vector<double>> points, unsigned n, double lambda)
{
    if (points.empty()) throw std::invalid_argument("fundamental_system_det: no points");
    const std::size_t d = points[0].size();
    for (const auto& x : points) {
        double nn = 0.0;
        for (double v : x) nn += v * v;
        if (x.size() != d || std::abs(std::sqrt(nn) - 1.0) > 1e-12)
            throw std::invalid_argument("fundamental_system_det: points must be unit vectors of one dimension");
    }
    FundamentalSystemResult res;
    res.expected_count = hp_dimension(d, n);
    res.count_matches = res.expected_count == points.size();
    res.det = gegenbauer_gram(points, n, lambda).determinant();
    return res;
}

/// Leading principal minors of the Gegenbauer Gram matrix (all ≥ 0 for a
/// positive definite kernel).
inline std::vector<double> gegenbauer_leading_minors(std::span<const std::vector<double>> points, unsigned n, double lambda)
{
    const Eigen::MatrixXd G = gegenbauer_gram(points, n, lambda);
    std::vector<double> out;
    for (Eigen::Index m = 1; m <= G.rows(); ++m) out.push_back(G.topLeftCorner(m, m).determinant());
    return out;
}

/// Uniform random points on S^{d-1}.
template <class Rng>
std::vector<std::vector<double>> random_sphere_points(std::size_t count, std::size_t d, Rng& rng)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<std::vector<double>> pts(count, std::vector<double>(d));
    for (auto& x : pts) {
        double nn = 0.0;
        for (auto& v : x) {
            v = normal(rng);
            nn += v * v;
        }
        for (auto& v : x) v /= std::sqrt(nn);
    }
    return pts;
}

/// ∂p/∂x_ℓ, symbolic; stays harmonic and drops the degree by one.
inline MPoly bias_derivative(const MPoly& p, std::size_t ell) { return partial_derivative(p, ell); }

/// x ↦ [σ(x + he_ℓ) - σ(x)]/h.
inline RealFunction bias_derivative_fd(RealFunction sigma, std::size_t ell, double h)
{
    if (h == 0.0) throw std::invalid_argument("bias_derivative_fd: step must be nonzero");
    return [sigma = std::move(sigma), ell, h](std::span<const double> x) {
        std::vector<double> y(x.begin(), x.end());
        if (ell >= y.size()) throw std::invalid_argument("bias_derivative_fd: coordinate out of range");
        y[ell] += h;
        return (sigma(y) - sigma(x)) / h;
    };
}

/// The bias difference quotient as a network: every term a·σ(ρPx+b) becomes
/// (a/h)·σ(ρPx+b+he_ℓ) - (a/h)·σ(ρPx+b), which stays in the harmonic class.
inline HarmonicNet bias_difference_net(const HarmonicNet& net, std::size_t ell, double h)
{
    if (ell >= net.k()) throw std::invalid_argument("bias_difference_net: bias coordinate must be < k");
    if (h == 0.0) throw std::invalid_argument("bias_difference_net: step must be nonzero");
    std::vector<HarmonicTerm> terms;
    for (const auto& t : net.terms()) {
        HarmonicTerm up = t;
        up.a = t.a / h;
        up.b[ell] += h;
        HarmonicTerm down = t;
        down.a = -t.a / h;
        terms.push_back(std::move(up));
        terms.push_back(std::move(down));
    }
    return HarmonicNet(net.activation(), net.dim(), std::move(terms));
}

} // namespace anet
