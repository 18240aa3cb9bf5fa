#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <memory>
#include <optional>
#include <sstream>
#include <random>
#include <string>
#include <vector>

#include "anet/deep.hpp"
#include "anet/grid.hpp"
#include "anet/mpoly.hpp"
#include "anet/relu.hpp"
#include "anet/shallow.hpp"

namespace anet {

/// Circle |z - center| = radius sampled at `nodes` equispaced angles.
struct ContourSpec {
    Scalar center{};
    double radius = 1.0;
    unsigned nodes = 256;

    void validate() const
    {
        if (!(radius > 0.0) || !std::isfinite(radius)) throw std::invalid_argument("ContourSpec: radius must be positive");
        if (nodes < 8) throw std::invalid_argument("ContourSpec: need at least 8 nodes");
        if (!is_finite(center)) throw std::invalid_argument("ContourSpec: non-finite center");
    }
};

using ComplexFunction = std::function<Scalar(Scalar)>;

/// Trapezoid rule for ∮ z^{k-1} f(z) dz, counter-clockwise. Spectrally accurate
/// when the integrand is analytic in an annulus around the circle.
inline Scalar contour_integral(const ComplexFunction& f, const ContourSpec& spec, int k)
{
    spec.validate();
    Scalar acc{};
    const double dtheta = 2.0 * std::numbers::pi / spec.nodes;
    for (unsigned j = 0; j < spec.nodes; ++j) {
        const Scalar e = std::polar(1.0, j * dtheta);
        const Scalar z = spec.center + spec.radius * e;
        const Scalar fz = f(z);
        if (!is_finite(fz)) throw std::domain_error("contour_integral: non-finite sample at node " + std::to_string(j));
        const Scalar dz = Scalar(0.0, 1.0) * spec.radius * e;
        acc += std::pow(z, k - 1) * fz * dz;
    }
    return acc * dtheta;
}

struct CauchyRow {
    std::string label;
    Scalar integral;
};

struct CauchyReport {
    int k = 1;
    double radius = 0.0;
    CauchyRow target;              ///< ∮ z^{k-1}·z^{-k} dz, ideally 2πi
    std::vector<CauchyRow> polys;  ///< ∮ z^{k-1}·p dz, ideally 0
    /// |target| - max |poly row|: a polynomial p with ‖p - z^{-k}‖ ≤ δ on the
    /// circle changes the integral by at most 2πρ^k·δ, so the gap bounds δ below.
    [[nodiscard]] double gap() const
    {
        double m = 0.0;
        for (const auto& r : polys) m = std::max(m, std::abs(r.integral));
        return std::abs(target.integral) - m;
    }
};

inline std::string poly_label(const MPoly& p)
{
    std::string s;
    for (const auto& [m, c] : p.graded_terms()) {
        if (!s.empty()) s += " + ";
        std::ostringstream os;
        os.precision(6);
        if (c.imag() == 0.0) os << c.real();
        else os << "(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i)";
        if (m[0] > 0) os << "*z^" << m[0];
        s += os.str();
    }
    return s.empty() ? "0" : s;
}

/// Integrals of z^{k-1}p against z^{k-1}z^{-k} on the circle of radius (r+R)/2
/// about the origin, inside the annulus r < |z| < R.
inline CauchyReport cauchy_obstruction_report(int k, std::span<const MPoly> polys, double r, double R, unsigned nodes = 256)
{
    if (!(r > 0.0 && r < R)) throw std::invalid_argument("cauchy_obstruction_report: need 0 < r < R");
    if (k < 1) throw std::invalid_argument("cauchy_obstruction_report: need k >= 1");
    const ContourSpec spec{0.0, 0.5 * (r + R), nodes};
    CauchyReport rep;
    rep.k = k;
    rep.radius = spec.radius;
    rep.target = {"z^-" + std::to_string(k), contour_integral([k](Scalar z) { return std::pow(z, -k); }, spec, k)};
    for (const auto& p : polys) {
        if (p.dim() != 1) throw std::invalid_argument("cauchy_obstruction_report: polynomials must be univariate");
        const MPoly pc = p.field() == Field::Complex ? p : [&] {
            MPoly q(1, Field::Complex);
            for (const auto& [m, c] : p.terms()) q.add_term(m, c);
            return q;
        }();
        rep.polys.push_back({poly_label(p), contour_integral([&pc](Scalar z) { return eval_mpoly(pc, {z}); }, spec, k)});
    }
    return rep;
}

/// Polynomial interpolant through (z_i, y_i) in barycentric form.
class LagrangeInterpolant {
public:
    /// Monomial expansion past this many nodes is badly conditioned.
    static constexpr std::size_t kExpansionWarnNodes = 30;

    LagrangeInterpolant(std::vector<Scalar> nodes, std::vector<Scalar> values)
        : z_(std::move(nodes)), y_(std::move(values)), w_(z_.size(), 1.0)
    {
        if (z_.empty() || z_.size() != y_.size()) throw std::invalid_argument("LagrangeInterpolant: need matching nonempty node/value lists");
        for (std::size_t i = 0; i < z_.size(); ++i) {
            if (!is_finite(z_[i]) || !is_finite(y_[i])) throw std::invalid_argument("LagrangeInterpolant: non-finite data");
            for (std::size_t j = 0; j < z_.size(); ++j) {
                if (i == j) continue;
                if (z_[i] == z_[j]) throw std::invalid_argument("LagrangeInterpolant: duplicate node");
                w_[i] /= (z_[i] - z_[j]);
            }
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return z_.size(); }
    [[nodiscard]] const std::vector<Scalar>& nodes() const noexcept { return z_; }
    [[nodiscard]] const std::vector<Scalar>& values() const noexcept { return y_; }
    [[nodiscard]] bool expansion_ill_conditioned() const noexcept { return z_.size() > kExpansionWarnNodes; }

    /// Second (true) barycentric formula; exact at the nodes.
    Scalar operator()(Scalar z) const
    {
        Scalar num{}, den{};
        for (std::size_t i = 0; i < z_.size(); ++i) {
            if (z == z_[i]) return y_[i];
            const Scalar t = w_[i] / (z - z_[i]);
            num += t * y_[i];
            den += t;
        }
        return num / den;
    }

    /// Σ y_i w_i ∏_{j≠i} (z - z_j) expanded into monomials.
    [[nodiscard]] MPoly to_mpoly(Field f = Field::Complex) const
    {
        const std::size_t n = z_.size();
        // Coefficients of ∏_j (z - z_j), lowest degree first.
        std::vector<Scalar> full{1.0};
        for (const auto& zj : z_) {
            std::vector<Scalar> next(full.size() + 1, 0.0);
            for (std::size_t a = 0; a < full.size(); ++a) {
                next[a + 1] += full[a];
                next[a] -= zj * full[a];
            }
            full = std::move(next);
        }
        std::vector<Scalar> out(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            // Synthetic division of the full product by (z - z_i).
            std::vector<Scalar> q(n, 0.0);
            Scalar carry{};
            for (std::size_t a = n + 1; a-- > 1;) {
                carry = full[a] + carry * z_[i];
                q[a - 1] = carry;
            }
            for (std::size_t a = 0; a < n; ++a) out[a] += y_[i] * w_[i] * q[a];
        }
        MPoly p(1, f);
        for (unsigned a = 0; a < n; ++a) {
            Scalar c = out[a];
            if (f == Field::Real) c = c.real();
            p.add_term(MultiIndex{a}, c);
        }
        return p;
    }

private:
    std::vector<Scalar> z_, y_, w_;
};

inline LagrangeInterpolant lagrange_interpolate(std::span<const std::pair<Scalar, Scalar>> pts)
{
    std::vector<Scalar> z, y;
    for (const auto& [a, b] : pts) {
        z.push_back(a);
        y.push_back(b);
    }
    return LagrangeInterpolant(std::move(z), std::move(y));
}

struct ConvergenceRow {
    double parameter;
    double error;
    double ratio; ///< error / previous error; NaN on the first row
};

/// Parameter/error table with successive ratios. Parameters must be strictly
/// monotone (either direction).
class ConvergenceTable {
public:
    ConvergenceTable() = default;
    explicit ConvergenceTable(std::string parameter_name) : name_(std::move(parameter_name)) {}

    void add(double parameter, double error)
    {
        if (!(error >= 0.0)) throw std::invalid_argument("ConvergenceTable: errors must be non-negative");
        if (rows_.size() >= 2) {
            const bool dec = rows_[1].parameter < rows_[0].parameter;
            if (dec ? !(parameter < rows_.back().parameter) : !(parameter > rows_.back().parameter))
                throw std::invalid_argument("ConvergenceTable: parameters must be strictly monotone");
        } else if (rows_.size() == 1 && parameter == rows_[0].parameter) {
            throw std::invalid_argument("ConvergenceTable: repeated parameter");
        }
        const double ratio = rows_.empty() ? std::numeric_limits<double>::quiet_NaN() : error / rows_.back().error;
        rows_.push_back({parameter, error, ratio});
    }

    [[nodiscard]] const std::string& parameter_name() const noexcept { return name_; }
    [[nodiscard]] const std::vector<ConvergenceRow>& rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t size() const noexcept { return rows_.size(); }

    /// Largest successive ratio (NaN for fewer than two rows).
    [[nodiscard]] double max_ratio() const
    {
        double m = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t i = 1; i < rows_.size(); ++i) m = i == 1 ? rows_[i].ratio : std::max(m, rows_[i].ratio);
        return m;
    }

    [[nodiscard]] bool strictly_increasing_errors() const
    {
        for (std::size_t i = 1; i < rows_.size(); ++i)
            if (!(rows_[i].error > rows_[i - 1].error)) return false;
        return true;
    }

private:
    std::string name_ = "parameter";
    std::vector<ConvergenceRow> rows_;
};

inline double runge_target(double x) { return 1.0 / (1.0 + 25.0 * x * x); }

/// Equidistant nodes (endpoints included) on [-1, 1].
inline std::vector<double> equidistant_nodes(unsigned n)
{
    if (n < 2) throw std::invalid_argument("equidistant_nodes: need at least 2 nodes");
    std::vector<double> x(n);
    for (unsigned i = 0; i < n; ++i) x[i] = -1.0 + 2.0 * i / (n - 1);
    return x;
}

inline LagrangeInterpolant runge_interpolant(unsigned n)
{
    std::vector<Scalar> z, y;
    for (double x : equidistant_nodes(n)) {
        z.emplace_back(x);
        y.emplace_back(runge_target(x));
    }
    return LagrangeInterpolant(std::move(z), std::move(y));
}

/// Max error of equidistant interpolation of 1/(1+25x²) on a 1001-point grid.
inline ConvergenceTable runge_table(std::span<const unsigned> counts)
{
    ConvergenceTable t("nodes");
    for (unsigned n : counts) {
        const auto P = runge_interpolant(n);
        double err = 0.0;
        for (unsigned i = 0; i <= 1000; ++i) {
            const double x = -1.0 + 2.0 * i / 1000.0;
            err = std::max(err, std::abs(P(x) - runge_target(x)));
        }
        t.add(double(n), err);
    }
    return t;
}

/// Max over grid points and all partial derivatives of order ≤ k of the
/// difference of central-difference derivatives (step h). Derivatives are taken
/// along the real direction of each coordinate, which is the complex derivative
/// for holomorphic functions.
inline double ck_error(const ScalarFunction& f, const ScalarFunction& g, unsigned k, const BoxGrid& grid, double h)
{
    if (k > 2) throw std::invalid_argument("ck_error: k must be 0, 1 or 2");
    if (k == 0) return sup_norm_diff(f, g, grid);
    if (!(h > 0.0)) throw std::invalid_argument("ck_error: step must be positive");
    const ScalarFunction diff = [&](std::span<const Scalar> z) { return f(z) - g(z); };
    const std::size_t d = grid.dim();
    double m = 0.0;
    grid.for_each([&](std::span<const Scalar> z) {
        ScalarVec y(z.begin(), z.end());
        auto at = [&](std::size_t i, double si, std::size_t j, double sj) {
            y[i] += si;
            y[j] += sj;
            const Scalar v = diff(y);
            y[i] -= si;
            y[j] -= sj;
            return v;
        };
        const Scalar f0 = diff(y);
        m = std::max(m, std::abs(f0));
        for (std::size_t i = 0; i < d; ++i) {
            m = std::max(m, std::abs((at(i, h, i, 0) - at(i, -h, i, 0)) / (2 * h)));
            if (k < 2) continue;
            m = std::max(m, std::abs((at(i, h, i, 0) - 2.0 * f0 + at(i, -h, i, 0)) / (h * h)));
            for (std::size_t j = i + 1; j < d; ++j)
                m = std::max(m, std::abs((at(i, h, j, h) - at(i, h, j, -h) - at(i, -h, j, h) + at(i, -h, j, -h)) / (4 * h * h)));
        }
    });
    return m;
}

/// Fixed arguments of a named convergence study.
struct StudyArgs {
    Activation activation = Activation::exp(Field::Real);
    unsigned degree = 2;                 ///< monomial degree / power of the target
    std::optional<double> zstar;         ///< base point for deep builders
    std::vector<std::size_t> widths{2, 2};
    std::size_t neurons = 4;
    std::uint64_t seed = 1;
};

/// One approximant/target pair per parameter value.
using StudyCase = std::function<std::pair<ScalarFunction, ScalarFunction>(double)>;

namespace detail {

inline ShallowNet random_shallow(const Activation& act, std::size_t d, std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto draw = [&] { return act.field() == Field::Real ? Scalar(u(rng)) : Scalar(u(rng), u(rng)); };
    ShallowNet s(d, act);
    for (std::size_t k = 0; k < n; ++k) {
        ScalarVec w(d);
        for (auto& x : w) x = draw();
        s.add({draw(), std::move(w), draw()});
    }
    return s;
}

inline MPoly power_of_first(std::size_t d, Field f, unsigned m)
{
    MultiIndex idx = MultiIndex::zero(d);
    idx.exponents[0] = m;
    return MPoly::monomial(f, idx);
}

} // namespace detail

/// Names accepted by convergence_study.
inline std::vector<std::string> study_ids()
{
    return {"shallow-monomial", "resnet-poly-general", "mlp-embed", "relu-c2"};
}

inline StudyCase study_case(const std::string& id, const StudyArgs& args, std::size_t dim)
{
    const Activation act = args.activation;
    if (id == "shallow-monomial") {
        if (dim != 1) throw std::invalid_argument("shallow-monomial study: grid must be one-dimensional");
        const Scalar alpha = activation_coefficient(act, args.degree);
        return [act, alpha, m = args.degree](double gamma) {
            auto net = std::make_shared<ShallowNet>(build_monomial_1d(act, m, gamma));
            return std::pair<ScalarFunction, ScalarFunction>{
                [net](std::span<const Scalar> z) { return eval_shallow(*net, z); },
                [alpha, m](std::span<const Scalar> z) { return alpha * std::pow(z[0], int(m)); }};
        };
    }
    if (id == "resnet-poly-general") {
        const MPoly p = detail::power_of_first(dim, act.field(), args.degree);
        return [act, p, zs = args.zstar](double h) {
            auto net = std::make_shared<ResNet>(resnet_poly_general(p, act, h, zs));
            return std::pair<ScalarFunction, ScalarFunction>{
                [net](std::span<const Scalar> z) { return eval_resnet(*net, z); },
                [p](std::span<const Scalar> z) { return eval_mpoly(p, z); }};
        };
    }
    if (id == "mlp-embed") {
        auto src = std::make_shared<ShallowNet>(detail::random_shallow(act, dim, args.neurons, args.seed));
        return [src, widths = args.widths, zs = args.zstar](double eps) {
            auto net = std::make_shared<MLP>(mlp_from_shallow(*src, widths, eps, zs));
            return std::pair<ScalarFunction, ScalarFunction>{
                [net](std::span<const Scalar> z) { return eval_mlp(*net, z); },
                [src](std::span<const Scalar> z) { return eval_shallow(*src, z); }};
        };
    }
    if (id == "relu-c2") {
        if (dim != 1) throw std::invalid_argument("relu-c2 study: grid must be one-dimensional");
        // f(x) = x^degree on [0, 1].
        const unsigned m = args.degree;
        const C2FunctionSpec spec{
            [m](double x) { return std::pow(x, m); },
            [m](double x) { return m >= 1 ? m * std::pow(x, int(m) - 1) : 0.0; },
            [m](double x) { return m >= 2 ? m * (m - 1.0) * std::pow(x, int(m) - 2) : 0.0; },
            0.0,
            1.0};
        return [spec, m](double T) {
            if (T < 1 || T != std::floor(T)) throw std::invalid_argument("relu-c2 study: node counts must be positive integers");
            auto net = std::make_shared<ShallowNet>(shallow_from_c2(spec, unsigned(T)));
            return std::pair<ScalarFunction, ScalarFunction>{
                [net](std::span<const Scalar> z) { return eval_shallow(*net, z); },
                [m](std::span<const Scalar> z) { return Scalar(std::pow(z[0].real(), m)); }};
        };
    }
    throw std::invalid_argument("convergence_study: unknown builder id '" + id + "'");
}

/// Runs the named builder once per parameter and tabulates the grid sup error.
inline ConvergenceTable convergence_study(const std::string& id, const StudyArgs& args, std::span<const double> params,
                                          const BoxGrid& grid)
{
    const StudyCase make = study_case(id, args, grid.dim());
    ConvergenceTable table(id == "relu-c2" ? "T" : id == "mlp-embed" ? "epsilon" : id == "resnet-poly-general" ? "h" : "gamma");
    for (double p : params) {
        if (!(p > 0.0)) throw std::invalid_argument("convergence_study: parameters must be positive");
        const auto [approx, target] = make(p);
        table.add(p, sup_norm_diff(approx, target, grid));
    }
    return table;
}

} // namespace anet
