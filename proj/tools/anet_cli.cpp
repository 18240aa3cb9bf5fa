// anet: build, embed, evaluate and verify explicit network constructions.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
// 3 construction precondition violated.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "anet/analysis.hpp"
#include "anet/deep.hpp"
#include "anet/harmonic.hpp"
#include "anet/io.hpp"
#include "anet/relu.hpp"
#include "anet/shallow.hpp"

using namespace anet;

namespace {

enum Exit : int { kOk = 0, kVerifyFailed = 1, kUsage = 2, kPrecondition = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---- shared option state ----

struct Options {
    std::string field = "R";
    std::string activation = "exp";
    std::string harmonic_activation = "expcos";
    std::vector<double> coeffs;
    double slope = 0.01;
    std::string input, output, points, poly, pieces, minus_pieces;
    std::optional<std::uint64_t> seed;
    unsigned degree = 0;
    std::vector<unsigned> index;
    double gamma = 1e-3, beta = 1e-3, h = 1e-3, epsilon = 1e-3, tol = 1e-5, max_ratio = 0.6;
    std::optional<double> zstar;
    std::optional<std::size_t> dim;
    bool pure = false, allow_nonharmonic = false;
    std::vector<std::size_t> widths;
    std::vector<double> box{-1.0, 1.0};
    std::vector<double> interval{0.0, 1.0};
    std::vector<double> annulus{0.5, 2.0};
    std::vector<double> params;
    std::vector<unsigned> node_counts{5, 9, 13};
    std::string function = "square";
    std::string builder = "shallow-monomial";
    unsigned nodes = 256, count = 100, terms = 3, rotations = 0;
    int k = 1;
};

Field field_of(const Options& o) { return parse_field(o.field); }

Activation make_activation(const Options& o, Field f)
{
    const auto& a = o.activation;
    if (a == "exp") return Activation::exp(f);
    if (a == "sin") return Activation::sin(f);
    if (a == "cos") return Activation::cos(f);
    if (a == "sinh") return Activation::sinh(f);
    if (a == "cosh") return Activation::cosh(f);
    if (a == "square") return Activation::square(f);
    if (a == "identity") return Activation::identity(f);
    if (a == "cube") return Activation::polynomial(f, {0.0, 0.0, 0.0, 1.0});
    if (a == "relu") return Activation::relu();
    if (a == "leaky-relu") return Activation::leaky_relu(o.slope);
    if (a == "poly") {
        if (o.coeffs.empty()) throw UsageError("--activation poly needs --coeffs");
        return Activation::polynomial(f, std::vector<Scalar>(o.coeffs.begin(), o.coeffs.end()));
    }
    throw UsageError("unknown activation '" + a + "'");
}

std::uint64_t need_seed(const Options& o)
{
    if (!o.seed) throw UsageError("this command is randomized: --seed is required");
    return *o.seed;
}

std::string widths_string(std::span<const std::size_t> w)
{
    std::string s;
    for (auto x : w) s += (s.empty() ? "" : ",") + std::to_string(x);
    return s;
}

void write_output(const Options& o, const std::string& text)
{
    if (o.output.empty() || o.output == "-") std::cout << text;
    else save_text(o.output, text);
}

void write_document(const Options& o, const NetworkDocument& doc)
{
    if (o.output.empty()) throw UsageError("-o is required");
    save_text(o.output, serialize(doc));
}

MPoly load_poly(const Options& o, Field f)
{
    std::ifstream in(o.poly);
    if (!in) throw ParseError("cannot open polynomial file '" + o.poly + "'");
    return read_poly_csv(in, f, o.dim);
}

std::vector<AffinePiece> load_pieces(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open pieces file '" + path + "'");
    const auto rows = read_numeric_csv(in);
    if (rows.empty()) throw ParseError("pieces file '" + path + "' is empty");
    std::vector<AffinePiece> out;
    for (const auto& r : rows) {
        if (r.size() < 2) throw ParseError("pieces file: each row is w1,...,wd,b");
        out.push_back({std::vector<double>(r.begin(), r.end() - 1), r.back()});
    }
    return out;
}

Json params_json(const Options& o) { return Json{{"activation", o.activation}, {"field", o.field}}; }

/// Deterministic sample points over [-1,1]^d (or the complex unit box).
BoxGrid check_grid(Field f, std::size_t d)
{
    const std::size_t axes = f == Field::Real ? d : 2 * d;
    const unsigned per = axes <= 1 ? 201 : axes == 2 ? 41 : axes <= 4 ? 7 : 3;
    return BoxGrid::cube(f, d, -1.0, 1.0, per);
}

double max_relative_gap(const ScalarFunction& a, const ScalarFunction& b, const BoxGrid& g)
{
    double m = 0.0;
    g.for_each([&](std::span<const Scalar> z) {
        const Scalar vb = b(z);
        m = std::max(m, std::abs(a(z) - vb) / std::max(1.0, std::abs(vb)));
    });
    return m;
}

void print_counts(const AnyNetwork& n)
{
    std::visit(
        [](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, ShallowNet>) std::cout << "neurons: " << x.size() << "\n";
            std::cout << "param_count: " << param_count(x) << "\n";
        },
        n);
}

// ---- build ----

int build_shallow_monomial(const Options& o)
{
    const Field f = field_of(o);
    const Activation act = make_activation(o, f);
    NetworkDocument doc{ShallowNet(1, act), params_json(o)};
    if (!o.index.empty()) {
        doc.net = build_monomial_multi(act, MultiIndex(o.index), o.beta, o.gamma);
        doc.construction["builder"] = "build_monomial_multi";
        doc.construction["index"] = o.index;
        doc.construction["beta"] = o.beta;
    } else {
        doc.net = build_monomial_1d(act, o.degree, o.gamma, o.pure);
        doc.construction["builder"] = "build_monomial_1d";
        doc.construction["degree"] = o.degree;
        doc.construction["pure"] = o.pure;
    }
    doc.construction["gamma"] = o.gamma;
    write_document(o, doc);
    print_counts(doc.net);
    return kOk;
}

int build_shallow_poly(const Options& o)
{
    const Field f = field_of(o);
    const Activation act = make_activation(o, f);
    const MPoly p = load_poly(o, f);
    NetworkDocument doc{build_polynomial(act, p, o.beta, o.gamma), params_json(o)};
    doc.construction["builder"] = "build_polynomial";
    doc.construction["beta"] = o.beta;
    doc.construction["gamma"] = o.gamma;
    write_document(o, doc);
    print_counts(doc.net);
    return kOk;
}

int build_resnet_poly(const Options& o)
{
    const Field f = field_of(o);
    const MPoly p = load_poly(o, f);
    NetworkDocument doc{resnet_poly_square(p), params_json(o)};
    if (o.activation == "square") {
        doc.construction["builder"] = "resnet_poly_square";
    } else {
        doc.net = resnet_poly_general(p, make_activation(o, f), o.h, o.zstar);
        doc.construction["builder"] = "resnet_poly_general";
        doc.construction["h"] = o.h;
        if (o.zstar) doc.construction["zstar"] = *o.zstar;
    }
    const auto& r = std::get<ResNet>(doc.net);
    write_document(o, doc);
    std::cout << "inner_dim: " << r.inner_dim() << "\nblocks: " << r.blocks().size() << "\nmax_block_width: " << r.max_block_width() << "\n";
    print_counts(doc.net);
    return kOk;
}

C2FunctionSpec named_c2(const std::string& name, double a, double b)
{
    if (name == "square") return {[](double x) { return x * x; }, [](double x) { return 2 * x; }, [](double) { return 2.0; }, a, b};
    if (name == "exp") return {[](double x) { return std::exp(x); }, [](double x) { return std::exp(x); }, [](double x) { return std::exp(x); }, a, b};
    if (name == "sin") return {[](double x) { return std::sin(x); }, [](double x) { return std::cos(x); }, [](double x) { return -std::sin(x); }, a, b};
    if (name == "cube") return {[](double x) { return x * x * x; }, [](double x) { return 3 * x * x; }, [](double x) { return 6 * x; }, a, b};
    throw UsageError("unknown --function '" + name + "' (square, exp, sin, cube)");
}

int build_relu_c2(const Options& o)
{
    if (o.interval.size() != 2) throw UsageError("--interval takes a,b");
    const auto spec = named_c2(o.function, o.interval[0], o.interval[1]);
    NetworkDocument doc{shallow_from_c2(spec, o.nodes), Json{{"builder", "shallow_from_c2"}, {"function", o.function}, {"nodes", o.nodes}}};
    double err = 0.0;
    for (int i = 0; i <= 200; ++i) {
        const double x = spec.a + (spec.b - spec.a) * i / 200.0;
        err = std::max(err, std::abs(eval_shallow(std::get<ShallowNet>(doc.net), {Scalar(x)}).real() - spec.f(x)));
    }
    write_document(o, doc);
    print_counts(doc.net);
    std::cout << "grid_sup_error: " << format_number(err) << "\n";
    return kOk;
}

int build_relu_maxaffine(const Options& o)
{
    const auto f1 = load_pieces(o.pieces);
    NetworkDocument doc{resnet_max_affine(f1), Json{{"builder", "resnet_max_affine"}, {"pieces", f1.size()}}};
    if (!o.minus_pieces.empty()) {
        const auto f2 = load_pieces(o.minus_pieces);
        doc.net = resnet_dc(f1, f2);
        doc.construction = Json{{"builder", "resnet_dc"}, {"pieces", f1.size()}, {"minus_pieces", f2.size()}};
    }
    write_document(o, doc);
    std::cout << "inner_dim: " << std::get<ResNet>(doc.net).inner_dim() << "\n";
    print_counts(doc.net);
    return kOk;
}

int build_harmonic_net(const Options& o)
{
    std::mt19937_64 rng(need_seed(o));
    const std::size_t d = o.dim.value_or(3);
    HarmonicActivation act = HarmonicActivation::by_name(o.harmonic_activation);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<HarmonicTerm> terms;
    for (unsigned i = 0; i < o.terms; ++i) {
        OrthProjection P = random_projection(act.k, d, rng);
        const double a = u(rng), rho = 1.0 + 0.5 * u(rng);
        std::vector<double> b(act.k);
        for (auto& x : b) x = 0.5 * u(rng);
        terms.push_back({a, rho, std::move(P), std::move(b)});
    }
    const bool harmonic = !act.poly || symbolic_laplacian(*act.poly).is_zero();
    if (!harmonic && !o.allow_nonharmonic) throw std::invalid_argument("activation '" + o.harmonic_activation + "' is not harmonic (pass --allow-nonharmonic for a control)");
    HarmonicNet net = harmonic ? HarmonicNet(act, d, std::move(terms)) : HarmonicNet::unchecked(act, d, std::move(terms));
    NetworkDocument doc{std::move(net), Json{{"builder", "harmonic_net"}, {"seed", *o.seed}, {"activation", o.harmonic_activation}}};
    write_document(o, doc);
    std::cout << "terms: " << o.terms << "\n";
    print_counts(doc.net);
    return kOk;
}

// ---- embed ----

ShallowNet load_shallow(const Options& o)
{
    if (o.input.empty()) throw UsageError("-i is required");
    auto doc = load_document(o.input);
    if (!std::holds_alternative<ShallowNet>(doc.net)) throw UsageError("input must be a shallow network");
    return std::get<ShallowNet>(std::move(doc.net));
}

std::vector<std::size_t> widths_or_single(const Options& o, std::size_t n)
{
    return o.widths.empty() ? std::vector<std::size_t>{n} : o.widths;
}

int embed_resnet(const Options& o)
{
    const ShallowNet s = load_shallow(o);
    const auto widths = widths_or_single(o, s.size());
    ResNet r = resnet_from_shallow(s, widths);
    const double gap = max_relative_gap([&](auto z) { return eval_resnet(r, z); }, [&](auto z) { return eval_shallow(s, z); },
                                        check_grid(s.field(), s.dim()));
    const std::size_t d = s.dim(), n = s.size();
    NetworkDocument doc{std::move(r), Json{{"builder", "resnet_from_shallow"}, {"d", d}, {"n", n}, {"widths", widths}}};
    write_document(o, doc);
    std::cout << "source param_count: " << param_count(s) << "  formula (d+2)n = " << shallow_param_formula(d, n) << "\n"
              << "target param_count: " << param_count(std::get<ResNet>(doc.net))
              << "  formula 2(n+1)(d+1)+n = " << resnet_embedding_param_formula(d, n)
              << "  term sum (d+1)(d+2)+(2d+3)n = " << resnet_embedding_param_sum(d, n) << "\n"
              << "self-check max relative gap: " << format_number(gap) << "\n";
    return gap <= 1e-12 ? kOk : kVerifyFailed;
}

int embed_mlp(const Options& o)
{
    const ShallowNet s = load_shallow(o);
    const auto widths = widths_or_single(o, s.size());
    const bool relu = s.activation().family() == Family::ReLU;
    std::vector<double> lo(s.dim(), o.box.at(0)), hi(s.dim(), o.box.at(1));
    MLP m = relu ? mlp_exact_from_shallow_relu(s, lo, hi, widths) : mlp_from_shallow(s, widths, o.epsilon, o.zstar);
    const BoxGrid g = s.field() == Field::Real ? BoxGrid(lo, hi, check_grid(Field::Real, s.dim()).samples()) : check_grid(s.field(), s.dim());
    const double err = sup_norm_diff([&](auto z) { return eval_mlp(m, z); }, [&](auto z) { return eval_shallow(s, z); }, g);
    Json meta{{"builder", relu ? "mlp_exact_from_shallow_relu" : "mlp_from_shallow"}, {"widths", widths}};
    if (!relu) meta["epsilon"] = o.epsilon;
    else meta["box"] = o.box;
    const auto w = m.widths();
    NetworkDocument doc{std::move(m), std::move(meta)};
    write_document(o, doc);
    std::cout << "widths: " << widths_string(w) << "\n"
              << "source param_count: " << param_count(s) << "\n"
              << "target param_count: " << param_count(std::get<MLP>(doc.net)) << "  formula sum(d_{l-1}d_l + d_l) = " << mlp_param_formula(w)
              << "\nmeasured grid error: " << format_number(err) << "\n";
    return kOk;
}

int embed_densenet(const Options& o)
{
    if (o.input.empty()) throw UsageError("-i is required");
    NetworkDocument src = load_document(o.input);
    std::optional<DenseNet> dn;
    ScalarFunction source;
    std::size_t d = 0;
    Field f = Field::Real;
    if (auto* s = std::get_if<ShallowNet>(&src.net)) {
        dn = densenet_from_shallow(*s, widths_or_single(o, s->size()));
        source = [s](auto z) { return eval_shallow(*s, z); };
        d = s->dim();
        f = s->field();
        std::cout << "source param_count: " << param_count(*s) << "\n";
    } else if (auto* m = std::get_if<MLP>(&src.net)) {
        dn = densenet_from_mlp(*m);
        source = [m](auto z) { return eval_mlp(*m, z); };
        d = m->input_dim();
        f = m->field();
        std::cout << "source param_count: " << param_count(*m) << "\n";
    } else {
        throw UsageError("densenet embedding needs a shallow or mlp document");
    }
    const double gap = max_relative_gap([&](auto z) { return eval_densenet(*dn, z); }, source, check_grid(f, d));
    const auto w = dn->widths();
    NetworkDocument doc{std::move(*dn), Json{{"builder", std::string("densenet_from_") + std::string(kind_name(src.net))}}};
    write_document(o, doc);
    std::cout << "target param_count: " << param_count(std::get<DenseNet>(doc.net)) << "  formula sum(n_l d_l + d_l) = " << densenet_param_formula(w)
              << "\nself-check max relative gap: " << format_number(gap) << "\n";
    return gap <= 1e-12 ? kOk : kVerifyFailed;
}

// ---- eval ----

int run_eval(const Options& o)
{
    if (o.input.empty() || o.points.empty()) throw UsageError("eval needs -i and --points");
    const NetworkDocument doc = load_document(o.input);
    std::ifstream in(o.points);
    if (!in) throw ParseError("cannot open points file '" + o.points + "'");
    const Field f = io_detail::field_of(doc.net);
    const std::size_t d = std::visit(
                              [](const auto& x) -> std::size_t {
                                  using T = std::decay_t<decltype(x)>;
                                  if constexpr (std::is_same_v<T, ShallowNet> || std::is_same_v<T, HarmonicNet>) return x.dim();
                                  else return x.input_dim();
                              },
                              doc.net);
    const auto pts = read_points_csv(in, d, f);
    ResultTable t;
    t.header = f == Field::Real ? std::vector<std::string>{"value"} : std::vector<std::string>{"re", "im"};
    for (const auto& z : pts) {
        const Scalar v = std::visit(
            [&z](const auto& x) -> Scalar {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, ShallowNet>) return eval_shallow(x, z);
                else if constexpr (std::is_same_v<T, ResNet>) return eval_resnet(x, z);
                else if constexpr (std::is_same_v<T, MLP>) return eval_mlp(x, z);
                else if constexpr (std::is_same_v<T, DenseNet>) return eval_densenet(x, z);
                else {
                    std::vector<double> r(z.size());
                    for (std::size_t i = 0; i < z.size(); ++i) r[i] = z[i].real();
                    return eval_harmonic_net(x, r);
                }
            },
            doc.net);
        if (f == Field::Real) t.add({v.real()});
        else t.add({v.real(), v.imag()});
    }
    write_output(o, table_string(t));
    return kOk;
}

// ---- verify ----

int finish_verify(const Options& o, const ResultTable& t, bool ok, const std::string& what)
{
    write_output(o, table_string(t));
    if (!ok) {
        std::cerr << "verification failed: " << what << "\n";
        return kVerifyFailed;
    }
    return kOk;
}

int verify_convergence(const Options& o)
{
    const Field f = field_of(o);
    StudyArgs args;
    args.activation = make_activation(o, f);
    args.degree = o.degree == 0 ? 2 : o.degree;
    args.zstar = o.zstar;
    if (!o.widths.empty()) args.widths = o.widths;
    args.neurons = 0;
    for (auto w : args.widths) args.neurons += w;
    if (o.builder == "mlp-embed") args.seed = need_seed(o);
    if (o.params.empty()) throw UsageError("--params is required");
    const std::size_t d = o.dim.value_or(1);
    const BoxGrid grid = o.builder == "relu-c2" ? BoxGrid(std::vector<double>{0.0}, std::vector<double>{1.0}, 201)
                                                : BoxGrid::cube(f, d, -1.0, 1.0);
    const ConvergenceTable table = convergence_study(o.builder, args, o.params, grid);
    ResultTable t{{table.parameter_name(), "error", "ratio"}, {}};
    bool ok = true;
    for (const auto& r : table.rows()) {
        t.add({r.parameter, r.error, r.ratio});
        if (!std::isfinite(r.error) || (std::isfinite(r.ratio) && r.ratio > o.max_ratio)) ok = false;
    }
    return finish_verify(o, t, ok, "successive error ratio above " + format_number(o.max_ratio));
}

int verify_harmonic(const Options& o)
{
    if (o.input.empty()) throw UsageError("-i is required");
    const NetworkDocument doc = load_document(o.input);
    const auto* net = std::get_if<HarmonicNet>(&doc.net);
    if (!net) throw UsageError("verify harmonic needs a harmonic network document");
    std::mt19937_64 rng(need_seed(o));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<std::vector<double>> pts(o.count, std::vector<double>(net->dim()));
    for (auto& x : pts)
        for (auto& v : x) v = u(rng);
    ResultTable t;
    for (std::size_t i = 0; i < net->dim(); ++i) t.header.push_back("x" + std::to_string(i + 1));
    t.header.push_back("laplacian");
    double worst = 0.0;
    for (const auto& x : pts) {
        const double lap = verify_network_harmonic(*net, std::span<const std::vector<double>>(&x, 1), o.h);
        worst = std::max(worst, lap);
        auto row = x;
        row.push_back(lap);
        t.add(std::move(row));
    }
    std::cerr << "max |laplacian|: " << format_number(worst) << " (tolerance " << format_number(o.tol) << ")\n";
    return finish_verify(o, t, worst <= o.tol, "FD Laplacian exceeds tolerance");
}

int verify_cauchy(const Options& o)
{
    if (o.annulus.size() != 2) throw UsageError("--annulus takes r,R");
    std::vector<MPoly> polys;
    for (unsigned j = 0; j <= o.degree; ++j) polys.push_back(MPoly::monomial(Field::Complex, MultiIndex{j}));
    const auto rep = cauchy_obstruction_report(o.k, polys, o.annulus[0], o.annulus[1], o.nodes);
    ResultTable t{{"k", "poly_degree", "re", "im", "abs"}, {}};
    t.add({double(o.k), -1.0, rep.target.integral.real(), rep.target.integral.imag(), std::abs(rep.target.integral)});
    bool ok = std::abs(rep.target.integral - Scalar(0.0, 2.0 * std::numbers::pi)) <= 1e-10;
    for (std::size_t j = 0; j < rep.polys.size(); ++j) {
        const Scalar v = rep.polys[j].integral;
        t.add({double(o.k), double(j), v.real(), v.imag(), std::abs(v)});
        ok = ok && std::abs(v) <= 1e-12;
    }
    return finish_verify(o, t, ok, "contour integrals outside tolerance");
}

int verify_runge(const Options& o)
{
    const ConvergenceTable table = runge_table(o.node_counts);
    ResultTable t{{"nodes", "error", "ratio", "node_residual"}, {}};
    bool ok = table.strictly_increasing_errors();
    for (const auto& r : table.rows()) {
        const auto P = runge_interpolant(unsigned(r.parameter));
        double res = 0.0;
        for (std::size_t i = 0; i < P.size(); ++i)
            res = std::max(res, std::abs(P(P.nodes()[i]) - P.values()[i]) / std::max(1.0, std::abs(P.values()[i])));
        ok = ok && res <= 1e-10;
        t.add({r.parameter, r.error, r.ratio, res});
    }
    return finish_verify(o, t, ok, "interpolation errors are not strictly increasing");
}

int verify_rotation_rank(const Options& o)
{
    const std::size_t d = o.dim.value_or(3);
    const unsigned j = o.degree;
    const auto basis = hp_basis(d, j);
    const MPoly p = o.poly.empty() ? basis.front() : load_poly(o, Field::Real);
    const std::size_t R = o.rotations ? o.rotations : 3 * basis.size();
    const std::size_t rank = rotation_span_rank(p, d, j, R, need_seed(o));
    ResultTable t{{"d", "j", "rotations", "hp_dimension", "rank"}, {}};
    t.add({double(d), double(j), double(R), double(basis.size()), double(rank)});
    return finish_verify(o, t, rank == basis.size(), "rotation span is smaller than the harmonic space");
}

int verify_fundamental(const Options& o)
{
    const std::size_t d = o.dim.value_or(3);
    const unsigned n = o.degree;
    const std::size_t N = o.rotations ? o.rotations : hp_dimension(d, n);
    std::mt19937_64 rng(need_seed(o));
    const auto pts = random_sphere_points(N, d, rng);
    const auto res = fundamental_system_det(pts, n, gegenbauer_lambda(d));
    if (!res.count_matches) std::cerr << "warning: " << N << " points, but dim HP = " << res.expected_count << "\n";
    ResultTable t{{"d", "n", "points", "hp_dimension", "det"}, {}};
    t.add({double(d), double(n), double(N), double(res.expected_count), res.det});
    return finish_verify(o, t, res.det > 0.0 && res.count_matches, "points do not form a fundamental system");
}

// ---- report ----

int run_report(const Options& o)
{
    if (o.input.empty()) throw UsageError("-i is required");
    const NetworkDocument doc = load_document(o.input);
    const Json& meta = doc.construction;
    std::cout << "kind: " << kind_name(doc.net) << "\nfield: " << to_string(io_detail::field_of(doc.net)) << "\n";
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, ShallowNet>) {
                std::cout << "activation: " << family_name(x.activation().family()) << "\ndim: " << x.dim() << "\nneurons: " << x.size()
                          << "\nparam_count: " << param_count(x) << "\nformula (d+2)n: " << shallow_param_formula(x.dim(), x.size()) << "\n";
            } else if constexpr (std::is_same_v<T, ResNet>) {
                std::cout << "activation: " << family_name(x.activation().family()) << "\ninput_dim: " << x.input_dim()
                          << "\ninner_dim: " << x.inner_dim() << "\nblocks: " << x.blocks().size()
                          << "\nmax_block_width: " << x.max_block_width() << "\nparam_count: " << param_count(x) << "\n";
                if (meta.value("builder", "") == "resnet_from_shallow") {
                    const auto d = meta.at("d").get<std::size_t>(), n = meta.at("n").get<std::size_t>();
                    std::cout << "formula 2(n+1)(d+1)+n: " << resnet_embedding_param_formula(d, n)
                              << "\nterm sum (d+1)(d+2)+(2d+3)n: " << resnet_embedding_param_sum(d, n) << "\n";
                }
            } else if constexpr (std::is_same_v<T, MLP> || std::is_same_v<T, DenseNet>) {
                const auto w = x.widths();
                std::cout << "activation: " << family_name(x.activation().family()) << "\nwidths: " << widths_string(w)
                          << "\nparam_count: " << param_count(x) << "\n";
                if constexpr (std::is_same_v<T, MLP>) std::cout << "formula sum(d_{l-1}d_l + d_l): " << mlp_param_formula(w) << "\n";
                else std::cout << "formula sum(n_l d_l + d_l): " << densenet_param_formula(w) << "\n";
            } else {
                std::cout << "activation: " << x.activation().name << "\ndim: " << x.dim() << "\nk: " << x.k() << "\nterms: " << x.terms().size()
                          << "\nparam_count: " << param_count(x) << "\n";
            }
        },
        doc.net);
    if (!meta.empty()) std::cout << "construction: " << meta.dump() << "\n";
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Explicit approximation-network constructions: build, embed, eval, verify, report"};
    app.require_subcommand(1);
    Options o;

    auto add_io = [&](CLI::App* c, bool in, bool out) {
        if (in) c->add_option("-i,--input", o.input, "input network document");
        if (out) c->add_option("-o,--output", o.output, "output path");
    };
    auto add_act = [&](CLI::App* c) {
        c->add_option("--field", o.field, "R or C")->check(CLI::IsMember({"R", "C"}));
        c->add_option("--activation", o.activation, "exp, sin, cos, sinh, cosh, square, identity, cube, poly, relu, leaky-relu");
        c->add_option("--coeffs", o.coeffs, "coefficients for --activation poly, lowest first")->delimiter(',');
        c->add_option("--slope", o.slope, "leaky ReLU slope");
    };
    auto add_seed = [&](CLI::App* c) { c->add_option("--seed", o.seed, "random seed"); };

    std::function<int()> action;
    auto on = [&](CLI::App* c, int (*fn)(const Options&)) { c->callback([&action, &o, fn] { action = [&o, fn] { return fn(o); }; }); };

    auto* build = app.add_subcommand("build", "construct a network")->require_subcommand(1);
    {
        auto* c = build->add_subcommand("shallow-monomial", "finite-difference monomial network");
        add_act(c);
        add_io(c, false, true);
        auto* deg = c->add_option("--degree", o.degree, "monomial degree m");
        auto* index = c->add_option("--index", o.index, "multi-index e1,...,ed (multivariate monomial)")->delimiter(',');
        deg->excludes(index);
        c->add_option("--gamma", o.gamma, "difference step");
        c->add_option("--beta", o.beta, "direction step for multi-indices");
        c->add_flag("--pure", o.pure, "divide by alpha_m to approximate z^m itself");
        // callback() and final_callback() share one slot in CLI11, so the check lives here.
        c->callback([&action, &o, deg, index] {
            if (deg->count() == 0 && index->count() == 0) throw CLI::RequiredError("--degree or --index");
            action = [&o] { return build_shallow_monomial(o); };
        });
    }
    {
        auto* c = build->add_subcommand("shallow-poly", "shallow network for a polynomial (CSV e1..ed,re[,im])");
        add_act(c);
        add_io(c, false, true);
        c->add_option("--poly", o.poly, "polynomial CSV")->required();
        c->add_option("--dim", o.dim, "number of variables (default: inferred)");
        c->add_option("--gamma", o.gamma, "difference step");
        c->add_option("--beta", o.beta, "second difference step");
        on(c, build_shallow_poly);
    }
    {
        auto* c = build->add_subcommand("resnet-poly", "residual network for a polynomial");
        add_act(c);
        add_io(c, false, true);
        c->add_option("--poly", o.poly, "polynomial CSV")->required();
        c->add_option("--dim", o.dim, "number of variables (default: inferred)");
        c->add_option("--step", o.h, "product step for non-square activations");
        c->add_option("--zstar", o.zstar, "base point with sigma''(z*) != 0");
        on(c, build_resnet_poly);
    }
    {
        auto* c = build->add_subcommand("relu-c2", "ReLU Riemann-sum network for a C2 function");
        add_io(c, false, true);
        c->add_option("--function", o.function, "square, exp, sin, cube");
        c->add_option("--interval", o.interval, "a,b")->delimiter(',');
        c->add_option("--nodes", o.nodes, "Riemann nodes T")->required();
        on(c, build_relu_c2);
    }
    {
        auto* c = build->add_subcommand("relu-maxaffine", "ReLU residual network for max{0, pieces} (or a dc difference)");
        add_io(c, false, true);
        c->add_option("--pieces", o.pieces, "CSV rows w1,...,wd,b")->required();
        c->add_option("--minus", o.minus_pieces, "second piece list: build max(f1) - max(f2)");
        on(c, build_relu_maxaffine);
    }
    {
        auto* c = build->add_subcommand("harmonic-net", "random harmonic network");
        add_io(c, false, true);
        add_seed(c);
        c->add_option("--activation", o.harmonic_activation, "quadratic, cubic, expcos, square_u")
            ->check(CLI::IsMember({"quadratic", "cubic", "expcos", "square_u"}));
        c->add_option("--dim", o.dim, "ambient dimension d (default 3)");
        c->add_option("--terms", o.terms, "number of terms");
        c->add_flag("--allow-nonharmonic", o.allow_nonharmonic, "accept a non-harmonic activation (negative control)");
        on(c, build_harmonic_net);
    }

    auto* embed = app.add_subcommand("embed", "embed a shallow network into a deep architecture")->require_subcommand(1);
    {
        auto* c = embed->add_subcommand("resnet", "exact residual embedding");
        add_io(c, true, true);
        c->add_option("--widths", o.widths, "block widths summing to n")->delimiter(',');
        on(c, embed_resnet);
    }
    {
        auto* c = embed->add_subcommand("mlp", "fully connected embedding (exact on a box for ReLU)");
        add_io(c, true, true);
        c->add_option("--widths", o.widths, "unit counts per hidden layer summing to n")->delimiter(',');
        c->add_option("--epsilon", o.epsilon, "linearization scale");
        c->add_option("--zstar", o.zstar, "base point with sigma'(z*) != 0");
        c->add_option("--box", o.box, "lo,hi for the ReLU box [lo,hi]^d")->delimiter(',');
        on(c, embed_mlp);
    }
    {
        auto* c = embed->add_subcommand("densenet", "exact DenseNet embedding of a shallow network or MLP");
        add_io(c, true, true);
        c->add_option("--widths", o.widths, "layer widths for a shallow source")->delimiter(',');
        on(c, embed_densenet);
    }

    {
        auto* c = app.add_subcommand("eval", "evaluate a network at CSV points");
        add_io(c, true, true);
        c->add_option("--points", o.points, "CSV points, re,im pairs for complex networks")->required();
        on(c, run_eval);
    }

    auto* verify = app.add_subcommand("verify", "numerical checks; exit 1 when a check fails")->require_subcommand(1);
    {
        auto* c = verify->add_subcommand("convergence", "error table over a shrinking parameter");
        add_act(c);
        add_io(c, false, true);
        add_seed(c);
        c->add_option("--builder", o.builder, "shallow-monomial, resnet-poly-general, mlp-embed, relu-c2")->check(CLI::IsMember(study_ids()));
        c->add_option("--degree", o.degree, "monomial degree / target power");
        c->add_option("--params", o.params, "parameter list")->delimiter(',')->required();
        c->add_option("--dim", o.dim, "grid dimension (default 1)");
        c->add_option("--widths", o.widths, "hidden widths for mlp-embed")->delimiter(',');
        c->add_option("--zstar", o.zstar, "base point");
        c->add_option("--max-ratio", o.max_ratio, "largest acceptable successive ratio");
        on(c, verify_convergence);
    }
    {
        auto* c = verify->add_subcommand("harmonic", "FD Laplacian of a harmonic network at random points");
        add_io(c, true, true);
        add_seed(c);
        c->add_option("--points", o.count, "number of sample points");
        c->add_option("--step", o.h, "FD step");
        c->add_option("--tol", o.tol, "tolerance on max |laplacian|");
        on(c, verify_harmonic);
    }
    {
        auto* c = verify->add_subcommand("cauchy", "contour integrals of z^{k-1}p against z^{-1}");
        add_io(c, false, true);
        c->add_option("--k", o.k, "power k >= 1");
        c->add_option("--annulus", o.annulus, "r,R")->delimiter(',');
        c->add_option("--degree", o.degree, "test monomials 1..z^degree");
        c->add_option("--nodes", o.nodes, "trapezoid nodes");
        on(c, verify_cauchy);
    }
    {
        auto* c = verify->add_subcommand("runge", "equidistant interpolation errors for 1/(1+25x^2)");
        add_io(c, false, true);
        c->add_option("--nodes", o.node_counts, "node counts")->delimiter(',');
        on(c, verify_runge);
    }
    {
        auto* c = verify->add_subcommand("rotation-rank", "dimension of the span of rotated harmonic polynomials");
        add_io(c, false, true);
        add_seed(c);
        c->add_option("--degree", o.degree, "degree j")->required();
        c->add_option("--dim", o.dim, "dimension d (default 3)");
        c->add_option("--rotations", o.rotations, "number of random rotations (default 3 dim HP)");
        c->add_option("--poly", o.poly, "harmonic polynomial CSV (default: first basis element)");
        on(c, verify_rotation_rank);
    }
    {
        auto* c = verify->add_subcommand("fundamental", "Gegenbauer determinant of random sphere points");
        add_io(c, false, true);
        add_seed(c);
        c->add_option("--degree", o.degree, "degree n")->required();
        c->add_option("--dim", o.dim, "dimension d >= 3 (default 3)");
        c->add_option("--count", o.rotations, "number of points (default dim HP)");
        on(c, verify_fundamental);
    }

    {
        auto* c = app.add_subcommand("report", "architecture summary and parameter counts");
        add_io(c, true, false);
        on(c, run_report);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }
    try {
        return action ? action() : kUsage;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "precondition: " << e.what() << "\n";
        return kPrecondition;
    } catch (const std::domain_error& e) {
        std::cerr << "precondition: " << e.what() << "\n";
        return kPrecondition;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
}
