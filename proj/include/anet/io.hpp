#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "anet/deep.hpp"
#include "anet/harmonic.hpp"
#include "anet/networks.hpp"
#include "anet/shallow.hpp"

namespace anet {

/// Malformed document or table; the CLI maps it to a usage error.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Json = nlohmann::json;
using AnyNetwork = std::variant<ShallowNet, ResNet, MLP, DenseNet, HarmonicNet>;

inline constexpr int kSchemaVersion = 1;

/// A network plus optional free-form construction metadata.
struct NetworkDocument {
    AnyNetwork net;
    Json construction = Json::object();
};

inline std::string_view kind_name(const AnyNetwork& n)
{
    static constexpr std::string_view names[] = {"shallow", "resnet", "mlp", "densenet", "harmonic"};
    return names[n.index()];
}

namespace io_detail {

inline Json scalar_json(Scalar z, Field f)
{
    if (f == Field::Real) return z.real();
    return Json::array({z.real(), z.imag()});
}

inline double number(const Json& j, const char* what)
{
    if (!j.is_number()) throw ParseError(std::string(what) + ": expected a number");
    return j.get<double>();
}

inline Scalar scalar_from(const Json& j, Field f, const char* what)
{
    if (f == Field::Real) {
        if (j.is_array()) throw ParseError(std::string(what) + ": complex pair under the Real tag");
        return number(j, what);
    }
    if (!j.is_array() || j.size() != 2) throw ParseError(std::string(what) + ": expected an [re, im] pair");
    return {number(j[0], what), number(j[1], what)};
}

inline Json vector_json(std::span<const Scalar> v, Field f)
{
    Json a = Json::array();
    for (const auto& z : v) a.push_back(scalar_json(z, f));
    return a;
}

inline ScalarVec vector_from(const Json& j, Field f, const char* what)
{
    if (!j.is_array()) throw ParseError(std::string(what) + ": expected an array");
    ScalarVec v;
    for (const auto& e : j) v.push_back(scalar_from(e, f, what));
    return v;
}

inline Json matrix_json(const Matrix& m, Field f)
{
    Json data = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(scalar_json(m(r, c), f));
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

inline Matrix matrix_from(const Json& j, Field f, const char* what)
{
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data"))
        throw ParseError(std::string(what) + ": expected {rows, cols, data}");
    const auto rows = j["rows"].get<Eigen::Index>();
    const auto cols = j["cols"].get<Eigen::Index>();
    const auto& data = j["data"];
    if (rows < 0 || cols < 0 || !data.is_array() || Eigen::Index(data.size()) != rows * cols)
        throw ParseError(std::string(what) + ": data length does not match rows*cols");
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = scalar_from(data[std::size_t(r * cols + c)], f, what);
    return m;
}

inline Json rvec_json(const Vector& v, Field f)
{
    return vector_json(std::span<const Scalar>(v.data(), std::size_t(v.size())), f);
}

inline Vector rvec_from(const Json& j, Field f, const char* what)
{
    const ScalarVec s = vector_from(j, f, what);
    return detail::to_vector(s);
}

inline Json activation_json(const Activation& a)
{
    Json j{{"family", family_name(a.family())}};
    if (a.family() == Family::Polynomial) j["coeffs"] = vector_json(a.coeffs(), a.field());
    if (a.family() == Family::LeakyReLU) j["slope"] = a.slope();
    return j;
}

inline Activation activation_from(const Json& j, Field f)
{
    if (!j.is_object() || !j.contains("family") || !j["family"].is_string()) throw ParseError("activation: missing family");
    const Family fam = parse_family(j["family"].get<std::string>());
    std::vector<Scalar> coeffs;
    double slope = 0.0;
    if (fam == Family::Polynomial) {
        if (!j.contains("coeffs")) throw ParseError("activation: polynomial needs coeffs");
        coeffs = vector_from(j["coeffs"], f, "activation coeffs");
    }
    if (fam == Family::LeakyReLU) slope = number(j.value("slope", Json()), "activation slope");
    return Activation(fam, f, std::move(coeffs), slope);
}

inline Json mpoly_json(const MPoly& p)
{
    Json terms = Json::array();
    for (const auto& [m, c] : p.graded_terms()) terms.push_back({{"e", m.exponents}, {"c", scalar_json(c, p.field())}});
    return {{"dim", p.dim()}, {"terms", std::move(terms)}};
}

inline MPoly mpoly_from(const Json& j, Field f)
{
    MPoly p(j.at("dim").get<std::size_t>(), f);
    for (const auto& t : j.at("terms")) p.add_term(MultiIndex(t.at("e").get<std::vector<unsigned>>()), scalar_from(t.at("c"), f, "polynomial coefficient"));
    return p;
}

inline Json layers_json(const std::vector<Layer>& layers, Field f)
{
    Json a = Json::array();
    for (const auto& l : layers) a.push_back({{"A", matrix_json(l.A, f)}, {"b", rvec_json(l.b, f)}});
    return a;
}

inline std::vector<Layer> layers_from(const Json& j, Field f)
{
    if (!j.is_array()) throw ParseError("layers: expected an array");
    std::vector<Layer> out;
    for (const auto& l : j) out.push_back({matrix_from(l.at("A"), f, "layer weight"), rvec_from(l.at("b"), f, "layer bias")});
    return out;
}

inline Json dmatrix_json(const Eigen::MatrixXd& m)
{
    Json data = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

inline Eigen::MatrixXd dmatrix_from(const Json& j)
{
    const Matrix m = matrix_from(j, Field::Real, "projection");
    return m.real();
}

struct Encoder {
    Json& out;

    void operator()(const ShallowNet& s) const
    {
        const Field f = s.field();
        out["dim"] = s.dim();
        out["activation"] = activation_json(s.activation());
        Json ns = Json::array();
        for (const auto& n : s.neurons())
            ns.push_back({{"a", scalar_json(n.a, f)}, {"w", vector_json(n.w, f)}, {"b", scalar_json(n.b, f)}});
        out["neurons"] = std::move(ns);
    }
    void operator()(const ResNet& r) const
    {
        const Field f = r.field();
        out["activation"] = activation_json(r.activation());
        out["entry"] = matrix_json(r.entry(), f);
        out["entry_bias"] = rvec_json(r.entry_bias(), f);
        Json bs = Json::array();
        for (const auto& b : r.blocks())
            bs.push_back({{"A", matrix_json(b.A, f)}, {"W", matrix_json(b.W, f)}, {"b", rvec_json(b.b, f)}});
        out["blocks"] = std::move(bs);
        out["exit"] = matrix_json(r.exit(), f);
    }
    void operator()(const MLP& m) const
    {
        out["activation"] = activation_json(m.activation());
        out["layers"] = layers_json(m.layers(), m.field());
    }
    void operator()(const DenseNet& m) const
    {
        out["activation"] = activation_json(m.activation());
        out["input_dim"] = m.input_dim();
        out["layers"] = layers_json(m.layers(), m.field());
    }
    void operator()(const HarmonicNet& h) const
    {
        Json act{{"name", h.activation().name}, {"k", h.k()}};
        if (h.activation().poly) act["poly"] = mpoly_json(*h.activation().poly);
        out["activation"] = std::move(act);
        out["dim"] = h.dim();
        Json ts = Json::array();
        for (const auto& t : h.terms()) ts.push_back({{"a", t.a}, {"rho", t.rho}, {"P", dmatrix_json(t.P.matrix())}, {"b", t.b}});
        out["terms"] = std::move(ts);
    }
};

inline Field field_of(const AnyNetwork& n)
{
    return std::visit(
        [](const auto& x) {
            if constexpr (std::is_same_v<std::decay_t<decltype(x)>, HarmonicNet>) return Field::Real;
            else return x.field();
        },
        n);
}

inline HarmonicActivation harmonic_activation_from(const Json& j)
{
    const auto name = j.at("name").get<std::string>();
    if (j.contains("poly")) return HarmonicActivation::from_poly(mpoly_from(j["poly"], Field::Real), name);
    return HarmonicActivation::by_name(name);
}

} // namespace io_detail

inline Json to_json(const NetworkDocument& doc)
{
    Json j{{"schema", kSchemaVersion}, {"kind", kind_name(doc.net)}, {"field", to_string(io_detail::field_of(doc.net))}};
    std::visit(io_detail::Encoder{j}, doc.net);
    if (!doc.construction.empty()) j["construction"] = doc.construction;
    return j;
}

inline NetworkDocument document_from_json(const Json& j)
{
    try {
        if (!j.is_object()) throw ParseError("network document: expected a JSON object");
        if (j.value("schema", -1) != kSchemaVersion) throw ParseError("network document: unsupported or missing schema version");
        const auto kind = j.at("kind").get<std::string>();
        const Field f = parse_field(j.at("field").get<std::string>());
        Json meta = j.value("construction", Json::object());
        using namespace io_detail;
        if (kind == "shallow") {
            const Activation act = activation_from(j.at("activation"), f);
            ShallowNet s(j.at("dim").get<std::size_t>(), act);
            for (const auto& n : j.at("neurons"))
                s.add({scalar_from(n.at("a"), f, "neuron a"), vector_from(n.at("w"), f, "neuron w"), scalar_from(n.at("b"), f, "neuron b")});
            return {std::move(s), std::move(meta)};
        }
        if (kind == "resnet") {
            std::vector<ResBlock> blocks;
            for (const auto& b : j.at("blocks"))
                blocks.push_back({matrix_from(b.at("A"), f, "block A"), matrix_from(b.at("W"), f, "block W"), rvec_from(b.at("b"), f, "block b")});
            return {ResNet(activation_from(j.at("activation"), f), matrix_from(j.at("entry"), f, "entry"),
                           rvec_from(j.at("entry_bias"), f, "entry bias"), std::move(blocks), matrix_from(j.at("exit"), f, "exit")),
                    std::move(meta)};
        }
        if (kind == "mlp") return {MLP(activation_from(j.at("activation"), f), layers_from(j.at("layers"), f)), std::move(meta)};
        if (kind == "densenet")
            return {DenseNet(activation_from(j.at("activation"), f), j.at("input_dim").get<std::size_t>(), layers_from(j.at("layers"), f)),
                    std::move(meta)};
        if (kind == "harmonic") {
            if (f != Field::Real) throw ParseError("harmonic network must use the Real tag");
            HarmonicActivation act = harmonic_activation_from(j.at("activation"));
            std::vector<HarmonicTerm> terms;
            for (const auto& t : j.at("terms"))
                terms.push_back({number(t.at("a"), "term a"), number(t.at("rho"), "term rho"), OrthProjection(dmatrix_from(t.at("P"))),
                                 t.at("b").get<std::vector<double>>()});
            const auto dim = j.at("dim").get<std::size_t>();
            // A stored non-harmonic activation is a deliberate negative control.
            const bool harmonic = !act.poly || symbolic_laplacian(*act.poly).is_zero();
            return {harmonic ? HarmonicNet(std::move(act), dim, std::move(terms)) : HarmonicNet::unchecked(std::move(act), dim, std::move(terms)),
                    std::move(meta)};
        }
        throw ParseError("network document: unknown kind '" + kind + "'");
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception& e) {
        throw ParseError(std::string("network document: ") + e.what());
    }
}

inline std::string serialize(const NetworkDocument& doc) { return to_json(doc).dump(2) + "\n"; }

inline NetworkDocument parse_document(std::string_view text)
{
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ParseError(std::string("network document: ") + e.what());
    }
    return document_from_json(j);
}

inline NetworkDocument load_document(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_document(ss.str());
}

inline void save_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
}

// ---- CSV ----

/// 17 significant digits, enough to round-trip any double.
inline std::string format_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct ResultTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    void add(std::vector<double> row)
    {
        if (row.size() != header.size()) throw std::invalid_argument("ResultTable: row width differs from header");
        rows.push_back(std::move(row));
    }
};

inline void write_table(std::ostream& os, const ResultTable& t)
{
    for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << t.header[i];
    os << "\n";
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_number(r[i]);
        os << "\n";
    }
}

inline std::string table_string(const ResultTable& t)
{
    std::ostringstream os;
    write_table(os, t);
    return os.str();
}

namespace io_detail {

inline std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::optional<double> to_double(const std::string& cell)
{
    double v = 0.0;
    const char* first = cell.data();
    if (!cell.empty() && cell[0] == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) return std::nullopt;
    return v;
}

} // namespace io_detail

/// Numeric CSV rows. Blank lines are skipped; a non-numeric first line is a
/// header. Errors carry the 1-based line number.
inline std::vector<std::vector<double>> read_numeric_csv(std::istream& in, std::vector<std::string>* header = nullptr)
{
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (io_detail::trim(line).empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(io_detail::trim(cell));
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        std::vector<double> row;
        bool numeric = true;
        for (const auto& c : cells) {
            const auto v = io_detail::to_double(c);
            if (!v) {
                numeric = false;
                break;
            }
            row.push_back(*v);
        }
        if (!numeric) {
            if (first_content) {
                if (header) *header = cells;
                first_content = false;
                continue;
            }
            throw ParseError("line " + std::to_string(lineno) + ": non-numeric cell");
        }
        first_content = false;
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError("line " + std::to_string(lineno) + ": expected " + std::to_string(rows.front().size()) + " columns, got " +
                             std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Points for a network of input dimension `dim`: d columns under Real, or
/// (re, im) column pairs per coordinate under Complex.
inline std::vector<ScalarVec> read_points_csv(std::istream& in, std::size_t dim, Field f)
{
    const std::size_t cols = f == Field::Real ? dim : 2 * dim;
    std::vector<ScalarVec> pts;
    std::string line;
    std::size_t lineno = 0;
    bool first_content = true;
    // Re-read line by line to report the exact line of a width mismatch.
    while (std::getline(in, line)) {
        ++lineno;
        if (io_detail::trim(line).empty()) continue;
        std::istringstream one(line);
        std::vector<std::string> hdr;
        const auto r = read_numeric_csv(one, &hdr);
        if (r.empty()) {
            if (!first_content) throw ParseError("line " + std::to_string(lineno) + ": non-numeric cell");
            first_content = false;
            continue;
        }
        first_content = false;
        const auto& row = r.front();
        if (row.size() != cols)
            throw ParseError("line " + std::to_string(lineno) + ": expected " + std::to_string(cols) + " columns (" +
                             (f == Field::Real ? "one per coordinate" : "re,im per coordinate") + "), got " + std::to_string(row.size()));
        ScalarVec z(dim);
        for (std::size_t i = 0; i < dim; ++i) z[i] = f == Field::Real ? Scalar(row[i]) : Scalar(row[2 * i], row[2 * i + 1]);
        pts.push_back(std::move(z));
    }
    return pts;
}

/// Polynomial rows `e1,…,ed,re[,im]`. Without an explicit dimension, a header
/// naming the columns decides it; otherwise d = columns-1 (Real) or
/// columns-2 (Complex).
inline MPoly read_poly_csv(std::istream& in, Field f, std::optional<std::size_t> dim = std::nullopt)
{
    std::vector<std::string> header;
    const auto rows = read_numeric_csv(in, &header);
    if (rows.empty()) throw ParseError("polynomial file has no terms");
    const std::size_t cols = rows.front().size();
    std::size_t d = 0;
    bool has_im = false;
    if (dim) {
        d = *dim;
    } else if (!header.empty()) {
        d = std::size_t(std::count_if(header.begin(), header.end(), [](const std::string& h) { return !h.empty() && h[0] == 'e'; }));
    } else {
        if (cols < (f == Field::Real ? 2u : 3u)) throw ParseError("line 1: too few columns for a polynomial term");
        d = f == Field::Real ? cols - 1 : cols - 2;
    }
    if (cols == d + 2) has_im = true;
    else if (cols != d + 1) throw ParseError("polynomial file: expected " + std::to_string(d + 1) + " or " + std::to_string(d + 2) + " columns");
    if (d == 0) throw ParseError("polynomial file: no exponent columns");
    MPoly p(d, f);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        std::vector<unsigned> e(d);
        for (std::size_t i = 0; i < d; ++i) {
            if (row[i] < 0 || row[i] != std::floor(row[i]) || row[i] > 64)
                throw ParseError("polynomial row " + std::to_string(r + 1) + ": exponents must be integers in [0, 64]");
            e[i] = unsigned(row[i]);
        }
        const Scalar c(row[d], has_im ? row[d + 1] : 0.0);
        if (f == Field::Real && c.imag() != 0.0) throw ParseError("polynomial row " + std::to_string(r + 1) + ": imaginary part under the Real tag");
        p.add_term(MultiIndex(std::move(e)), c);
    }
    return p;
}

inline void write_poly_csv(std::ostream& os, const MPoly& p)
{
    for (std::size_t i = 0; i < p.dim(); ++i) os << "e" << (i + 1) << ",";
    os << "re" << (p.field() == Field::Complex ? ",im" : "") << "\n";
    for (const auto& [m, c] : p.graded_terms()) {
        for (auto e : m.exponents) os << e << ",";
        os << format_number(c.real());
        if (p.field() == Field::Complex) os << "," << format_number(c.imag());
        os << "\n";
    }
}

} // namespace anet
