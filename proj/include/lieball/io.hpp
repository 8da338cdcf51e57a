#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "complex_geometry.hpp"
#include "errors.hpp"
#include "function_spec.hpp"
#include "harmonic_basis.hpp"
#include "holo_continuation.hpp"
#include "lf_transform.hpp"
#include "verification.hpp"

// JSON schemas of the lieball/1 artifact family.

namespace lieball::io {

using json = nlohmann::json;

inline constexpr const char* format_version = "lieball/1";

/// Malformed input file; the message carries line and column.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError(path.string(), "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline json parse_json(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // Recompute line/column from the byte offset.
        std::size_t line = 1, col = 1;
        const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ParseError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON (" +
                         e.what() + ")");
    }
}

inline json load_json(const std::filesystem::path& path) { return parse_json(read_file(path), path.string()); }

/// Writes through a temporary file in the same directory and renames it into place.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.empty()) throw ValidationError("out", "output path is empty");
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("out", "cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

/// %.17g, the CSV number format.
inline std::string g17(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Field access with errors that name the field.

template <typename T>
T get_field(const json& j, const std::string& key, const std::string& where) {
    const std::string field = where.empty() ? key : where + "." + key;
    if (!j.is_object() || !j.contains(key)) throw ValidationError(field, "missing field");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ValidationError(field, "wrong type");
    }
}

inline double get_number(const json& j, const std::string& key, const std::string& where) {
    const std::string field = where.empty() ? key : where + "." + key;
    if (!j.is_object() || !j.contains(key)) throw ValidationError(field, "missing field");
    if (!j.at(key).is_number()) throw ValidationError(field, "expected a number");
    return j.at(key).get<double>();
}

inline std::vector<double> get_reals(const json& j, const std::string& field) {
    if (!j.is_array()) throw ValidationError(field, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) throw ValidationError(field, "expected an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

/// Infinity has no JSON literal; it is written as null.
inline json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// ---------------------------------------------------------------------------
// FunctionSpec

inline json to_json(const ComplexPolynomial& p) {
    json terms = json::array();
    for (const auto& [alpha, c] : p.terms()) terms.push_back({{"alpha", alpha}, {"re", c.real()}, {"im", c.imag()}});
    return terms;
}

inline ComplexPolynomial polynomial_from_json(const json& terms, int n, const std::string& where) {
    if (!terms.is_array()) throw ValidationError(where, "expected an array of terms");
    ComplexPolynomial p(n);
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const auto& t = terms[i];
        const std::string w = where + "[" + std::to_string(i) + "]";
        if (!t.is_object() || !t.contains("alpha")) throw ValidationError(w + ".alpha", "missing field");
        const auto& a = t.at("alpha");
        if (!a.is_array()) throw ValidationError(w + ".alpha", "expected an array of integers");
        MultiIndex alpha;
        for (const auto& e : a) {
            if (!e.is_number_integer()) throw ValidationError(w + ".alpha", "expected an array of integers");
            alpha.push_back(e.get<int>());
        }
        if (static_cast<int>(alpha.size()) != n) throw ValidationError(w + ".alpha", "length must equal n");
        for (int v : alpha)
            if (v < 0) throw ValidationError(w + ".alpha", "exponents must be >= 0");
        const double re = t.contains("re") ? get_number(t, "re", w) : 0.0;
        const double im = t.contains("im") ? get_number(t, "im", w) : 0.0;
        if (!std::isfinite(re) || !std::isfinite(im)) throw ValidationError(w, "coefficient must be finite");
        p.add_term(alpha, cplx(re, im));
    }
    return p;
}

inline json to_json(const FunctionSpec& s) {
    json params;
    switch (s.kind) {
    case FunctionKind::polynomial: params = to_json(s.poly); break;
    case FunctionKind::inverse_quadratic: params = {{"a", s.a}}; break;
    case FunctionKind::newton_kernel: params = {{"pole", s.pole}}; break;
    case FunctionKind::exp_linear: params = {{"direction", s.direction}}; break;
    }
    return {{"kind", std::string(to_string(s.kind))}, {"n", s.n}, {"R", s.R}, {"params", params}};
}

inline FunctionSpec spec_from_json(const json& j) {
    if (!j.is_object()) throw ValidationError("spec", "expected a JSON object");
    FunctionSpec s;
    s.kind = function_kind_from_string(get_field<std::string>(j, "kind", ""));
    if (!j.contains("n") || !j.at("n").is_number_integer()) throw ValidationError("n", "expected an integer");
    s.n = j.at("n").get<int>();
    s.R = get_number(j, "R", "");
    if (!j.contains("params")) throw ValidationError("params", "missing field");
    const json& p = j.at("params");
    if (s.n < 2) throw ValidationError("n", "dimension must be >= 2");
    switch (s.kind) {
    case FunctionKind::polynomial:
        if (p.is_object() && p.contains("terms"))
            s.poly = polynomial_from_json(p.at("terms"), s.n, "params.terms");
        else
            s.poly = polynomial_from_json(p, s.n, "params");
        break;
    case FunctionKind::inverse_quadratic: s.a = get_number(p, "a", "params"); break;
    case FunctionKind::newton_kernel:
        if (!p.is_object() || !p.contains("pole")) throw ValidationError("params.pole", "missing field");
        s.pole = get_reals(p.at("pole"), "params.pole");
        break;
    case FunctionKind::exp_linear:
        if (!p.is_object() || !p.contains("direction")) throw ValidationError("params.direction", "missing field");
        s.direction = get_reals(p.at("direction"), "params.direction");
        break;
    }
    s.validate();
    return s;
}

// ---------------------------------------------------------------------------
// Points

inline json to_json(const ComplexPoint& z) {
    return {{"re", std::vector<double>(z.re().begin(), z.re().end())},
            {"im", std::vector<double>(z.im().begin(), z.im().end())}};
}

inline ComplexPoint point_from_json(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("re")) throw ValidationError(where + ".re", "missing field");
    auto re = get_reals(j.at("re"), where + ".re");
    std::vector<double> im(re.size(), 0.0);
    if (j.contains("im")) im = get_reals(j.at("im"), where + ".im");
    if (im.size() != re.size()) throw ValidationError(where + ".im", "length must match re");
    try {
        return ComplexPoint(std::move(re), std::move(im));
    } catch (const ValidationError& e) {
        throw ValidationError(where, e.what());
    }
}

/// {"points": [{"re": [...], "im": [...]}, ...]} or the bare array.
inline std::vector<ComplexPoint> points_from_json(const json& j) {
    const json* arr = &j;
    if (j.is_object()) {
        if (!j.contains("points")) throw ValidationError("points", "missing field");
        arr = &j.at("points");
    }
    if (!arr->is_array()) throw ValidationError("points", "expected an array of points");
    std::vector<ComplexPoint> pts;
    for (std::size_t i = 0; i < arr->size(); ++i) pts.push_back(point_from_json((*arr)[i], "points[" + std::to_string(i) + "]"));
    return pts;
}

// ---------------------------------------------------------------------------
// Expansion

/// Profile coefficients are complex in general. "coeffs" holds the real
/// parts; "coeffs_im" is present only when some imaginary part is nonzero.
inline json to_json(const LFExpansion& e) {
    json rows = json::array();
    for (const auto& row : e.profiles) {
        for (const auto& p : row) {
            std::vector<double> re, im;
            bool complex = false;
            for (const auto& c : p.coeffs) {
                re.push_back(c.real());
                im.push_back(c.imag());
                complex = complex || c.imag() != 0.0;
            }
            json r = {{"k", p.k}, {"l", p.l}, {"coeffs", re}, {"fit_residual", p.fit_residual},
                      {"source", std::string(to_string(p.source))}};
            if (complex) r["coeffs_im"] = im;
            rows.push_back(std::move(r));
        }
    }
    json meta = {{"n", e.n},
                 {"R", e.R},
                 {"K", e.K},
                 {"M", e.M},
                 {"quad_degree", e.quad_degree},
                 {"sample_radius", e.sample_radius},
                 {"scale", e.scale},
                 {"radial_nodes", e.radial_nodes}};
    json out = {{"metadata", meta}, {"diagnostics", e.diagnostics}, {"rows", rows}};
    out["spec"] = e.spec ? to_json(*e.spec) : json(nullptr);
    return out;
}

inline LFExpansion expansion_from_json(const json& j) {
    if (!j.is_object()) throw ValidationError("expansion", "expected a JSON object");
    if (j.contains("format") && j.at("format") != format_version)
        throw ValidationError("format", "unsupported format version");
    if (!j.contains("metadata")) throw ValidationError("metadata", "missing field");
    const json& m = j.at("metadata");
    LFExpansion e;
    e.n = get_field<int>(m, "n", "metadata");
    e.R = get_number(m, "R", "metadata");
    e.K = get_field<int>(m, "K", "metadata");
    e.M = get_field<int>(m, "M", "metadata");
    e.quad_degree = get_field<int>(m, "quad_degree", "metadata");
    e.sample_radius = get_number(m, "sample_radius", "metadata");
    e.scale = get_number(m, "scale", "metadata");
    if (m.contains("radial_nodes")) e.radial_nodes = get_reals(m.at("radial_nodes"), "metadata.radial_nodes");
    if (e.n < 2) throw ValidationError("metadata.n", "dimension must be >= 2");
    if (!(e.R > 0.0)) throw ValidationError("metadata.R", "radius must be positive");
    if (e.K < 0) throw ValidationError("metadata.K", "must be >= 0");
    if (j.contains("spec") && !j.at("spec").is_null()) e.spec = spec_from_json(j.at("spec"));
    if (j.contains("diagnostics")) e.diagnostics = get_field<std::vector<std::string>>(j, "diagnostics", "");
    e.bases = build_bases(e.n, e.K);
    e.profiles.resize(static_cast<std::size_t>(e.K) + 1);
    for (int k = 0; k <= e.K; ++k) e.profiles[k].resize(e.bases[k]->size());
    std::vector<std::vector<bool>> seen(e.profiles.size());
    for (int k = 0; k <= e.K; ++k) seen[k].assign(e.profiles[k].size(), false);
    if (!j.contains("rows") || !j.at("rows").is_array()) throw ValidationError("rows", "expected an array");
    const json& rows = j.at("rows");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::string w = "rows[" + std::to_string(i) + "]";
        const json& r = rows[i];
        const int k = get_field<int>(r, "k", w);
        const auto l = get_field<std::size_t>(r, "l", w);
        if (k < 0 || k > e.K) throw ValidationError(w + ".k", "out of range");
        if (l >= e.profiles[k].size()) throw ValidationError(w + ".l", "out of range");
        if (seen[k][l]) throw ValidationError(w, "duplicate (k, l)");
        seen[k][l] = true;
        ProfilePoly& p = e.profiles[k][l];
        p.k = k;
        p.l = l;
        const auto re = get_reals(r.contains("coeffs") ? r.at("coeffs") : json(), w + ".coeffs");
        std::vector<double> im(re.size(), 0.0);
        if (r.contains("coeffs_im")) im = get_reals(r.at("coeffs_im"), w + ".coeffs_im");
        if (im.size() != re.size()) throw ValidationError(w + ".coeffs_im", "length must match coeffs");
        for (std::size_t c = 0; c < re.size(); ++c) {
            if (!std::isfinite(re[c]) || !std::isfinite(im[c])) throw ValidationError(w + ".coeffs", "entries must be finite");
            p.coeffs.emplace_back(re[c], im[c]);
        }
        p.fit_residual = r.contains("fit_residual") ? get_number(r, "fit_residual", w) : 0.0;
        if (r.contains("source")) {
            const auto src = get_field<std::string>(r, "source", w);
            if (src != "exact" && src != "fitted") throw ValidationError(w + ".source", "expected exact or fitted");
            p.source = src == "exact" ? ProfileSource::exact : ProfileSource::fitted;
        }
    }
    for (int k = 0; k <= e.K; ++k)
        for (std::size_t l = 0; l < seen[k].size(); ++l)
            if (!seen[k][l])
                throw ValidationError("rows", "missing profile (k=" + std::to_string(k) + ", l=" + std::to_string(l) + ")");
    return e;
}

inline std::string expansion_csv(const LFExpansion& e) {
    std::string out = "k,l,m,re,im,fit_residual,source\n";
    for (const auto& row : e.profiles)
        for (const auto& p : row)
            for (std::size_t m = 0; m < p.coeffs.size(); ++m)
                out += std::to_string(p.k) + "," + std::to_string(p.l) + "," + std::to_string(m) + "," +
                       g17(p.coeffs[m].real()) + "," + g17(p.coeffs[m].imag()) + "," + g17(p.fit_residual) + "," +
                       std::string(to_string(p.source)) + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// Decay, continuation, reports

inline json to_json(const DecayEstimate& d) {
    return {{"rho_hat", number_or_null(d.rho_hat)},
            {"tau", d.tau},
            {"C_hat", d.C_hat},
            {"window", {d.k_min, d.k_max}},
            {"r_squared_fit", d.r_squared_fit},
            {"band_limited", d.band_limited},
            {"usable", d.usable()},
            {"max_profile", d.max_profile}};
}

inline json to_json(const std::vector<GridRow>& rows) {
    json out = json::array();
    for (const auto& r : rows)
        out.push_back({{"z", to_json(r.z)},
                       {"value", {{"re", r.value.real()}, {"im", r.value.imag()}}},
                       {"tail_bound", r.tail_bound ? json(*r.tail_bound) : json(nullptr)}});
    return out;
}

inline std::string values_csv(const std::vector<GridRow>& rows) {
    std::string out = "index,z_re,z_im,value_re,value_im,tail_bound\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::string zr, zi;
        for (int j = 0; j < rows[i].z.dim(); ++j) {
            zr += (j ? ";" : "") + g17(rows[i].z[j].real());
            zi += (j ? ";" : "") + g17(rows[i].z[j].imag());
        }
        out += std::to_string(i) + "," + zr + "," + zi + "," + g17(rows[i].value.real()) + "," +
               g17(rows[i].value.imag()) + "," + (rows[i].tail_bound ? g17(*rows[i].tail_bound) : std::string()) + "\n";
    }
    return out;
}

inline json to_json(const CheckReport& r) {
    json metrics = json::object();
    for (const auto& [k, v] : r.metrics) metrics[k] = number_or_null(v);
    return {{"name", r.name},
            {"trials", r.trials},
            {"failures", r.failures},
            {"worst_margin", number_or_null(r.worst_margin)},
            {"details", r.details},
            {"metrics", metrics}};
}

inline std::string reports_csv(const std::vector<CheckReport>& reports) {
    std::string out = "name,trials,failures,worst_margin\n";
    for (const auto& r : reports)
        out += r.name + "," + std::to_string(r.trials) + "," + std::to_string(r.failures) + "," + g17(r.worst_margin) + "\n";
    return out;
}

inline json basis_json(const HarmonicBasis& b) {
    json members = json::array();
    for (std::size_t l = 0; l < b.size(); ++l) {
        json terms = json::array();
        for (const auto& [alpha, c] : b.member(l).terms()) terms.push_back({{"alpha", alpha}, {"coeff", c}});
        members.push_back({{"l", l}, {"label", b.label(l).orders}, {"sine", b.label(l).sine}, {"terms", terms}});
    }
    return {{"n", b.dim()}, {"k", b.degree()}, {"size", b.size()}, {"members", members}};
}

inline std::string basis_csv(const HarmonicBasis& b) {
    std::string out = "l,alpha,coeff\n";
    for (std::size_t l = 0; l < b.size(); ++l)
        for (const auto& [alpha, c] : b.member(l).terms()) {
            std::string a;
            for (std::size_t j = 0; j < alpha.size(); ++j) a += (j ? ";" : "") + std::to_string(alpha[j]);
            out += std::to_string(l) + "," + a + "," + g17(c) + "\n";
        }
    return out;
}

} // namespace lieball::io
