#pragma once

// JSON (de)serialization. Complex scalars are [re, im] pairs or a single real;
// each part may be a JSON number or, on the exact backend, a string such as
// "3/4", "sqrt3/2" or "1-2*sqrt3". Output keys are ordered canonically.

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ncg/lefschetz.hpp"

namespace ncg::io {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

inline json read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ValidationError("'" + path + "' is not valid JSON: " + e.what());
    }
}

inline const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");
    return j.at(key);
}

inline size_t to_size(const json& j, const char* what) {
    if (!j.is_number_integer() || j.get<long long>() < 0)
        throw ValidationError(std::string(what) + " must be a nonnegative integer");
    return j.get<size_t>();
}

// ---------------------------------------------------------------------------
// scalars

inline QuadSqrt3 quad_from_json(const json& j) {
    if (j.is_number_integer()) return QuadSqrt3(Rational(j.get<long>()));
    if (j.is_number_float()) {
        double d = j.get<double>();
        if (!std::isfinite(d)) throw ValidationError("non-finite number");
        return QuadSqrt3(Rational(d));  // exact binary value
    }
    if (j.is_string()) return QuadSqrt3::parse(j.get<std::string>());
    throw ValidationError("expected a number or an exact string, got " + j.dump());
}

inline json quad_to_json(const QuadSqrt3& q) {
    if (q.is_rational() && q.rational_part().get_den() == 1 && q.rational_part().get_num().fits_slong_p())
        return q.rational_part().get_num().get_si();
    return q.to_string();
}

template <class S>
S scalar_from_json(const json& j) {
    QuadSqrt3 re, im;
    if (j.is_array()) {
        if (j.size() != 2) throw ValidationError("complex scalar must be [re, im]");
        re = quad_from_json(j[0]);
        im = quad_from_json(j[1]);
    } else {
        re = quad_from_json(j);
    }
    return scalar_traits<S>::from_quad(re, im);
}

template <class S>
json scalar_to_json(const S& x) {
    if constexpr (std::is_same_v<S, ExactComplex>) {
        return json::array({quad_to_json(x.re()), quad_to_json(x.im())});
    } else {
        return json::array({x.real(), x.imag()});
    }
}

// ---------------------------------------------------------------------------
// matrices, algebras, elements

template <class S>
Matrix<S> matrix_from_json(const json& j) {
    if (!j.is_array()) throw ValidationError("matrix must be a list of rows");
    size_t rows = j.size();
    size_t cols = rows ? j[0].size() : 0;
    Matrix<S> m(rows, cols);
    for (size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array() || j[i].size() != cols) throw ValidationError("matrix rows have different lengths");
        for (size_t k = 0; k < cols; ++k) m(i, k) = scalar_from_json<S>(j[i][k]);
    }
    return m;
}

template <class S>
json matrix_to_json(const Matrix<S>& m) {
    json rows = json::array();
    for (size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (size_t k = 0; k < m.cols(); ++k) row.push_back(scalar_to_json(m(i, k)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline MultiMatrixAlgebra algebra_from_json(const json& j) {
    const json& b = j.is_array() ? j : field(j, "blocks");
    if (!b.is_array()) throw ValidationError("algebra blocks must be a list");
    std::vector<size_t> dims;
    for (const auto& x : b) dims.push_back(to_size(x, "block dimension"));
    return MultiMatrixAlgebra(dims);
}

inline json algebra_to_json(const MultiMatrixAlgebra& a) { return json{{"blocks", a.blocks}}; }

template <class S>
AlgebraElement<S> element_from_json(const json& j, const MultiMatrixAlgebra* alg_hint = nullptr) {
    size_t m = j.contains("m") ? to_size(j.at("m"), "m") : 1;
    if (m == 0) throw ValidationError("m must be positive");
    std::vector<Matrix<S>> blocks;
    for (const auto& b : field(j, "blocks")) blocks.push_back(matrix_from_json<S>(b));
    MultiMatrixAlgebra alg;
    if (j.contains("algebra"))
        alg = algebra_from_json(j.at("algebra"));
    else if (alg_hint)
        alg = *alg_hint;
    else {
        std::vector<size_t> dims;
        for (const auto& b : blocks) {
            if (b.rows() % m != 0 || b.rows() == 0) throw ValidationError("block size is not a positive multiple of m");
            dims.push_back(b.rows() / m);
        }
        alg = MultiMatrixAlgebra(dims);
    }
    return AlgebraElement<S>(alg, m, std::move(blocks));
}

template <class S>
json element_to_json(const AlgebraElement<S>& x) {
    json b = json::array();
    for (const auto& m : x.blocks) b.push_back(matrix_to_json(m));
    return json{{"algebra", algebra_to_json(x.algebra)}, {"m", x.m}, {"blocks", b}};
}

template <class S>
SpectralForm<S> spectral_from_json(const json& j) {
    SpectralForm<S> sf;
    sf.algebra = algebra_from_json(field(j, "algebra"));
    sf.m = j.contains("m") ? to_size(j.at("m"), "m") : 1;
    auto total = AlgebraElement<S>::zero(sf.algebra, sf.m);
    for (const auto& p : field(j, "pairs")) {
        auto proj = element_from_json<S>(field(p, "projection"), &sf.algebra);
        total += proj;
        sf.pairs.push_back({scalar_from_json<S>(field(p, "lambda")), std::move(proj)});
    }
    if (j.contains("kernel"))
        sf.kernel = element_from_json<S>(j.at("kernel"), &sf.algebra);
    else
        sf.kernel = AlgebraElement<S>::identity(sf.algebra, sf.m) - total;
    sf.canonicalize();
    sf.validate();
    return sf;
}

template <class S>
json spectral_to_json(const SpectralForm<S>& sf) {
    json pairs = json::array();
    for (const auto& p : sf.pairs)
        pairs.push_back(json{{"lambda", scalar_to_json(p.lambda)}, {"projection", element_to_json(p.projection)}});
    return json{{"algebra", algebra_to_json(sf.algebra)}, {"m", sf.m}, {"pairs", pairs},
                {"kernel", element_to_json(sf.kernel)}};
}

/// Either a spectral form ("pairs") or a normal element ("blocks").
template <class S>
SpectralForm<S> normal_from_json(const json& j) {
    if (j.contains("pairs")) return spectral_from_json<S>(j);
    return spectral_decompose(element_from_json<S>(j));
}

template <class S>
StarHomomorphism<S> hom_from_json(const json& j) {
    StarHomomorphism<S> h;
    h.source = algebra_from_json(field(j, "source"));
    h.target = algebra_from_json(field(j, "target"));
    for (const auto& row : field(j, "multiplicities")) {
        std::vector<size_t> r;
        for (const auto& x : row) r.push_back(to_size(x, "multiplicity"));
        h.mult.push_back(r);
    }
    if (j.contains("unitaries"))
        for (const auto& u : j.at("unitaries")) h.unitaries.push_back(matrix_from_json<S>(u));
    h.validate();
    return h;
}

template <class S>
json hom_to_json(const StarHomomorphism<S>& h) {
    json u = json::array();
    for (const auto& m : h.unitaries) u.push_back(matrix_to_json(m));
    return json{{"source", algebra_to_json(h.source)}, {"target", algebra_to_json(h.target)},
                {"multiplicities", h.mult}, {"unitaries", u}};
}

// ---------------------------------------------------------------------------
// K0 / N0

template <class S>
N0Class<S> n0_from_json(const json& j) {
    N0Class<S> x(algebra_from_json(field(j, "algebra")));
    for (const auto& e : field(j, "support")) {
        K0Class r;
        for (const auto& v : field(e, "ranks")) {
            if (!v.is_number_integer()) throw ValidationError("ranks must be integers");
            r.push_back(v.get<long>());
        }
        S lam = scalar_from_json<S>(field(e, "lambda"));
        if (N0Class<S>::key_is_zero(lam)) throw ValidationError("N0 support keys must be nonzero");
        x.add(lam, r);
    }
    return x;
}

template <class S>
json n0_to_json(const N0Class<S>& x) {
    json sup = json::array();
    for (const auto& [lam, r] : x.support()) sup.push_back(json{{"lambda", scalar_to_json(lam)}, {"ranks", r}});
    return json{{"algebra", algebra_to_json(x.algebra())}, {"support", sup}};
}

template <class S>
K0TensorC<S> k0c_from_json(const json& j) {
    K0TensorC<S> v;
    for (const auto& c : field(j, "coeffs")) v.coeffs.push_back(scalar_from_json<S>(c));
    return v;
}

template <class S>
json k0c_to_json(const K0TensorC<S>& v) {
    json c = json::array();
    for (const auto& x : v.coeffs) c.push_back(scalar_to_json(x));
    return json{{"coeffs", c}};
}

// ---------------------------------------------------------------------------
// tensors and homology classes

template <class S>
TensorElement<S> tensor_from_json(const json& j) {
    TensorElement<S> t(algebra_from_json(field(j, "algebra")), j.contains("m") ? to_size(j.at("m"), "m") : 1,
                       to_size(field(j, "degree"), "degree"));
    if (t.m == 0) throw ValidationError("m must be positive");
    for (const auto& term : field(j, "terms")) {
        Tuple idx;
        for (const auto& i : field(term, "indices")) idx.push_back(static_cast<uint32_t>(to_size(i, "index")));
        t.add(idx, scalar_from_json<S>(field(term, "coeff")));
    }
    t.validate();
    return t;
}

template <class S>
json tensor_to_json(const TensorElement<S>& t) {
    json terms = json::array();
    for (const auto& [idx, c] : t.terms) terms.push_back(json{{"indices", idx}, {"coeff", scalar_to_json(c)}});
    return json{{"algebra", algebra_to_json(t.base)}, {"m", t.m}, {"degree", t.degree}, {"terms", terms}};
}

template <class S>
json hc_to_json(const HCClass<S>& c) {
    json co = json::array();
    for (const auto& x : c.coords) co.push_back(scalar_to_json(x));
    return json{{"algebra", algebra_to_json(c.algebra)}, {"degree", c.degree}, {"dimension", c.coords.size()},
                {"coords", co}};
}

// ---------------------------------------------------------------------------
// equivariant complexes

template <class S>
ModuleMap<S> module_map_from_json(const json& j, const MultiMatrixAlgebra& alg) {
    const json& b = j.is_array() ? j : field(j, "blocks");
    if (!b.is_array() || b.size() != alg.factors()) throw ValidationError("module map needs one matrix per block");
    ModuleMap<S> f{alg, 0, 0, {}};
    for (const auto& m : b) f.blocks.push_back(matrix_from_json<S>(m));
    auto rank_of = [&](size_t extent, size_t r) {
        if (extent % r != 0) throw ValidationError("module map block size is not a multiple of the algebra block");
        return extent / r;
    };
    f.rows = rank_of(f.blocks[0].rows(), alg.blocks[0]);
    f.cols = rank_of(f.blocks[0].cols(), alg.blocks[0]);
    f.validate();
    return f;
}

template <class S>
json module_map_to_json(const ModuleMap<S>& f) {
    json b = json::array();
    for (const auto& m : f.blocks) b.push_back(matrix_to_json(m));
    return json{{"blocks", b}};
}

template <class S>
IrrepTable<S> irreps_from_json(const json& j) {
    IrrepTable<S> t;
    for (const auto& pi : j) {
        Irrep<S> r;
        r.dim = to_size(field(pi, "dim"), "irrep dimension");
        for (const auto& m : field(pi, "matrices")) r.mats.push_back(matrix_from_json<S>(m));
        t.irreps.push_back(std::move(r));
    }
    return t;
}

template <class S>
json irreps_to_json(const IrrepTable<S>& t) {
    json out = json::array();
    for (const auto& pi : t.irreps) {
        json ms = json::array();
        for (const auto& m : pi.mats) ms.push_back(matrix_to_json(m));
        out.push_back(json{{"dim", pi.dim}, {"matrices", ms}});
    }
    return out;
}

inline FiniteGroup group_from_json(const json& j) {
    if (j.is_string()) return FiniteGroup::by_name(j.get<std::string>());
    if (j.contains("name") && !j.contains("table")) return FiniteGroup::by_name(j.at("name").get<std::string>());
    std::vector<std::vector<size_t>> t;
    for (const auto& row : field(j, "table")) {
        std::vector<size_t> r;
        for (const auto& x : row) r.push_back(to_size(x, "group table entry"));
        t.push_back(r);
    }
    return FiniteGroup::from_table(std::move(t), j.contains("name") ? j.at("name").get<std::string>() : "custom");
}

template <class S>
GAComplex<S> complex_from_json(const json& j) {
    GAComplex<S> c;
    c.algebra = algebra_from_json(field(j, "algebra"));
    for (const auto& mod : field(j, "modules")) {
        size_t n = to_size(field(mod, "n"), "module rank");
        auto q = module_map_from_json<S>(field(mod, "q"), c.algebra);
        if (q.rows != n || q.cols != n) throw ValidationError("module projection does not match n");
        c.modules.push_back(q.to_element());
    }
    for (const auto& d : field(j, "diffs")) c.diffs.push_back(module_map_from_json<S>(d, c.algebra));
    c.group = group_from_json(field(j, "group"));
    for (const auto& per_g : field(j, "action")) {
        std::vector<ModuleMap<S>> row;
        for (const auto& u : per_g) row.push_back(module_map_from_json<S>(u, c.algebra));
        c.action.push_back(std::move(row));
    }
    c.irreps = j.contains("irreps") ? irreps_from_json<S>(j.at("irreps")) : IrrepTable<S>::builtin(c.group);
    return c;
}

template <class S>
json complex_to_json(const GAComplex<S>& c) {
    json mods = json::array();
    for (const auto& q : c.modules) mods.push_back(json{{"n", q.m}, {"q", module_map_to_json(ModuleMap<S>::from_element(q))}});
    json diffs = json::array();
    for (const auto& d : c.diffs) diffs.push_back(module_map_to_json(d));
    json action = json::array();
    for (const auto& per_g : c.action) {
        json row = json::array();
        for (const auto& u : per_g) row.push_back(module_map_to_json(u));
        action.push_back(std::move(row));
    }
    return json{{"algebra", algebra_to_json(c.algebra)},
                {"modules", mods},
                {"diffs", diffs},
                {"group", json{{"name", c.group.name}, {"table", c.group.table}}},
                {"action", action},
                {"irreps", irreps_to_json(c.irreps)}};
}

inline json with_schema(json j) {
    json out{{"schema_version", kSchemaVersion}};
    for (auto& [k, v] : j.items()) out[k] = v;
    return out;
}

}  // namespace ncg::io
