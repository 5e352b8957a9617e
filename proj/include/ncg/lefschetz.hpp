#pragma once

// Finite equivariant chain complexes of projective A-modules, their harmonic
// parts, isotypic decomposition, and the Lefschetz numbers L_1, L_2l and the
// N0-valued number.
//
// Module j is q_j A^{n_j}. An A-linear map A^n -> A^{n'} is left
// multiplication by an n' x n matrix over A, stored per block b as a complex
// (n' r_b) x (n r_b) matrix.

#include <string>
#include <utility>
#include <vector>

#include "ncg/chern.hpp"
#include "ncg/group.hpp"

namespace ncg {

template <class S>
struct ModuleMap {
    MultiMatrixAlgebra algebra;
    size_t rows = 0;  // n' (target rank)
    size_t cols = 0;  // n (source rank)
    std::vector<Matrix<S>> blocks;

    static ModuleMap zero(const MultiMatrixAlgebra& alg, size_t rows, size_t cols) {
        ModuleMap f{alg, rows, cols, {}};
        for (size_t r : alg.blocks) f.blocks.emplace_back(rows * r, cols * r);
        return f;
    }
    static ModuleMap from_element(const AlgebraElement<S>& x) { return {x.algebra, x.m, x.m, x.blocks}; }
    AlgebraElement<S> to_element() const {
        if (rows != cols) throw ValidationError("module map is not square");
        return {algebra, rows, blocks};
    }

    void validate() const {
        algebra.validate();
        if (blocks.size() != algebra.factors()) throw ValidationError("module map needs one matrix per block");
        for (size_t b = 0; b < blocks.size(); ++b)
            if (blocks[b].rows() != rows * algebra.blocks[b] || blocks[b].cols() != cols * algebra.blocks[b])
                throw ValidationError("module map block " + std::to_string(b) + " has shape " + blocks[b].shape());
    }

    ModuleMap adjoint() const {
        ModuleMap r{algebra, cols, rows, {}};
        for (const auto& b : blocks) r.blocks.push_back(b.adjoint());
        return r;
    }
    friend ModuleMap operator*(const ModuleMap& a, const ModuleMap& b) {
        require_same_algebra(a.algebra, b.algebra, "module map composition");
        if (a.cols != b.rows) throw ValidationError("module map composition: rank mismatch");
        ModuleMap r{a.algebra, a.rows, b.cols, {}};
        for (size_t i = 0; i < a.blocks.size(); ++i) r.blocks.push_back(a.blocks[i] * b.blocks[i]);
        return r;
    }
    friend ModuleMap operator+(ModuleMap a, const ModuleMap& b) {
        for (size_t i = 0; i < a.blocks.size(); ++i) a.blocks[i] += b.blocks[i];
        return a;
    }
    friend ModuleMap operator-(ModuleMap a, const ModuleMap& b) {
        for (size_t i = 0; i < a.blocks.size(); ++i) a.blocks[i] -= b.blocks[i];
        return a;
    }
    friend ModuleMap operator*(ModuleMap a, const S& s) {
        for (auto& b : a.blocks) b *= s;
        return a;
    }
    friend bool operator==(const ModuleMap& a, const ModuleMap& b) {
        return a.algebra == b.algebra && a.rows == b.rows && a.cols == b.cols && a.blocks == b.blocks;
    }
    bool is_zero() const {
        for (const auto& b : blocks)
            if (!b.is_zero()) return false;
        return true;
    }
};

/// Block-diagonal sum f (+) g.
template <class S>
ModuleMap<S> direct_sum(const ModuleMap<S>& f, const ModuleMap<S>& g) {
    ModuleMap<S> r{f.algebra, f.rows + g.rows, f.cols + g.cols, {}};
    for (size_t b = 0; b < f.blocks.size(); ++b) {
        Matrix<S> m(f.blocks[b].rows() + g.blocks[b].rows(), f.blocks[b].cols() + g.blocks[b].cols());
        m.set_block(0, 0, f.blocks[b]);
        m.set_block(f.blocks[b].rows(), f.blocks[b].cols(), g.blocks[b]);
        r.blocks.push_back(std::move(m));
    }
    return r;
}

template <class S>
struct GAComplex {
    MultiMatrixAlgebra algebra;
    std::vector<AlgebraElement<S>> modules;            // q_j in M_{n_j}(A)
    std::vector<ModuleMap<S>> diffs;                   // diffs[k] = d_{k+1}: module k+1 -> module k
    FiniteGroup group;
    std::vector<std::vector<ModuleMap<S>>> action;     // action[g][j]
    IrrepTable<S> irreps;

    size_t length() const { return modules.size(); }
    size_t rank(size_t j) const { return modules[j].m; }

    /// d_j : module j -> module j-1, zero outside 1..L-1.
    ModuleMap<S> d(size_t j) const {
        if (j >= 1 && j < length()) return diffs[j - 1];
        size_t src = j < length() ? rank(j) : 0;
        size_t dst = (j >= 1 && j - 1 < length()) ? rank(j - 1) : 0;
        return ModuleMap<S>::zero(algebra, dst, src);
    }
    ModuleMap<S> q(size_t j) const { return ModuleMap<S>::from_element(modules[j]); }
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

template <class S>
ValidationReport validate_complex(const GAComplex<S>& c) {
    ValidationReport rep;
    auto bad = [&](const std::string& s) { rep.violations.push_back(s); };
    try {
        c.algebra.validate();
    } catch (const Error& e) {
        bad(e.what());
        return rep;
    }
    const size_t L = c.length();
    if (L == 0) bad("complex has no modules");
    for (size_t j = 0; j < L; ++j) {
        const auto& q = c.modules[j];
        try {
            q.validate();
        } catch (const Error& e) {
            bad("module " + std::to_string(j) + ": " + e.what());
            return rep;
        }
        if (!(q.algebra == c.algebra)) bad("module " + std::to_string(j) + " is over a different algebra");
        if (!is_projection(q)) bad("q_" + std::to_string(j) + " is not a projection");
    }
    if (c.diffs.size() + 1 != L && !(L == 0 && c.diffs.empty()))
        bad("need exactly length-1 differentials");
    if (!rep.ok()) return rep;
    for (size_t j = 1; j < L; ++j) {
        const auto& d = c.diffs[j - 1];
        try {
            d.validate();
        } catch (const Error& e) {
            bad("d_" + std::to_string(j) + ": " + e.what());
            continue;
        }
        if (d.rows != c.rank(j - 1) || d.cols != c.rank(j)) {
            bad("d_" + std::to_string(j) + " has the wrong ranks");
            continue;
        }
        if (!(c.q(j - 1) * d * c.q(j) == d)) bad("d_" + std::to_string(j) + " does not respect the modules");
    }
    if (!rep.ok()) return rep;
    for (size_t j = 1; j + 1 < L; ++j)
        if (!(c.diffs[j - 1] * c.diffs[j]).is_zero()) bad("d_" + std::to_string(j) + " d_" + std::to_string(j + 1) + " != 0");

    const size_t n = c.group.order();
    if (c.action.size() != n) {
        bad("action needs one entry per group element");
        return rep;
    }
    for (size_t g = 0; g < n; ++g) {
        if (c.action[g].size() != L) {
            bad("action of element " + std::to_string(g) + " needs one matrix per module");
            return rep;
        }
        for (size_t j = 0; j < L; ++j) {
            const auto& u = c.action[g][j];
            try {
                u.validate();
            } catch (const Error& e) {
                bad("U_" + std::to_string(g) + " on module " + std::to_string(j) + ": " + e.what());
                return rep;
            }
            if (u.rows != c.rank(j) || u.cols != c.rank(j)) {
                bad("U_" + std::to_string(g) + " on module " + std::to_string(j) + " has the wrong rank");
                return rep;
            }
        }
    }
    for (size_t g = 0; g < n; ++g)
        for (size_t j = 0; j < L; ++j) {
            const auto& u = c.action[g][j];
            auto q = c.q(j);
            std::string tag = "U_" + std::to_string(g) + " on module " + std::to_string(j);
            if (!(q * u * q == u)) bad(tag + " does not preserve the module");
            if (!(u.adjoint() * u == q) || !(u * u.adjoint() == q)) bad(tag + " is not unitary on the module");
            for (size_t h = 0; h < n; ++h)
                if (!(u * c.action[h][j] == c.action[c.group.mul(g, h)][j])) {
                    bad(tag + ": action is not a representation");
                    break;
                }
        }
    for (size_t j = 0; j < L; ++j)
        if (!(c.action[c.group.identity][j] == c.q(j))) bad("identity does not act trivially on module " + std::to_string(j));
    for (size_t g = 0; g < n; ++g)
        for (size_t j = 1; j < L; ++j)
            if (!(c.action[g][j - 1] * c.diffs[j - 1] == c.diffs[j - 1] * c.action[g][j]))
                bad("U_" + std::to_string(g) + " does not commute with d_" + std::to_string(j));
    try {
        c.irreps.validate(c.group);
    } catch (const Error& e) {
        bad(std::string("irrep table: ") + e.what());
    }
    return rep;
}

template <class S>
void require_valid(const GAComplex<S>& c) {
    auto r = validate_complex(c);
    if (!r.ok()) throw ValidationError("invalid complex: " + r.violations.front());
}

/// h_j = projection onto {x in q_j A^{n_j} : d_j x = 0, d_{j+1}^* x = 0}.
template <class S>
std::vector<AlgebraElement<S>> harmonic_projections(const GAComplex<S>& c) {
    std::vector<AlgebraElement<S>> out;
    for (size_t j = 0; j < c.length(); ++j) {
        auto dj = c.d(j);
        auto dn = c.d(j + 1).adjoint();
        auto q = c.q(j);
        auto h = AlgebraElement<S>::zero(c.algebra, c.rank(j));
        for (size_t b = 0; b < c.algebra.factors(); ++b) {
            size_t s = q.blocks[b].rows();
            Matrix<S> stack = stack_rows<S>({Matrix<S>::identity(s) - q.blocks[b], dj.blocks[b], dn.blocks[b]}, s);
            h.blocks[b] = kernel_projection(stack);
        }
        out.push_back(std::move(h));
    }
    return out;
}

template <class S>
struct HarmonicModule {
    AlgebraElement<S> h;
    std::vector<ModuleMap<S>> action;  // U_g h
};

template <class S>
std::vector<HarmonicModule<S>> harmonic_modules(const GAComplex<S>& c) {
    require_valid(c);
    auto hs = harmonic_projections(c);
    std::vector<HarmonicModule<S>> out;
    for (size_t j = 0; j < hs.size(); ++j) {
        HarmonicModule<S> m{hs[j], {}};
        auto hm = ModuleMap<S>::from_element(hs[j]);
        for (size_t g = 0; g < c.group.order(); ++g) m.action.push_back(c.action[g][j] * hm);
        out.push_back(std::move(m));
    }
    return out;
}

template <class S>
struct Isotype {
    size_t irrep = 0;
    AlgebraElement<S> projector;  // P_pi
    K0Class multiplicity;
};

/// P_pi = (dim pi/|G|) sum_g conj(chi_pi(g)) U_g h; multiplicity = [P_pi]/dim pi.
template <class S>
std::vector<Isotype<S>> isotypic_decompose(const HarmonicModule<S>& mod, const FiniteGroup& g,
                                           const IrrepTable<S>& irreps) {
    using T = scalar_traits<S>;
    const size_t n = g.order();
    if (mod.action.size() != n) throw ValidationError("isotypic_decompose: action size differs from group order");
    std::vector<Isotype<S>> out;
    for (size_t k = 0; k < irreps.irreps.size(); ++k) {
        const auto& pi = irreps.irreps[k];
        auto acc = ModuleMap<S>::zero(mod.h.algebra, mod.h.m, mod.h.m);
        for (size_t a = 0; a < n; ++a) acc = acc + mod.action[a] * T::conj(pi.character(a));
        auto p = (acc * T::from_rational(make_rational(static_cast<long>(pi.dim), static_cast<long>(n)))).to_element();
        if (!is_projection(p)) throw ConsistencyError("isotypic projector is not a projection; action or irreps invalid");
        K0Class r = k0_of_projection(p);
        K0Class mult(r.size());
        for (size_t b = 0; b < r.size(); ++b) {
            if (r[b] % static_cast<long>(pi.dim) != 0)
                throw ConsistencyError("non-integral isotypic multiplicity for irrep " + std::to_string(k));
            mult[b] = r[b] / static_cast<long>(pi.dim);
        }
        out.push_back({k, std::move(p), std::move(mult)});
    }
    return out;
}

/// (d/|G|) sum_g conj(pi_11(g)) U_g h: one copy of the multiplicity space.
template <class S>
AlgebraElement<S> slot_projector(const HarmonicModule<S>& mod, const FiniteGroup& g, const Irrep<S>& pi) {
    using T = scalar_traits<S>;
    auto acc = ModuleMap<S>::zero(mod.h.algebra, mod.h.m, mod.h.m);
    for (size_t a = 0; a < g.order(); ++a) acc = acc + mod.action[a] * T::conj(pi.mats[a](0, 0));
    auto p = (acc * T::from_rational(make_rational(static_cast<long>(pi.dim), static_cast<long>(g.order())))).to_element();
    if (!is_projection(p)) throw ConsistencyError("slot projector is not a projection");
    return p;
}

/// L_1(E, g) = sum_j (-1)^j sum_pi mult_pi(H_j) chi_pi(g).
template <class S>
K0TensorC<S> lefschetz_first(const GAComplex<S>& c, size_t g) {
    using T = scalar_traits<S>;
    if (g >= c.group.order()) throw ValidationError("group element index out of range");
    auto mods = harmonic_modules(c);
    K0TensorC<S> out{std::vector<S>(c.algebra.factors(), T::zero())};
    for (size_t j = 0; j < mods.size(); ++j) {
        S sign = sign_power<S>(static_cast<long>(j));
        for (const auto& iso : isotypic_decompose(mods[j], c.group, c.irreps)) {
            S chi = c.irreps.irreps[iso.irrep].character(g) * sign;
            for (size_t b = 0; b < iso.multiplicity.size(); ++b)
                out.coeffs[b] += chi * T::from_int(iso.multiplicity[b]);
        }
    }
    return out;
}

/// tau(U_g | module) = sum_pi Ch(one multiplicity copy) chi_pi(g).
template <class S>
HCClass<S> tau_invariant(const HarmonicModule<S>& mod, const FiniteGroup& grp, const IrrepTable<S>& irreps,
                         size_t g, int l) {
    auto total = HCClass<S>::zero(mod.h.algebra, static_cast<size_t>(2 * l));
    for (const auto& pi : irreps.irreps) {
        auto p = slot_projector(mod, grp, pi);
        if (p.is_zero()) continue;
        total += chern_projection(p, l) * pi.character(g);
    }
    return total;
}

template <class S>
HCClass<S> lefschetz_second(const GAComplex<S>& c, size_t g, int l) {
    if (g >= c.group.order()) throw ValidationError("group element index out of range");
    auto mods = harmonic_modules(c);
    auto total = HCClass<S>::zero(c.algebra, static_cast<size_t>(2 * l));
    for (size_t j = 0; j < mods.size(); ++j)
        total += tau_invariant(mods[j], c.group, c.irreps, g, l) * sign_power<S>(static_cast<long>(j));
    return total;
}

/// sum_j (-1)^j [h_j U h_j]; U is a per-module endomorphism commuting with d.
template <class S>
N0Class<S> generalized_lefschetz(const GAComplex<S>& c, const std::vector<ModuleMap<S>>& u,
                                 const std::vector<S>& hints = {}) {
    require_valid(c);
    const size_t L = c.length();
    if (u.size() != L) throw ValidationError("need one endomorphism per module");
    for (size_t j = 0; j < L; ++j) {
        auto q = c.q(j);
        if (u[j].rows != c.rank(j) || u[j].cols != c.rank(j)) throw ValidationError("endomorphism has wrong rank");
        if (!(q * u[j] * q == u[j]) || !(u[j].adjoint() * u[j] == q) || !(u[j] * u[j].adjoint() == q))
            throw DomainError("U is not unitary on module " + std::to_string(j));
    }
    for (size_t j = 1; j < L; ++j)
        if (!(u[j - 1] * c.diffs[j - 1] == c.diffs[j - 1] * u[j]))
            throw DomainError("U does not commute with d_" + std::to_string(j));
    auto hs = harmonic_projections(c);
    N0Class<S> total(c.algebra);
    for (size_t j = 0; j < L; ++j) {
        auto hm = ModuleMap<S>::from_element(hs[j]);
        auto x = (hm * u[j] * hm).to_element();
        auto cls = n_class(spectral_decompose(x, hints));
        total += (j % 2 == 0) ? cls : -cls;
    }
    return total;
}

/// All |G|-th roots of unity the backend can represent.
template <class S>
std::vector<S> group_root_hints(const FiniteGroup& g) {
    std::vector<S> h;
    const long n = static_cast<long>(g.order());
    for (long k = 0; k < n; ++k)
        if (auto z = scalar_traits<S>::root_of_unity(k, n)) h.push_back(*z);
    return h;
}

template <class S>
N0Class<S> generalized_lefschetz_group(const GAComplex<S>& c, size_t g) {
    if (g >= c.group.order()) throw ValidationError("group element index out of range");
    return generalized_lefschetz(c, c.action[g], group_root_hints<S>(c.group));
}

template <class S>
struct Th4Sides {
    K0TensorC<S> lhs;  // h(L1 generalized)
    K0TensorC<S> rhs;  // L1
    bool equal() const { return lhs == rhs; }
};

template <class S>
Th4Sides<S> th4_sides(const GAComplex<S>& c, size_t g) {
    return {h_map(generalized_lefschetz_group(c, g)), lefschetz_first(c, g)};
}

template <class S>
bool verify_th4(const GAComplex<S>& c, size_t g) {
    return th4_sides(c, g).equal();
}

template <class S>
DualPath<S> th5_sides(const GAComplex<S>& c, size_t g, int l) {
    return {lefschetz_second(c, g, l), generalized_chern(generalized_lefschetz_group(c, g), l)};
}

template <class S>
bool verify_th5(const GAComplex<S>& c, size_t g, int l) {
    return th5_sides(c, g, l).equal();
}

/// Adds the acyclic summand 0 -> M --id--> M -> 0 in degrees j+1 -> j.
template <class S>
GAComplex<S> add_acyclic_summand(const GAComplex<S>& c, size_t j, const AlgebraElement<S>& qm,
                                 const std::vector<ModuleMap<S>>& action_m) {
    if (j + 1 >= c.length()) throw ValidationError("acyclic summand needs degrees j and j+1 inside the complex");
    if (action_m.size() != c.group.order()) throw ValidationError("acyclic summand needs one matrix per group element");
    GAComplex<S> r = c;
    auto qmap = ModuleMap<S>::from_element(qm);
    const size_t nm = qm.m;
    r.modules[j] = direct_sum(c.modules[j], qm);
    r.modules[j + 1] = direct_sum(c.modules[j + 1], qm);
    // d_{j+1}: (j+1) -> j gains the identity of M
    r.diffs[j] = direct_sum(c.diffs[j], qmap);
    // d_j: j -> j-1 gets zero columns; d_{j+2}: j+2 -> j+1 gets zero rows
    if (j >= 1) r.diffs[j - 1] = direct_sum(c.diffs[j - 1], ModuleMap<S>::zero(c.algebra, 0, nm));
    if (j + 2 < c.length()) r.diffs[j + 1] = direct_sum(c.diffs[j + 1], ModuleMap<S>::zero(c.algebra, nm, 0));
    for (size_t g = 0; g < c.group.order(); ++g) {
        r.action[g][j] = direct_sum(c.action[g][j], action_m[g]);
        r.action[g][j + 1] = direct_sum(c.action[g][j + 1], action_m[g]);
    }
    return r;
}

}  // namespace ncg
