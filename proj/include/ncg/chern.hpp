#pragma once

// Chern character of projections, dyadic spectral covers and the cover
// construction of T(a), and the generalized Chern character on N0.

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ncg/cyclic.hpp"
#include "ncg/ngroup.hpp"

namespace ncg {

/// Largest admissible Chern degree for an algebra under the current settings.
inline int max_chern_degree(const MultiMatrixAlgebra& alg) {
    int o = settings().max_l.load();
    if (o >= 0) return o;
    return alg.all_blocks_scalar() ? 2 : 1;
}

inline void require_chern_degree(const MultiMatrixAlgebra& alg, int l) {
    if (l < 0) throw ValidationError("Chern degree must be nonnegative");
    if (l > max_chern_degree(alg))
        throw ResourceError("Chern degree l=" + std::to_string(l) + " exceeds the limit " +
                            std::to_string(max_chern_degree(alg)) + " for algebra " + alg.to_string());
}

/// Tr(x^{(k)}) for x in M_m(A), as a tensor over A.
template <class S>
TensorElement<S> traced_power(const AlgebraElement<S>& x, size_t factors) {
    DecompositionRep<S> rep{x.algebra, x.m, {std::vector<AlgebraElement<S>>(factors, x)}};
    return trace_tensor(rep);
}

/// class of (-1)^l Tr(p^{(2l+1)}) in HC_{2l}(A).
template <class S>
HCClass<S> chern_projection(const AlgebraElement<S>& p, int l) {
    require_chern_degree(p.algebra, l);
    if (!is_projection(p)) throw DomainError("chern_projection: element is not a projection");
    auto c = hc_class(traced_power(p, 2 * l + 1));
    return c * sign_power<S>(l);
}

/// class of Tr((e^{(b)}_{00})^{(2l+1)}), one per block (cached per algebra and degree).
template <class S>
const std::vector<HCClass<S>>& unit_chern_classes(const MultiMatrixAlgebra& alg, int l) {
    static std::mutex mu;
    static std::map<std::pair<std::vector<size_t>, int>, std::shared_ptr<std::vector<HCClass<S>>>> cache;
    auto key = std::make_pair(alg.blocks, l);
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return *it->second;
    }
    auto v = std::make_shared<std::vector<HCClass<S>>>();
    for (size_t b = 0; b < alg.factors(); ++b)
        v->push_back(hc_class(traced_power(AlgebraElement<S>::unit(alg, b, 0, 0), 2 * l + 1)));
    std::lock_guard<std::mutex> lock(mu);
    return *cache.emplace(key, v).first->second;
}

// ---------------------------------------------------------------------------
// Dyadic covers

enum class TagPolicy { Min, Max };

template <class S>
struct CoverCell {
    unsigned level = 0;
    std::pair<long long, long long> corner;  // cell = [c/2^n, (c+1)/2^n) in re and im
    S tag;
    std::vector<S> points;  // spectrum points inside the cell, sorted
};

/// Level-n dyadic squares meeting the spectrum, tagged by the policy.
template <class S>
std::vector<CoverCell<S>> dyadic_cover(std::vector<S> spectrum, unsigned n, TagPolicy policy = TagPolicy::Min) {
    using T = scalar_traits<S>;
    if (n > 60) throw ResourceError("dyadic cover depth too large");
    std::sort(spectrum.begin(), spectrum.end(), [](const S& a, const S& b) { return T::compare(a, b) < 0; });
    std::map<std::pair<long long, long long>, CoverCell<S>> cells;
    for (const auto& x : spectrum) {
        auto key = T::dyadic_cell(x, n);
        auto it = cells.find(key);
        if (it == cells.end()) it = cells.emplace(key, CoverCell<S>{n, key, x, {}}).first;
        it->second.points.push_back(x);
    }
    std::vector<CoverCell<S>> out;
    for (auto& [k, c] : cells) {
        c.tag = policy == TagPolicy::Min ? c.points.front() : c.points.back();
        out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(), [](const CoverCell<S>& a, const CoverCell<S>& b) {
        return scalar_traits<S>::compare(a.tag, b.tag) < 0;
    });
    return out;
}

template <class S>
std::vector<S> cover_spectrum(const SpectralForm<S>& a) {
    return a.spectrum(true);
}

template <class S>
bool cover_separates(const std::vector<CoverCell<S>>& cover) {
    return std::all_of(cover.begin(), cover.end(), [](const CoverCell<S>& c) { return c.points.size() == 1; });
}

template <class S>
AlgebraElement<S> cell_projection(const SpectralForm<S>& a, const CoverCell<S>& cell) {
    return spectral_projection(a, BorelSet<S>{cell.points});
}

/// a_n = sum_k P_a(E_k) lambda_k.
template <class S>
SpectralForm<S> approximant(const SpectralForm<S>& a, const std::vector<CoverCell<S>>& cover) {
    using T = scalar_traits<S>;
    SpectralForm<S> r;
    r.algebra = a.algebra;
    r.m = a.m;
    r.kernel = AlgebraElement<S>::zero(a.algebra, a.m);
    for (const auto& cell : cover) {
        auto p = cell_projection(a, cell);
        if (p.is_zero()) continue;
        if (T::is_zero(cell.tag)) {
            r.kernel += p;
            continue;
        }
        bool merged = false;
        for (auto& pr : r.pairs)
            if (T::equal(pr.lambda, cell.tag)) {
                pr.projection += p;
                merged = true;
            }
        if (!merged) r.pairs.push_back({cell.tag, std::move(p)});
    }
    r.canonicalize();
    return r;
}

/// a~_n = sum_k P_a(E_k)^{(2l+1)} lambda_k, over the flattened M_m(A).
template <class S>
TensorElement<S> tensor_approximant(const SpectralForm<S>& a, const std::vector<CoverCell<S>>& cover, int l) {
    TensorElement<S> out(a.algebra, a.m, static_cast<size_t>(2 * l));
    for (const auto& cell : cover) {
        auto p = cell_projection(a, cell);
        if (p.is_zero() || scalar_traits<S>::is_zero(cell.tag)) continue;
        out += tensor_power(p, 2 * l + 1) * cell.tag;
    }
    return out;
}

/// sum_i lambda_i class(Tr(P_i^{(2l+1)})).
template <class S>
HCClass<S> T_direct(const SpectralForm<S>& a, int l) {
    require_chern_degree(a.algebra, l);
    auto total = HCClass<S>::zero(a.algebra, 2 * l);
    for (const auto& pr : a.pairs) total += hc_class(traced_power(pr.projection, 2 * l + 1)) * pr.lambda;
    return total;
}

template <class S>
struct CoverRun {
    HCClass<S> value;
    unsigned depth = 0;  // depth at which the run stopped
};

/// T through dyadic refinement: stops at the first depth n >= 1 whose
/// predecessor cover already separates the spectrum and whose class agrees
/// with the predecessor's.
template <class S>
CoverRun<S> T_cover_run(const SpectralForm<S>& a, int l, unsigned max_depth = 12, TagPolicy policy = TagPolicy::Min) {
    require_chern_degree(a.algebra, l);
    auto pts = cover_spectrum(a);
    std::map<std::vector<size_t>, HCClass<S>> memo;  // by member indices of a cell
    auto cell_class = [&](const CoverCell<S>& cell) {
        std::vector<size_t> members;
        for (const auto& x : cell.points)
            for (size_t i = 0; i < pts.size(); ++i)
                if (scalar_traits<S>::equal(pts[i], x)) members.push_back(i);
        auto it = memo.find(members);
        if (it != memo.end()) return it->second;
        auto c = hc_class(traced_power(cell_projection(a, cell), 2 * l + 1));
        memo.emplace(members, c);
        return c;
    };
    auto class_at = [&](unsigned n, bool& separated) {
        auto cover = dyadic_cover(pts, n, policy);
        separated = cover_separates(cover);
        auto total = HCClass<S>::zero(a.algebra, 2 * l);
        for (const auto& cell : cover) {
            if (scalar_traits<S>::is_zero(cell.tag)) continue;
            total += cell_class(cell) * cell.tag;
        }
        return total;
    };
    bool prev_sep = false;
    auto prev = class_at(0, prev_sep);
    for (unsigned n = 1; n <= max_depth; ++n) {
        bool sep = false;
        auto cur = class_at(n, sep);
        if (prev_sep && cur == prev) return {cur, n};
        prev = std::move(cur);
        prev_sep = sep;
    }
    double gap = 1e300;
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j)
            gap = std::min(gap, std::abs(scalar_traits<S>::to_complex(pts[i]) - scalar_traits<S>::to_complex(pts[j])));
    std::string last;
    for (const auto& c : prev.coords) last += scalar_traits<S>::to_string(c) + " ";
    throw NumericalError("T_cover did not stabilize by depth " + std::to_string(max_depth) +
                         " (minimum spectral gap " + std::to_string(gap) + ", last class " + last + ")");
}

template <class S>
HCClass<S> T_cover(const SpectralForm<S>& a, int l, unsigned max_depth = 12, TagPolicy policy = TagPolicy::Min) {
    return T_cover_run(a, l, max_depth, policy).value;
}

/// (-1)^l sum_lambda lambda sum_b ranks_b theta_b.
template <class S>
HCClass<S> generalized_chern(const N0Class<S>& x, int l) {
    const auto& alg = x.algebra();
    require_chern_degree(alg, l);
    const auto& theta = unit_chern_classes<S>(alg, l);
    auto total = HCClass<S>::zero(alg, 2 * l);
    for (const auto& [lam, ranks] : x.support())
        for (size_t b = 0; b < ranks.size(); ++b)
            if (ranks[b] != 0) total += theta[b] * (lam * scalar_traits<S>::from_int(ranks[b]));
    return total * sign_power<S>(l);
}

enum class ChernPath { Direct, Cover };

/// (-1)^l T(a), the generalized Chern character of [a].
template <class S>
HCClass<S> generalized_chern_element(const SpectralForm<S>& a, int l, ChernPath path) {
    auto t = path == ChernPath::Direct ? T_direct(a, l) : T_cover(a, l);
    return t * sign_power<S>(l);
}

template <class S>
SpectralForm<S> projection_form(const AlgebraElement<S>& p) {
    SpectralForm<S> sf;
    sf.algebra = p.algebra;
    sf.m = p.m;
    sf.kernel = AlgebraElement<S>::identity(p.algebra, p.m) - p;
    if (!p.is_zero()) sf.pairs.push_back({scalar_traits<S>::one(), p});
    return sf;
}

template <class S>
struct DualPath {
    HCClass<S> lhs;
    HCClass<S> rhs;
    bool equal() const { return lhs == rhs; }
};

template <class S>
DualPath<S> th7_sides(const AlgebraElement<S>& p, int l) {
    if (!is_projection(p)) throw DomainError("verify_th7: element is not a projection");
    return {generalized_chern(n_class(projection_form(p)), l), chern_projection(p, l)};
}

template <class S>
bool verify_th7(const AlgebraElement<S>& p, int l) {
    return th7_sides(p, l).equal();
}

template <class S>
DualPath<S> th8_sides(const N0Class<S>& x, int l) {
    const auto& alg = x.algebra();
    auto hx = h_map(x);
    auto refs = reference_projections<S>(alg);
    auto rhs = HCClass<S>::zero(alg, 2 * l);
    for (size_t i = 0; i < refs.size(); ++i) rhs += chern_projection(refs[i], l) * hx.coeffs[i];
    return {generalized_chern(x, l), rhs};
}

template <class S>
bool verify_th8(const N0Class<S>& x, int l) {
    return th8_sides(x, l).equal();
}

// ---------------------------------------------------------------------------
// Mixed-index tensor of an orthogonal family

template <class S>
void require_orthogonal_family(const std::vector<AlgebraElement<S>>& ps) {
    if (ps.empty()) throw DomainError("projection family is empty");
    for (size_t i = 0; i < ps.size(); ++i) {
        if (!is_projection(ps[i])) throw DomainError("family member " + std::to_string(i) + " is not a projection");
        for (size_t j = 0; j < i; ++j)
            if (!(ps[i] * ps[j]).is_zero())
                throw DomainError("projections " + std::to_string(j) + " and " + std::to_string(i) + " are not orthogonal");
    }
}

/// eta = (sum p_j)^{(2l+1)} - sum p_j^{(2l+1)} over the flattened M_m(A).
template <class S>
TensorElement<S> eta_cycle(const std::vector<AlgebraElement<S>>& ps, int l) {
    require_orthogonal_family(ps);
    const size_t f = static_cast<size_t>(2 * l + 1);
    auto total = AlgebraElement<S>::zero(ps.front().algebra, ps.front().m);
    for (const auto& p : ps) total += p;
    TensorElement<S> eta = tensor_power(total, f);
    for (const auto& p : ps) eta -= tensor_power(p, f);
    return eta;
}

template <class S>
struct EtaReport {
    bool is_cycle = false;          // b(eta) = 0 in CC_{2l-1}
    bool trace_class_zero = false;  // <Tr eta> = 0 in HC_{2l}(A)
    bool witness_requested = false;
    bool witness_found = false;     // b(witness) = eta in CC_{2l}
    std::optional<TensorElement<S>> witness;
    bool ok() const { return is_cycle && trace_class_zero && (!witness_requested || witness_found); }
};

template <class S>
EtaReport<S> verify_eta_vanishes(const std::vector<AlgebraElement<S>>& ps, int l, bool with_witness = false) {
    require_orthogonal_family(ps);
    const auto& base = ps.front().algebra;
    const size_t m = ps.front().m;
    require_chern_degree(base, l);
    EtaReport<S> rep;
    rep.witness_requested = with_witness;
    if (ps.size() == 1) {
        rep.is_cycle = rep.trace_class_zero = true;
        rep.witness_found = true;
        rep.witness = TensorElement<S>(base, m, static_cast<size_t>(2 * l + 1));
        return rep;
    }
    const size_t f = static_cast<size_t>(2 * l + 1);
    auto total = AlgebraElement<S>::zero(base, m);
    for (const auto& p : ps) total += p;

    // trace route through the decomposition, no big tensor needed
    DecompositionRep<S> drep{base, m, {std::vector<AlgebraElement<S>>(f, total)}};
    for (const auto& p : ps) {
        std::vector<AlgebraElement<S>> s(f, p);
        s[0] = p * scalar_traits<S>::from_int(-1);
        drep.summands.push_back(std::move(s));
    }
    rep.trace_class_zero = hc_class(trace_tensor(drep)).is_zero();

    auto eta = eta_cycle(ps, l);
    if (l == 0) {
        rep.is_cycle = true;
    } else {
        CyclicSpace lower(eta.algebra(), f - 2);
        auto z = lower.coordinates(face_op(eta));
        rep.is_cycle = std::all_of(z.begin(), z.end(), [](const S& v) { return scalar_traits<S>::is_zero(v); });
    }
    if (with_witness) {
        rep.witness = is_boundary(eta);
        if (rep.witness) rep.witness_found = cc_equal(face_op(*rep.witness), eta);
    }
    return rep;
}

}  // namespace ncg
