#pragma once

// Seeded random instances. Unitaries come from the Cayley transform of a
// skew-Hermitian Gaussian-integer matrix, so every instance stays exact.

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "ncg/lefschetz.hpp"

namespace ncg {

using Rng = std::mt19937_64;

inline long uniform_int(Rng& rng, long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }
inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

template <class S>
S gaussian_int(Rng& rng, long range) {
    return scalar_traits<S>::from_rational(Rational(uniform_int(rng, -range, range)),
                                           Rational(uniform_int(rng, -range, range)));
}

/// Nonzero Gaussian rational with small height.
template <class S>
S random_nonzero_value(Rng& rng, long range = 3) {
    while (true) {
        long den = uniform_int(rng, 1, 2);
        S v = scalar_traits<S>::from_rational(make_rational(uniform_int(rng, -range, range), den),
                                              make_rational(uniform_int(rng, -range, range), den));
        if (!scalar_traits<S>::is_zero(v)) return v;
    }
}

/// (I - K)(I + K)^{-1} with K skew-Hermitian; sometimes the identity.
template <class S>
Matrix<S> random_unitary(Rng& rng, size_t n, long range = 1) {
    Matrix<S> a(n, n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) a(i, j) = gaussian_int<S>(rng, range);
    Matrix<S> k = a - a.adjoint();
    auto id = Matrix<S>::identity(n);
    return (id - k) * inverse(id + k);
}

/// U diag(values) U* for a fresh unitary U.
template <class S>
Matrix<S> conjugated_diagonal(Rng& rng, const std::vector<S>& diag) {
    auto u = random_unitary<S>(rng, diag.size());
    return u * Matrix<S>::diagonal(diag) * u.adjoint();
}

template <class S>
MultiMatrixAlgebra random_algebra(Rng& rng, size_t max_factors = 3, size_t max_block = 2) {
    std::vector<size_t> b(static_cast<size_t>(uniform_int(rng, 1, static_cast<long>(max_factors))));
    for (auto& r : b) r = static_cast<size_t>(uniform_int(rng, 1, static_cast<long>(max_block)));
    return MultiMatrixAlgebra(b);
}

/// Random spectral form whose eigenvalues come from `pool` (plus 0).
template <class S>
SpectralForm<S> random_spectral_form(Rng& rng, const MultiMatrixAlgebra& alg, size_t m, const std::vector<S>& pool,
                                     double zero_prob = 0.2) {
    using T = scalar_traits<S>;
    SpectralForm<S> sf;
    sf.algebra = alg;
    sf.m = m;
    sf.kernel = AlgebraElement<S>::zero(alg, m);
    // per block: value index for each diagonal slot (pool.size() = zero)
    std::vector<std::vector<size_t>> slot(alg.factors());
    std::vector<Matrix<S>> us;
    for (size_t b = 0; b < alg.factors(); ++b) {
        size_t s = m * alg.blocks[b];
        for (size_t i = 0; i < s; ++i)
            slot[b].push_back(coin(rng, zero_prob) ? pool.size()
                                                   : static_cast<size_t>(uniform_int(rng, 0, static_cast<long>(pool.size()) - 1)));
        us.push_back(random_unitary<S>(rng, s));
    }
    auto proj_for = [&](size_t v) {
        auto p = AlgebraElement<S>::zero(alg, m);
        for (size_t b = 0; b < alg.factors(); ++b) {
            size_t s = m * alg.blocks[b];
            std::vector<S> d(s, T::zero());
            bool any = false;
            for (size_t i = 0; i < s; ++i)
                if (slot[b][i] == v) {
                    d[i] = T::one();
                    any = true;
                }
            if (any) p.blocks[b] = us[b] * Matrix<S>::diagonal(d) * us[b].adjoint();
        }
        return p;
    };
    for (size_t v = 0; v < pool.size(); ++v) {
        auto p = proj_for(v);
        if (!p.is_zero()) sf.pairs.push_back({pool[v], std::move(p)});
    }
    sf.kernel = proj_for(pool.size());
    sf.canonicalize();
    return sf;
}

template <class S>
std::vector<S> random_pool(Rng& rng, size_t count, long range = 3) {
    std::vector<S> pool;
    while (pool.size() < count) {
        S v = random_nonzero_value<S>(rng, range);
        bool dup = std::any_of(pool.begin(), pool.end(), [&](const S& x) { return scalar_traits<S>::equal(x, v); });
        if (!dup) pool.push_back(v);
    }
    return pool;
}

template <class S>
AlgebraElement<S> random_projection(Rng& rng, const MultiMatrixAlgebra& alg, size_t m) {
    auto sf = random_spectral_form<S>(rng, alg, m, {scalar_traits<S>::one()}, 0.5);
    return sf.pairs.empty() ? AlgebraElement<S>::zero(alg, m) : sf.pairs.front().projection;
}

/// N pairwise orthogonal nonzero projections in M_m(A); needs N <= total rank.
template <class S>
std::vector<AlgebraElement<S>> random_orthogonal_family(Rng& rng, const MultiMatrixAlgebra& alg, size_t m, size_t count) {
    using T = scalar_traits<S>;
    std::vector<std::pair<size_t, size_t>> slots;  // (block, diagonal index)
    for (size_t b = 0; b < alg.factors(); ++b)
        for (size_t i = 0; i < m * alg.blocks[b]; ++i) slots.push_back({b, i});
    if (count == 0 || count > slots.size()) throw ValidationError("orthogonal family size exceeds total rank");
    std::shuffle(slots.begin(), slots.end(), rng);
    std::vector<size_t> owner(slots.size());
    for (size_t i = 0; i < slots.size(); ++i)
        owner[i] = i < count ? i : static_cast<size_t>(uniform_int(rng, 0, static_cast<long>(count)));  // count = unused
    std::vector<Matrix<S>> us;
    for (size_t b = 0; b < alg.factors(); ++b) us.push_back(random_unitary<S>(rng, m * alg.blocks[b]));
    std::vector<AlgebraElement<S>> out;
    for (size_t j = 0; j < count; ++j) {
        auto p = AlgebraElement<S>::zero(alg, m);
        for (size_t b = 0; b < alg.factors(); ++b) {
            std::vector<S> d(m * alg.blocks[b], T::zero());
            bool any = false;
            for (size_t i = 0; i < slots.size(); ++i)
                if (owner[i] == j && slots[i].first == b) {
                    d[slots[i].second] = T::one();
                    any = true;
                }
            if (any) p.blocks[b] = us[b] * Matrix<S>::diagonal(d) * us[b].adjoint();
        }
        out.push_back(std::move(p));
    }
    return out;
}

template <class S>
N0Class<S> random_n0(Rng& rng, const MultiMatrixAlgebra& alg, size_t max_support = 4, long range = 3) {
    N0Class<S> x(alg);
    size_t n = static_cast<size_t>(uniform_int(rng, 0, static_cast<long>(max_support)));
    auto pool = random_pool<S>(rng, n, range);
    for (const auto& lam : pool) {
        K0Class r(alg.factors());
        for (auto& v : r) v = uniform_int(rng, -3, 3);
        x.add(lam, r);
    }
    return x;
}

/// Random unital *-homomorphism out of `source` with small target blocks.
template <class S>
StarHomomorphism<S> random_hom(Rng& rng, const MultiMatrixAlgebra& source, size_t max_factors = 3, size_t max_size = 6) {
    StarHomomorphism<S> h;
    h.source = source;
    size_t k = static_cast<size_t>(uniform_int(rng, 1, static_cast<long>(max_factors)));
    std::vector<size_t> dims;
    for (size_t i = 0; i < k; ++i) {
        std::vector<size_t> row(source.factors(), 0);
        size_t total = 0;
        while (total == 0) {
            std::fill(row.begin(), row.end(), 0);
            total = 0;
            for (size_t j = 0; j < source.factors(); ++j) {
                size_t mij = static_cast<size_t>(uniform_int(rng, 0, 2));
                if (total + mij * source.blocks[j] > max_size) mij = 0;
                row[j] = mij;
                total += mij * source.blocks[j];
            }
        }
        h.mult.push_back(row);
        dims.push_back(total);
    }
    h.target = MultiMatrixAlgebra(dims);
    for (size_t d : dims) h.unitaries.push_back(random_unitary<S>(rng, d));
    return h;
}

// ---------------------------------------------------------------------------
// Equivariant complexes

template <class S>
struct RandomModule {
    AlgebraElement<S> q;
    std::vector<ModuleMap<S>> action;  // per group element
};

/// q = W diag(I_t, 0) W*, U_g = W (rho(g) + 0) W* with rho a random sum of irreps.
template <class S>
RandomModule<S> random_module(Rng& rng, const MultiMatrixAlgebra& alg, size_t n, const FiniteGroup& g,
                              const IrrepTable<S>& irreps) {
    using T = scalar_traits<S>;
    RandomModule<S> mod;
    mod.q = AlgebraElement<S>::zero(alg, n);
    mod.action.assign(g.order(), ModuleMap<S>::zero(alg, n, n));
    for (size_t b = 0; b < alg.factors(); ++b) {
        size_t s = n * alg.blocks[b];
        size_t target = static_cast<size_t>(uniform_int(rng, 0, static_cast<long>(s)));
        std::vector<size_t> chosen;
        size_t used = 0;
        for (int tries = 0; tries < 20 && used < target; ++tries) {
            size_t k = static_cast<size_t>(uniform_int(rng, 0, static_cast<long>(irreps.irreps.size()) - 1));
            if (used + irreps.irreps[k].dim <= target) {
                chosen.push_back(k);
                used += irreps.irreps[k].dim;
            }
        }
        auto w = random_unitary<S>(rng, s);
        std::vector<S> d(s, T::zero());
        for (size_t i = 0; i < used; ++i) d[i] = T::one();
        mod.q.blocks[b] = w * Matrix<S>::diagonal(d) * w.adjoint();
        for (size_t a = 0; a < g.order(); ++a) {
            Matrix<S> rho(s, s);
            size_t off = 0;
            for (size_t k : chosen) {
                rho.set_block(off, off, irreps.irreps[k].mats[a]);
                off += irreps.irreps[k].dim;
            }
            mod.action[a].blocks[b] = w * rho * w.adjoint();
        }
    }
    return mod;
}

/// Orthogonal projection onto the column space of each block.
template <class S>
ModuleMap<S> image_projection(const ModuleMap<S>& f) {
    auto p = ModuleMap<S>::zero(f.algebra, f.rows, f.rows);
    for (size_t b = 0; b < f.blocks.size(); ++b) {
        auto piv = rref(f.blocks[b]).pivots;
        Matrix<S> cols(f.blocks[b].rows(), piv.size());
        for (size_t k = 0; k < piv.size(); ++k)
            for (size_t i = 0; i < cols.rows(); ++i) cols(i, k) = f.blocks[b](i, piv[k]);
        p.blocks[b] = column_projection(cols);
    }
    return p;
}

/// (1/|G|) sum_g U'_g M U_{g^{-1}}: an equivariant map module -> module'.
template <class S>
ModuleMap<S> average_map(const ModuleMap<S>& m, const std::vector<ModuleMap<S>>& target_action,
                         const std::vector<ModuleMap<S>>& source_action, const FiniteGroup& g) {
    auto acc = ModuleMap<S>::zero(m.algebra, m.rows, m.cols);
    for (size_t a = 0; a < g.order(); ++a) acc = acc + target_action[a] * m * source_action[g.inverse[a]];
    return acc * scalar_traits<S>::from_rational(make_rational(1, static_cast<long>(g.order())));
}

template <class S>
ModuleMap<S> random_module_map(Rng& rng, const MultiMatrixAlgebra& alg, size_t rows, size_t cols) {
    auto f = ModuleMap<S>::zero(alg, rows, cols);
    int kind = static_cast<int>(uniform_int(rng, 0, 3));
    if (kind == 0) return f;  // zero map leaves homology behind
    for (auto& b : f.blocks) {
        if (kind == 1) {  // rank one
            std::vector<S> u(b.rows()), v(b.cols());
            for (auto& x : u) x = gaussian_int<S>(rng, 2);
            for (auto& x : v) x = gaussian_int<S>(rng, 2);
            for (size_t i = 0; i < b.rows(); ++i)
                for (size_t j = 0; j < b.cols(); ++j) b(i, j) = u[i] * v[j];
        } else {
            for (size_t i = 0; i < b.rows(); ++i)
                for (size_t j = 0; j < b.cols(); ++j) b(i, j) = gaussian_int<S>(rng, 2);
        }
    }
    return f;
}

/// Length-L equivariant complex: action first, then averaged differentials
/// built from the top down with d_j = avg(M_j) (q_j - P_{Im d_{j+1}}).
template <class S>
GAComplex<S> random_complex(Rng& rng, const MultiMatrixAlgebra& alg, const FiniteGroup& g, const IrrepTable<S>& irreps,
                            size_t length, size_t max_rank = 2) {
    GAComplex<S> c;
    c.algebra = alg;
    c.group = g;
    c.irreps = irreps;
    std::vector<RandomModule<S>> mods;
    for (size_t j = 0; j < length; ++j)
        mods.push_back(random_module(rng, alg, static_cast<size_t>(uniform_int(rng, 1, static_cast<long>(max_rank))), g, irreps));
    for (const auto& m : mods) c.modules.push_back(m.q);
    c.action.assign(g.order(), {});
    for (size_t a = 0; a < g.order(); ++a)
        for (const auto& m : mods) c.action[a].push_back(m.action[a]);
    c.diffs.resize(length > 0 ? length - 1 : 0);
    for (size_t j = length; j-- > 1;) {
        auto raw = random_module_map<S>(rng, alg, c.rank(j - 1), c.rank(j));
        auto d = average_map(raw, mods[j - 1].action, mods[j].action, g);
        if (j + 1 < length) d = d * (c.q(j) - image_projection(c.diffs[j]));
        c.diffs[j - 1] = d;
    }
    return c;
}

}  // namespace ncg
