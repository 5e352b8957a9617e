#pragma once

// K0 and N0 of multi-matrix algebras.
//
// K0(A) = Z^k via per-block ranks. An N0 class is a finitely supported map
// from nonzero complex numbers to K0(A); [a] - [b] maps lambda to
// [P_a({lambda})] - [P_b({lambda})].

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "ncg/algebra.hpp"

namespace ncg {

using K0Class = std::vector<long>;

inline bool k0_is_zero(const K0Class& v) {
    return std::all_of(v.begin(), v.end(), [](long x) { return x == 0; });
}
inline K0Class k0_add(K0Class a, const K0Class& b) {
    if (a.size() != b.size()) throw ValidationError("K0 classes of different length");
    for (size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}
inline K0Class k0_scale(K0Class a, long s) {
    for (auto& x : a) x *= s;
    return a;
}

/// Per-block rank of a projection (its trace, which is an integer).
template <class S>
K0Class k0_of_projection(const AlgebraElement<S>& p) {
    if (!is_projection(p)) throw DomainError("k0_of_projection: element is not a projection");
    K0Class r;
    for (const auto& b : p.blocks) {
        Float t = scalar_traits<S>::to_complex(b.trace());
        r.push_back(std::lround(t.real()));
    }
    return r;
}

/// Elements of K0(A) (x) C, coordinates in the rank basis.
template <class S>
struct K0TensorC {
    std::vector<S> coeffs;
    friend bool operator==(const K0TensorC& a, const K0TensorC& b) {
        if (a.coeffs.size() != b.coeffs.size()) return false;
        for (size_t i = 0; i < a.coeffs.size(); ++i)
            if (!scalar_traits<S>::equal(a.coeffs[i], b.coeffs[i])) return false;
        return true;
    }
};

template <class S>
class N0Class {
public:
    using T = scalar_traits<S>;
    using Entry = std::pair<S, K0Class>;

    N0Class() = default;
    explicit N0Class(MultiMatrixAlgebra alg) : algebra_(std::move(alg)) {}

    const MultiMatrixAlgebra& algebra() const { return algebra_; }
    const std::vector<Entry>& support() const { return support_; }
    bool empty() const { return support_.empty(); }

    /// Adds ranks at lambda; lambda == 0 contributes nothing ([0 p] = 0).
    void add(const S& lambda, const K0Class& ranks) {
        if (ranks.size() != algebra_.factors())
            throw ValidationError("N0 support value has " + std::to_string(ranks.size()) + " entries, algebra has " +
                                  std::to_string(algebra_.factors()) + " blocks");
        if (key_is_zero(lambda) || k0_is_zero(ranks)) return;
        for (auto it = support_.begin(); it != support_.end(); ++it) {
            if (keys_match(it->first, lambda)) {
                it->second = k0_add(it->second, ranks);
                if (k0_is_zero(it->second)) support_.erase(it);
                return;
            }
        }
        auto pos = std::lower_bound(support_.begin(), support_.end(), lambda,
                                    [](const Entry& e, const S& l) { return T::compare(e.first, l) < 0; });
        support_.insert(pos, {lambda, ranks});
    }

    /// Ranks at lambda (zero vector when absent).
    K0Class at(const S& lambda) const {
        for (const auto& e : support_)
            if (keys_match(e.first, lambda)) return e.second;
        return K0Class(algebra_.factors(), 0);
    }

    N0Class operator-() const {
        N0Class r(algebra_);
        for (const auto& e : support_) r.support_.push_back({e.first, k0_scale(e.second, -1)});
        return r;
    }
    N0Class& operator+=(const N0Class& o) {
        require_same_algebra(algebra_, o.algebra_, "N0 addition");
        for (const auto& e : o.support_) add(e.first, e.second);
        return *this;
    }
    N0Class& operator-=(const N0Class& o) { return *this += -o; }
    friend N0Class operator+(N0Class a, const N0Class& b) { return a += b; }
    friend N0Class operator-(N0Class a, const N0Class& b) { return a -= b; }
    friend N0Class operator*(long s, const N0Class& a) {
        N0Class r(a.algebra_);
        for (const auto& e : a.support_) r.add(e.first, k0_scale(e.second, s));
        return r;
    }

    friend bool operator==(const N0Class& a, const N0Class& b) {
        if (!(a.algebra_ == b.algebra_) || a.support_.size() != b.support_.size()) return false;
        for (const auto& e : a.support_)
            if (b.at(e.first) != e.second) return false;
        return true;
    }

    static bool keys_match(const S& a, const S& b) {
        if constexpr (T::is_exact)
            return T::equal(a, b);
        else
            return std::abs(a - b) <= 2 * epsilon();
    }
    static bool key_is_zero(const S& a) {
        if constexpr (T::is_exact)
            return T::is_zero(a);
        else
            return std::abs(a) <= 2 * epsilon();
    }

private:
    MultiMatrixAlgebra algebra_;
    std::vector<Entry> support_;
};

template <class S>
N0Class<S> n_class(const SpectralForm<S>& a) {
    N0Class<S> x(a.algebra);
    for (const auto& p : a.pairs) x.add(p.lambda, k0_of_projection(p.projection));
    return x;
}

template <class S>
bool n_equiv(const SpectralForm<S>& a, const SpectralForm<S>& b) {
    require_same_algebra(a.algebra, b.algebra, "n_equiv");
    return n_class(a) == n_class(b);
}

template <class S>
N0Class<S> n0_add(const N0Class<S>& x, const N0Class<S>& y) {
    return x + y;
}
template <class S>
N0Class<S> n0_neg(const N0Class<S>& x) {
    return -x;
}

template <class S>
K0TensorC<S> h_map(const N0Class<S>& x) {
    using T = scalar_traits<S>;
    K0TensorC<S> v{std::vector<S>(x.algebra().factors(), T::zero())};
    for (const auto& [lam, ranks] : x.support())
        for (size_t i = 0; i < ranks.size(); ++i) v.coeffs[i] += lam * T::from_int(ranks[i]);
    return v;
}

/// h_{lambda,mu;p} = [p(lambda+mu)] - [p lambda + p mu].
template <class S>
N0Class<S> generator_h(const S& lambda, const S& mu, const AlgebraElement<S>& p) {
    K0Class r = k0_of_projection(p);
    N0Class<S> x(p.algebra);
    x.add(lambda + mu, r);
    x.add(lambda, k0_scale(r, -1));
    x.add(mu, k0_scale(r, -1));
    return x;
}

/// g^(n)_{lambda;p} = [lambda p^{+n}] - [n lambda p].
template <class S>
N0Class<S> generator_g(long n, const S& lambda, const AlgebraElement<S>& p) {
    if (n < 1) throw ValidationError("generator_g needs n >= 1");
    K0Class r = k0_of_projection(p);
    N0Class<S> x(p.algebra);
    x.add(lambda, k0_scale(r, n));
    x.add(lambda * scalar_traits<S>::from_int(n), k0_scale(r, -1));
    return x;
}

/// Signed reference to h_{lambda,mu;p}.
template <class S>
struct HGeneratorRef {
    int sign;
    S lambda;
    S mu;
};

/// g^(n) = -sum_{k=1}^{n-1} h_{k lambda, lambda; p}.
template <class S>
std::vector<HGeneratorRef<S>> reduce_g_to_h(long n, const S& lambda) {
    if (n < 1) throw ValidationError("reduce_g_to_h needs n >= 1");
    std::vector<HGeneratorRef<S>> out;
    for (long k = 1; k < n; ++k) out.push_back({-1, lambda * scalar_traits<S>::from_int(k), lambda});
    return out;
}

template <class S>
N0Class<S> evaluate(const std::vector<HGeneratorRef<S>>& refs, const AlgebraElement<S>& p) {
    N0Class<S> x(p.algebra);
    for (const auto& r : refs) x += static_cast<long>(r.sign) * generator_h(r.lambda, r.mu, p);
    return x;
}

/// Reference projections e^{(b)}_{00}, one per factor.
template <class S>
std::vector<AlgebraElement<S>> reference_projections(const MultiMatrixAlgebra& alg) {
    std::vector<AlgebraElement<S>> out;
    for (size_t b = 0; b < alg.factors(); ++b) out.push_back(AlgebraElement<S>::unit(alg, b, 0, 0));
    return out;
}

/// Coset representative sum_i {c_i -> [e_i]}.
template <class S>
N0Class<S> t_map(const K0TensorC<S>& v, const std::vector<AlgebraElement<S>>& generators) {
    if (generators.empty()) throw ValidationError("t_map needs reference projections");
    const auto& alg = generators.front().algebra;
    if (v.coeffs.size() != alg.factors() || generators.size() != alg.factors())
        throw ValidationError("t_map: need one coefficient and one reference projection per block");
    N0Class<S> x(alg);
    for (size_t i = 0; i < v.coeffs.size(); ++i) {
        if (scalar_traits<S>::is_zero(v.coeffs[i])) continue;
        K0Class e = k0_of_projection(generators[i]);
        K0Class unit(alg.factors(), 0);
        unit[i] = 1;
        if (e != unit) throw ValidationError("t_map: reference projection " + std::to_string(i) + " is not rank one in its block");
        x.add(v.coeffs[i], e);
    }
    return x;
}

template <class S>
N0Class<S> t_map(const K0TensorC<S>& v, const MultiMatrixAlgebra& alg) {
    return t_map(v, reference_projections<S>(alg));
}

template <class S>
K0Class push_k0(const StarHomomorphism<S>& phi, const K0Class& r) {
    K0Class out(phi.target.factors(), 0);
    for (size_t i = 0; i < out.size(); ++i)
        for (size_t j = 0; j < r.size(); ++j) out[i] += static_cast<long>(phi.mult[i][j]) * r[j];
    return out;
}

template <class S>
N0Class<S> functorial_map(const StarHomomorphism<S>& phi, const N0Class<S>& x) {
    require_same_algebra(phi.source, x.algebra(), "functorial_map");
    N0Class<S> y(phi.target);
    for (const auto& [lam, r] : x.support()) y.add(lam, push_k0(phi, r));
    return y;
}

/// Diagonal projection in M_m(A) with the given per-block ranks, m chosen minimally.
template <class S>
AlgebraElement<S> diagonal_projection(const MultiMatrixAlgebra& alg, const K0Class& ranks, size_t m = 0) {
    size_t need = 1;
    for (size_t i = 0; i < ranks.size(); ++i) {
        if (ranks[i] < 0) throw ValidationError("diagonal_projection needs nonnegative ranks");
        need = std::max(need, (static_cast<size_t>(ranks[i]) + alg.blocks[i] - 1) / alg.blocks[i]);
    }
    if (m == 0) m = need;
    if (m < need) throw ValidationError("amplification too small for requested ranks");
    auto p = AlgebraElement<S>::zero(alg, m);
    for (size_t i = 0; i < ranks.size(); ++i)
        for (long k = 0; k < ranks[i]; ++k) p.blocks[i](k, k) = scalar_traits<S>::one();
    return p;
}

template <class S>
struct Realization {
    SpectralForm<S> a;
    SpectralForm<S> b;
};

/// Normal elements a, b with [a] - [b] = x: a = sum lambda p_lambda^+, b likewise.
template <class S>
Realization<S> realize(const N0Class<S>& x) {
    const auto& alg = x.algebra();
    auto build = [&](int sign) {
        std::vector<std::pair<S, K0Class>> parts;
        for (const auto& [lam, r] : x.support()) {
            K0Class q(r.size(), 0);
            for (size_t i = 0; i < r.size(); ++i) q[i] = std::max(0L, sign * r[i]);
            if (!k0_is_zero(q)) parts.push_back({lam, q});
        }
        // each part occupies its own diagonal slot range of M_m(A)
        std::vector<size_t> amps;
        size_t m = 0;
        for (const auto& [lam, q] : parts) {
            size_t need = 1;
            for (size_t i = 0; i < q.size(); ++i)
                need = std::max(need, (static_cast<size_t>(q[i]) + alg.blocks[i] - 1) / alg.blocks[i]);
            amps.push_back(need);
            m += need;
        }
        if (m == 0) m = 1;
        SpectralForm<S> sf;
        sf.algebra = alg;
        sf.m = m;
        auto used = AlgebraElement<S>::zero(alg, m);
        size_t slot = 0;
        for (size_t k = 0; k < parts.size(); ++k) {
            auto p = AlgebraElement<S>::zero(alg, m);
            for (size_t i = 0; i < alg.factors(); ++i) {
                size_t start = slot * alg.blocks[i];
                for (long c = 0; c < parts[k].second[i]; ++c) p.blocks[i](start + c, start + c) = scalar_traits<S>::one();
            }
            slot += amps[k];
            used += p;
            sf.pairs.push_back({parts[k].first, std::move(p)});
        }
        sf.kernel = AlgebraElement<S>::identity(alg, m) - used;
        sf.canonicalize();
        return sf;
    };
    return {build(1), build(-1)};
}

}  // namespace ncg
