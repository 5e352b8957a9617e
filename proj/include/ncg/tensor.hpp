#pragma once

// Tensor powers A^{(n+1)} in the matrix-unit basis, the cyclic and face
// operators, the trace map M_r(A)^{(n+1)} -> A^{(n+1)}, and decomposition
// representatives x_0 [] ... [] x_n with their projective-type norm.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ncg/algebra.hpp"

namespace ncg {

using Tuple = std::vector<uint32_t>;

/// Matrix-unit basis of a multi-matrix algebra: index = offset_b + row*r_b + col.
class UnitBasis {
public:
    UnitBasis() = default;
    explicit UnitBasis(const MultiMatrixAlgebra& alg) : alg_(alg) {
        for (size_t b = 0; b < alg.factors(); ++b) {
            offset_.push_back(dim_);
            size_t r = alg.blocks[b];
            for (size_t i = 0; i < r * r; ++i) {
                block_.push_back(static_cast<uint32_t>(b));
                row_.push_back(static_cast<uint32_t>(i / r));
                col_.push_back(static_cast<uint32_t>(i % r));
            }
            dim_ += r * r;
        }
    }

    const MultiMatrixAlgebra& algebra() const { return alg_; }
    size_t dim() const { return dim_; }
    uint32_t block(uint32_t u) const { return block_[u]; }
    uint32_t row(uint32_t u) const { return row_[u]; }
    uint32_t col(uint32_t u) const { return col_[u]; }
    uint32_t unit(size_t b, size_t row, size_t col) const {
        return static_cast<uint32_t>(offset_[b] + row * alg_.blocks[b] + col);
    }

    /// e_u e_v as a unit index, or nothing when the product vanishes.
    std::optional<uint32_t> product(uint32_t u, uint32_t v) const {
        if (block_[u] != block_[v] || col_[u] != row_[v]) return std::nullopt;
        return unit(block_[u], row_[u], col_[v]);
    }

    /// Nonzero (unit, coefficient) pairs of an element with m = 1.
    template <class S>
    std::vector<std::pair<uint32_t, S>> expand(const AlgebraElement<S>& x) const {
        std::vector<std::pair<uint32_t, S>> out;
        for (size_t b = 0; b < x.blocks.size(); ++b) {
            const auto& mat = x.blocks[b];
            for (size_t i = 0; i < mat.rows(); ++i)
                for (size_t j = 0; j < mat.cols(); ++j)
                    if (!scalar_traits<S>::is_zero(mat(i, j))) out.push_back({unit(b, i, j), mat(i, j)});
        }
        return out;
    }

private:
    MultiMatrixAlgebra alg_;
    size_t dim_ = 0;
    std::vector<size_t> offset_;
    std::vector<uint32_t> block_, row_, col_;
};

/// rot(t) = (t_n, t_0, ..., t_{n-1}).
inline Tuple rotate(const Tuple& t) {
    Tuple r(t.size());
    if (t.empty()) return r;
    r[0] = t.back();
    for (size_t s = 1; s < t.size(); ++s) r[s] = t[s - 1];
    return r;
}

/// Sparse element of M_m(A)^{(degree+1)}. Indices refer to the unit basis of
/// the flattened algebra base.amplified(m).
template <class S>
struct TensorElement {
    using T = scalar_traits<S>;

    MultiMatrixAlgebra base;
    size_t m = 1;
    size_t degree = 0;
    std::map<Tuple, S> terms;

    TensorElement() = default;
    TensorElement(MultiMatrixAlgebra b, size_t amp, size_t deg) : base(std::move(b)), m(amp), degree(deg) {}

    MultiMatrixAlgebra algebra() const { return base.amplified(m); }

    void add(const Tuple& t, const S& c) {
        if (T::is_zero(c)) return;
        if (t.size() != degree + 1) throw ValidationError("tensor index tuple has wrong length");
        auto it = terms.find(t);
        if (it == terms.end()) {
            terms.emplace(t, c);
            return;
        }
        it->second += c;
        if (T::is_zero(it->second)) terms.erase(it);
    }

    bool is_zero() const { return terms.empty(); }

    void check_compatible(const TensorElement& o) const {
        require_same_algebra(base, o.base, "tensor arithmetic");
        if (m != o.m || degree != o.degree) throw ValidationError("tensor shape mismatch");
    }
    TensorElement& operator+=(const TensorElement& o) {
        check_compatible(o);
        for (const auto& [t, c] : o.terms) add(t, c);
        return *this;
    }
    TensorElement& operator-=(const TensorElement& o) {
        check_compatible(o);
        for (const auto& [t, c] : o.terms) add(t, -c);
        return *this;
    }
    TensorElement& operator*=(const S& s) {
        if (T::is_zero(s)) {
            terms.clear();
            return *this;
        }
        for (auto& [t, c] : terms) c *= s;
        return *this;
    }
    friend TensorElement operator+(TensorElement a, const TensorElement& b) { return a += b; }
    friend TensorElement operator-(TensorElement a, const TensorElement& b) { return a -= b; }
    friend TensorElement operator*(TensorElement a, const S& s) { return a *= s; }
    friend bool operator==(const TensorElement& a, const TensorElement& b) {
        if (!(a.base == b.base) || a.m != b.m || a.degree != b.degree) return false;
        TensorElement d = a - b;
        return d.is_zero();
    }

    /// Checks every index against the unit basis.
    void validate() const {
        size_t dim = algebra().dimension();
        for (const auto& [t, c] : terms) {
            if (t.size() != degree + 1) throw ValidationError("tensor index tuple has wrong length");
            for (auto u : t)
                if (u >= dim) throw ValidationError("tensor index " + std::to_string(u) + " out of range");
        }
    }
};

/// x_0 (x) ... (x) x_n for elements over the same flattened algebra.
template <class S>
TensorElement<S> tensor_product(const std::vector<AlgebraElement<S>>& xs) {
    if (xs.empty()) throw DomainError("tensor_product of an empty list");
    const auto& base = xs.front().algebra;
    const size_t m = xs.front().m;
    for (const auto& x : xs) {
        require_same_algebra(base, x.algebra, "tensor_product");
        if (x.m != m) throw ValidationError("tensor_product: amplification mismatch");
    }
    UnitBasis ub(base.amplified(m));
    std::vector<std::vector<std::pair<uint32_t, S>>> parts;
    for (const auto& x : xs) parts.push_back(ub.expand(x.flatten()));
    TensorElement<S> out(base, m, xs.size() - 1);
    Tuple t(xs.size());
    std::function<void(size_t, const S&)> rec = [&](size_t s, const S& c) {
        if (s == xs.size()) {
            out.add(t, c);
            return;
        }
        for (const auto& [u, v] : parts[s]) {
            t[s] = u;
            rec(s + 1, c * v);
        }
    };
    rec(0, scalar_traits<S>::one());
    return out;
}

template <class S>
TensorElement<S> tensor_power(const AlgebraElement<S>& x, size_t factors) {
    return tensor_product(std::vector<AlgebraElement<S>>(factors, x));
}

/// tau_n(a_0 .. a_n) = (-1)^n a_n a_0 .. a_{n-1}.
template <class S>
TensorElement<S> cyclic_op(const TensorElement<S>& xi) {
    TensorElement<S> out(xi.base, xi.m, xi.degree);
    S sign = sign_power<S>(static_cast<long>(xi.degree));
    for (const auto& [t, c] : xi.terms) out.add(rotate(t), c * sign);
    return out;
}

namespace detail {

// Visits the nonzero terms of d_i(e_t) (without the (-1)^i of b).
template <class F>
void face_on_tuple(const UnitBasis& ub, const Tuple& t, size_t i, F&& emit) {
    const size_t n = t.size() - 1;
    Tuple r;
    r.reserve(n);
    if (i < n) {
        auto p = ub.product(t[i], t[i + 1]);
        if (!p) return;
        for (size_t s = 0; s < i; ++s) r.push_back(t[s]);
        r.push_back(*p);
        for (size_t s = i + 2; s <= n; ++s) r.push_back(t[s]);
    } else {
        auto p = ub.product(t[n], t[0]);
        if (!p) return;
        r.push_back(*p);
        for (size_t s = 1; s < n; ++s) r.push_back(t[s]);
    }
    emit(r);
}

}  // namespace detail

template <class S>
TensorElement<S> face_component(const TensorElement<S>& xi, size_t i) {
    if (xi.degree == 0) throw DomainError("face operator needs degree >= 1");
    if (i > xi.degree) throw ValidationError("face index out of range");
    UnitBasis ub(xi.algebra());
    TensorElement<S> out(xi.base, xi.m, xi.degree - 1);
    for (const auto& [t, c] : xi.terms) detail::face_on_tuple(ub, t, i, [&](const Tuple& r) { out.add(r, c); });
    return out;
}

/// b = sum_i (-1)^i d_i.
template <class S>
TensorElement<S> face_op(const TensorElement<S>& xi) {
    if (xi.degree == 0) throw DomainError("face operator needs degree >= 1");
    UnitBasis ub(xi.algebra());
    TensorElement<S> out(xi.base, xi.m, xi.degree - 1);
    for (const auto& [t, c] : xi.terms)
        for (size_t i = 0; i <= xi.degree; ++i) {
            S ci = (i % 2 == 0) ? c : S(-c);
            detail::face_on_tuple(ub, t, i, [&](const Tuple& r) { out.add(r, ci); });
        }
    return out;
}

/// Tr: M_m(A)^{(n+1)} -> A^{(n+1)}; a unit tuple survives iff its matrix
/// indices chain cyclically (beta_s = alpha_{s+1}).
template <class S>
TensorElement<S> trace_map(const TensorElement<S>& xi) {
    UnitBasis big(xi.algebra());
    UnitBasis small(xi.base);
    TensorElement<S> out(xi.base, 1, xi.degree);
    const size_t len = xi.degree + 1;
    for (const auto& [t, c] : xi.terms) {
        Tuple r(len);
        bool ok = true;
        for (size_t s = 0; s < len && ok; ++s) {
            uint32_t u = t[s], v = t[(s + 1) % len];
            size_t bu = big.block(u), bv = big.block(v);
            size_t rb = xi.base.blocks[bu], rbv = xi.base.blocks[bv];
            size_t beta = big.col(u) / rb, alpha_next = big.row(v) / rbv;
            if (beta != alpha_next) ok = false;
            r[s] = small.unit(bu, big.row(u) % rb, big.col(u) % rb);
        }
        if (ok) out.add(r, c);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Decomposition representatives

template <class S>
struct DecompositionRep {
    MultiMatrixAlgebra base;
    size_t m = 1;
    std::vector<std::vector<AlgebraElement<S>>> summands;

    size_t degree() const {
        if (summands.empty()) throw DomainError("empty decomposition");
        return summands.front().size() - 1;
    }

    void validate() const {
        if (summands.empty()) throw DomainError("empty decomposition");
        size_t len = summands.front().size();
        if (len == 0) throw DomainError("decomposition summand is empty");
        for (const auto& s : summands) {
            if (s.size() != len) throw ValidationError("decomposition summands have different lengths");
            for (const auto& x : s) {
                require_same_algebra(base, x.algebra, "decomposition");
                if (x.m != m) throw ValidationError("decomposition: amplification mismatch");
            }
        }
    }

    TensorElement<S> expand() const {
        validate();
        TensorElement<S> out(base, m, degree());
        for (const auto& s : summands) out += tensor_product(s);
        return out;
    }
};

/// sum over summands of the product of C*-norms.
template <class S>
double decomposition_norm(const DecompositionRep<S>& rep) {
    rep.validate();
    double total = 0;
    for (const auto& s : rep.summands) {
        double p = 1;
        for (const auto& x : s) p *= x.norm();
        total += p;
    }
    return total;
}

/// Summand-wise d_i.
template <class S>
DecompositionRep<S> face_rep(const DecompositionRep<S>& rep, size_t i) {
    rep.validate();
    const size_t n = rep.degree();
    if (n == 0) throw DomainError("face operator needs degree >= 1");
    if (i > n) throw ValidationError("face index out of range");
    DecompositionRep<S> out{rep.base, rep.m, {}};
    for (const auto& s : rep.summands) {
        std::vector<AlgebraElement<S>> r;
        if (i < n) {
            for (size_t k = 0; k < i; ++k) r.push_back(s[k]);
            r.push_back(s[i] * s[i + 1]);
            for (size_t k = i + 2; k <= n; ++k) r.push_back(s[k]);
        } else {
            r.push_back(s[n] * s[0]);
            for (size_t k = 1; k < n; ++k) r.push_back(s[k]);
        }
        out.summands.push_back(std::move(r));
    }
    return out;
}

/// Expanded trace representative: sum over (i_0..i_n) of x0_{i0 i1} [] ... [] xn_{in i0}.
template <class S>
DecompositionRep<S> trace_rep(const DecompositionRep<S>& rep) {
    rep.validate();
    const size_t len = rep.degree() + 1;
    const size_t r = rep.m;
    DecompositionRep<S> out{rep.base, 1, {}};
    for (const auto& s : rep.summands) {
        std::vector<size_t> idx(len, 0);
        while (true) {
            std::vector<AlgebraElement<S>> t;
            for (size_t k = 0; k < len; ++k) t.push_back(s[k].entry(idx[k], idx[(k + 1) % len]));
            out.summands.push_back(std::move(t));
            size_t k = 0;
            while (k < len && ++idx[k] == r) idx[k++] = 0;
            if (k == len) break;
        }
    }
    return out;
}

/// Tr of the expanded tensor, computed entrywise without building the big tensor.
template <class S>
TensorElement<S> trace_tensor(const DecompositionRep<S>& rep) {
    rep.validate();
    const size_t len = rep.degree() + 1;
    const size_t r = rep.m;
    UnitBasis ub(rep.base);
    TensorElement<S> out(rep.base, 1, len - 1);
    Tuple t(len);
    for (const auto& s : rep.summands) {
        // entries[k][a][b] = expansion of s[k]_{ab}
        std::vector<std::vector<std::vector<std::vector<std::pair<uint32_t, S>>>>> entries(len);
        for (size_t k = 0; k < len; ++k) {
            entries[k].assign(r, std::vector<std::vector<std::pair<uint32_t, S>>>(r));
            for (size_t a = 0; a < r; ++a)
                for (size_t b = 0; b < r; ++b) entries[k][a][b] = ub.expand(s[k].entry(a, b));
        }
        std::function<void(size_t, size_t, size_t, const S&)> rec = [&](size_t k, size_t first, size_t cur,
                                                                         const S& c) {
            if (k + 1 == len) {
                for (const auto& [u, v] : entries[k][cur][first]) {
                    t[k] = u;
                    out.add(t, c * v);
                }
                return;
            }
            for (size_t nxt = 0; nxt < r; ++nxt)
                for (const auto& [u, v] : entries[k][cur][nxt]) {
                    t[k] = u;
                    rec(k + 1, first, nxt, c * v);
                }
        };
        for (size_t i0 = 0; i0 < r; ++i0) rec(0, i0, i0, scalar_traits<S>::one());
    }
    return out;
}

inline double bound_slack(double rhs) { return 1e-9 * std::max(1.0, rhs); }

template <class S>
bool check_face_bound(const DecompositionRep<S>& rep, size_t i) {
    return decomposition_norm(face_rep(rep, i)) <= decomposition_norm(rep) + bound_slack(decomposition_norm(rep));
}

template <class S>
bool check_trace_bound(const DecompositionRep<S>& rep) {
    double factor = std::pow(static_cast<double>(rep.m), static_cast<double>(rep.degree() + 1));
    double rhs = factor * decomposition_norm(rep);
    return decomposition_norm(trace_rep(rep)) <= rhs + bound_slack(rhs);
}

}  // namespace ncg
