#pragma once

// The quotient complex CC_n(A) = A^{(n+1)} / Im(1 - tau_n) and its homology.
//
// CC_n has a basis of non-vanishing rotation orbits of unit tuples: e_t is
// identified with (-1)^{n j} e_{rot^j t}, and an orbit of size k dies exactly
// when n*k is odd. Homology is computed over Q (the boundary matrices are
// integral), then applied to coordinates of either backend.

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ncg/tensor.hpp"

namespace ncg {

/// Orbit-reduced basis of CC_n(A).
class CyclicSpace {
public:
    CyclicSpace(const MultiMatrixAlgebra& alg, size_t n) : basis_(alg), n_(n) {
        const size_t d = basis_.dim();
        require_ambient(checked_pow(d, static_cast<unsigned>(n + 1)),
                        "cyclic space CC_" + std::to_string(n) + " over " + alg.to_string());
        Tuple t(n + 1, 0);
        while (true) {
            auto o = orbit_info(t);
            if (o.is_rep && !o.vanishes) {
                index_.emplace(encode(t), reps_.size());
                reps_.push_back(t);
            }
            size_t s = 0;
            while (s <= n && ++t[s] == d) t[s++] = 0;
            if (s > n) break;
        }
    }

    const UnitBasis& basis() const { return basis_; }
    const MultiMatrixAlgebra& algebra() const { return basis_.algebra(); }
    size_t degree() const { return n_; }
    size_t dimension() const { return reps_.size(); }
    const Tuple& rep(size_t i) const { return reps_[i]; }

    /// CC coordinate of e_t: (basis index, sign), or nothing if [e_t] = 0.
    std::optional<std::pair<size_t, int>> locate(const Tuple& t) const {
        auto o = orbit_info(t);
        if (o.vanishes) return std::nullopt;
        auto it = index_.find(encode(o.rep));
        if (it == index_.end()) return std::nullopt;
        int sign = (n_ * o.shift) % 2 == 0 ? 1 : -1;
        return std::make_pair(it->second, sign);
    }

    template <class S>
    std::vector<S> coordinates(const TensorElement<S>& xi) const {
        if (xi.degree != n_) throw ValidationError("tensor degree does not match cyclic space");
        require_same_algebra(xi.algebra(), algebra(), "cyclic coordinates");
        std::vector<S> z(dimension(), scalar_traits<S>::zero());
        for (const auto& [t, c] : xi.terms) {
            if (auto loc = locate(t)) {
                if (loc->second > 0)
                    z[loc->first] += c;
                else
                    z[loc->first] -= c;
            }
        }
        return z;
    }

    /// Tensor sum_i z_i e_{rep_i}.
    template <class S>
    TensorElement<S> lift(const std::vector<S>& z, const MultiMatrixAlgebra& base, size_t m) const {
        TensorElement<S> out(base, m, n_);
        for (size_t i = 0; i < z.size(); ++i) out.add(reps_[i], z[i]);
        return out;
    }

private:
    struct OrbitInfo {
        Tuple rep;
        size_t shift = 0;  // rot^shift(t) = rep
        bool is_rep = false;
        bool vanishes = false;
    };

    OrbitInfo orbit_info(const Tuple& t) const {
        OrbitInfo o;
        o.rep = t;
        Tuple cur = t;
        size_t size = n_ + 1;
        for (size_t j = 1; j <= n_ + 1; ++j) {
            cur = rotate(cur);
            if (cur == t && size == n_ + 1) size = j;
            if (j <= n_ && cur < o.rep) {
                o.rep = cur;
                o.shift = j;
            }
        }
        o.is_rep = (o.rep == t);
        o.vanishes = (n_ * size) % 2 == 1;
        return o;
    }

    uint64_t encode(const Tuple& t) const {
        uint64_t c = 0;
        for (size_t s = t.size(); s-- > 0;) c = c * basis_.dim() + t[s];
        return c;
    }

    UnitBasis basis_;
    size_t n_;
    std::vector<Tuple> reps_;
    std::unordered_map<uint64_t, size_t> index_;
};

/// Sparse integral matrix stored by columns.
struct SparseColumns {
    size_t rows = 0;
    std::vector<std::vector<std::pair<size_t, long>>> cols;

    Matrix<Rational> dense() const {
        Matrix<Rational> m(rows, cols.size());
        for (size_t j = 0; j < cols.size(); ++j)
            for (const auto& [i, v] : cols[j]) m(i, j) = v;
        return m;
    }
    template <class S>
    std::vector<S> apply(const std::vector<S>& z) const {
        std::vector<S> out(rows, scalar_traits<S>::zero());
        for (size_t j = 0; j < cols.size(); ++j) {
            if (scalar_traits<S>::is_zero(z[j])) continue;
            for (const auto& [i, v] : cols[j]) out[i] += z[j] * scalar_traits<S>::from_int(v);
        }
        return out;
    }
};

/// beta_n : CC_n -> CC_{n-1} in orbit coordinates.
inline SparseColumns boundary_matrix(const CyclicSpace& from, const CyclicSpace& to) {
    if (from.degree() != to.degree() + 1) throw ValidationError("boundary_matrix: degree mismatch");
    SparseColumns b;
    b.rows = to.dimension();
    const size_t n = from.degree();
    for (size_t j = 0; j < from.dimension(); ++j) {
        std::map<size_t, long> col;
        const Tuple& t = from.rep(j);
        for (size_t i = 0; i <= n; ++i) {
            long si = (i % 2 == 0) ? 1 : -1;
            detail::face_on_tuple(from.basis(), t, i, [&](const Tuple& r) {
                if (auto loc = to.locate(r)) col[loc->first] += si * loc->second;
            });
        }
        std::vector<std::pair<size_t, long>> c;
        for (const auto& [i, v] : col)
            if (v != 0) c.push_back({i, v});
        b.cols.push_back(std::move(c));
    }
    return b;
}

/// HC_n(A) = Ker beta_n / Im beta_{n+1}, with a chosen quotient basis.
///
/// The quotient basis prefers the cycles (e^{(b)}_{00})^{(n+1)} in even
/// degree, so Chern classes of projections have their ranks as coordinates.
class HomologySpace {
public:
    HomologySpace(const MultiMatrixAlgebra& alg, size_t n)
        : algebra_(alg), n_(n), cc_(std::make_shared<CyclicSpace>(alg, n)),
          next_(std::make_shared<CyclicSpace>(alg, n + 1)) {
        const size_t dim = cc_->dimension();
        if (n > 0) {
            prev_ = std::make_shared<CyclicSpace>(alg, n - 1);
            beta_n_ = boundary_matrix(*cc_, *prev_);
        } else {
            beta_n_.rows = 0;
            beta_n_.cols.assign(dim, {});
        }
        beta_next_ = boundary_matrix(*next_, *cc_);

        // cycles
        Matrix<Rational> cycles = n > 0 ? nullspace(beta_n_.dense()) : Matrix<Rational>::identity(dim);
        cycle_dim_ = cycles.cols();

        // boundaries: independent columns of beta_{n+1}
        auto bd = rref(beta_next_.dense());
        boundary_cols_ = bd.pivots;
        boundary_dim_ = boundary_cols_.size();

        IncrementalSpan<Rational> span(dim);
        std::vector<std::vector<Rational>> chosen;  // boundary columns then quotient vectors
        for (size_t c : boundary_cols_) {
            std::vector<Rational> v(dim, 0);
            for (const auto& [i, x] : beta_next_.cols[c]) v[i] = x;
            span.insert(v);
            chosen.push_back(std::move(v));
        }
        auto try_add = [&](std::vector<Rational> v) {
            if (span.rank() == cycle_dim_) return;
            if (span.insert(v)) {
                quotient_.push_back(v);
                chosen.push_back(std::move(v));
            }
        };
        if (n % 2 == 0) {
            for (size_t b = 0; b < alg.factors(); ++b) {
                Tuple t(n + 1, cc_->basis().unit(b, 0, 0));
                std::vector<Rational> v(dim, 0);
                if (auto loc = cc_->locate(t)) {
                    v[loc->first] = loc->second;
                    // only a cycle is allowed into the basis
                    if (is_cycle_rational(v)) try_add(std::move(v));
                }
            }
        }
        for (size_t k = 0; k < cycles.cols(); ++k) {
            std::vector<Rational> v(dim);
            for (size_t i = 0; i < dim; ++i) v[i] = cycles(i, k);
            try_add(std::move(v));
        }
        if (span.rank() != cycle_dim_) throw ConsistencyError("homology basis construction failed");

        // left inverse of M = [boundaries | quotient] through a set of independent rows
        const size_t k = chosen.size();
        Matrix<Rational> mt(k, dim);
        for (size_t c = 0; c < k; ++c)
            for (size_t i = 0; i < dim; ++i) mt(c, i) = chosen[c][i];
        auto rows = rref(mt).pivots;  // independent rows of M
        if (rows.size() != k) throw ConsistencyError("homology solver is rank deficient");
        Matrix<Rational> sq(k, k);
        for (size_t a = 0; a < k; ++a)
            for (size_t c = 0; c < k; ++c) sq(a, c) = chosen[c][rows[a]];
        solver_ = inverse(sq);
        solver_rows_ = rows;
        solver_f_.resize(k * k);
        for (size_t a = 0; a < k; ++a)
            for (size_t c = 0; c < k; ++c) solver_f_[a * k + c] = solver_(a, c).get_d();
    }

    const MultiMatrixAlgebra& algebra() const { return algebra_; }
    size_t degree() const { return n_; }
    size_t dimension() const { return quotient_.size(); }
    size_t cycle_dimension() const { return cycle_dim_; }
    size_t boundary_dimension() const { return boundary_dim_; }
    const CyclicSpace& cyclic() const { return *cc_; }
    const CyclicSpace& cyclic_next() const { return *next_; }
    const std::vector<std::vector<Rational>>& quotient_basis() const { return quotient_; }
    const SparseColumns& beta() const { return beta_n_; }
    const SparseColumns& beta_next() const { return beta_next_; }

    template <class S>
    bool is_cycle(const std::vector<S>& z) const {
        if (n_ == 0) return true;
        auto img = beta_n_.apply(z);
        for (const auto& v : img)
            if (!scalar_traits<S>::is_zero(v)) return false;
        return true;
    }

    /// Solves z = sum c_k boundary_k + sum w_j quotient_j for a cycle z; returns (c, w).
    template <class S>
    std::pair<std::vector<S>, std::vector<S>> solve(const std::vector<S>& z) const {
        using T = scalar_traits<S>;
        const size_t k = solver_rows_.size();
        std::vector<S> sol(k, T::zero());
        for (size_t a = 0; a < k; ++a) {
            S acc = T::zero();
            for (size_t c = 0; c < k; ++c) {
                const S& zc = z[solver_rows_[c]];
                if (T::is_zero(zc)) continue;
                if constexpr (T::is_exact) {
                    if (sgn(solver_(a, c)) == 0) continue;
                    acc += T::scale(zc, solver_(a, c));
                } else {
                    acc += zc * solver_f_[a * k + c];
                }
            }
            sol[a] = acc;
        }
        std::vector<S> c(sol.begin(), sol.begin() + boundary_dim_);
        std::vector<S> w(sol.begin() + boundary_dim_, sol.end());
        return {std::move(c), std::move(w)};
    }

    size_t boundary_column(size_t k) const { return boundary_cols_[k]; }

private:
    bool is_cycle_rational(const std::vector<Rational>& v) const { return is_cycle(v); }

    MultiMatrixAlgebra algebra_;
    size_t n_;
    std::shared_ptr<CyclicSpace> cc_, next_, prev_;
    SparseColumns beta_n_, beta_next_;
    size_t cycle_dim_ = 0, boundary_dim_ = 0;
    std::vector<size_t> boundary_cols_;
    std::vector<std::vector<Rational>> quotient_;
    Matrix<Rational> solver_;
    std::vector<size_t> solver_rows_;
    std::vector<double> solver_f_;
};

/// Shared, build-once homology spaces keyed by (blocks, degree).
inline std::shared_ptr<const HomologySpace> hc_space(const MultiMatrixAlgebra& alg, size_t n) {
    static std::mutex mu;
    static std::map<std::pair<std::vector<size_t>, size_t>, std::shared_ptr<const HomologySpace>> cache;
    auto key = std::make_pair(alg.blocks, n);
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    auto sp = std::make_shared<const HomologySpace>(alg, n);
    std::lock_guard<std::mutex> lock(mu);
    return cache.emplace(key, sp).first->second;
}

inline std::shared_ptr<const CyclicSpace> build_cyclic_space(const MultiMatrixAlgebra& alg, size_t n) {
    return std::make_shared<const CyclicSpace>(alg, n);
}

inline std::vector<size_t> hc_dimensions(const MultiMatrixAlgebra& alg, size_t max_degree) {
    std::vector<size_t> d;
    for (size_t n = 0; n <= max_degree; ++n) d.push_back(hc_space(alg, n)->dimension());
    return d;
}

template <class S>
struct HCClass {
    MultiMatrixAlgebra algebra;
    size_t degree = 0;
    std::vector<S> coords;

    static HCClass zero(const MultiMatrixAlgebra& alg, size_t n) {
        return {alg, n, std::vector<S>(hc_space(alg, n)->dimension(), scalar_traits<S>::zero())};
    }
    bool is_zero() const {
        for (const auto& c : coords)
            if (!scalar_traits<S>::is_zero(c)) return false;
        return true;
    }
    HCClass& operator+=(const HCClass& o) {
        check(o);
        for (size_t i = 0; i < coords.size(); ++i) coords[i] += o.coords[i];
        return *this;
    }
    HCClass& operator-=(const HCClass& o) {
        check(o);
        for (size_t i = 0; i < coords.size(); ++i) coords[i] -= o.coords[i];
        return *this;
    }
    HCClass& operator*=(const S& s) {
        for (auto& c : coords) c *= s;
        return *this;
    }
    friend HCClass operator+(HCClass a, const HCClass& b) { return a += b; }
    friend HCClass operator-(HCClass a, const HCClass& b) { return a -= b; }
    friend HCClass operator*(HCClass a, const S& s) { return a *= s; }
    friend HCClass operator*(const S& s, HCClass a) { return a *= s; }
    friend bool operator==(const HCClass& a, const HCClass& b) {
        if (!(a.algebra == b.algebra) || a.degree != b.degree || a.coords.size() != b.coords.size()) return false;
        for (size_t i = 0; i < a.coords.size(); ++i)
            if (!scalar_traits<S>::equal(a.coords[i], b.coords[i])) return false;
        return true;
    }
    void check(const HCClass& o) const {
        require_same_algebra(algebra, o.algebra, "HC arithmetic");
        if (degree != o.degree || coords.size() != o.coords.size()) throw ValidationError("HC class shape mismatch");
    }
};

/// Class of a cycle in HC_n of the tensor's (flattened) algebra.
template <class S>
HCClass<S> hc_class(const TensorElement<S>& xi) {
    auto alg = xi.algebra();
    auto sp = hc_space(alg, xi.degree);
    auto z = sp->cyclic().coordinates(xi);
    if (!sp->is_cycle(z)) throw DomainError("hc_class: tensor is not a cycle in CC_" + std::to_string(xi.degree));
    auto [c, w] = sp->solve(z);
    return {alg, xi.degree, std::move(w)};
}

/// Preimage under beta_{n+1} (as a tensor of orbit representatives), if xi is a boundary.
template <class S>
std::optional<TensorElement<S>> is_boundary(const TensorElement<S>& xi) {
    auto sp = hc_space(xi.algebra(), xi.degree);
    auto z = sp->cyclic().coordinates(xi);
    if (!sp->is_cycle(z)) return std::nullopt;
    auto [c, w] = sp->solve(z);
    for (const auto& v : w)
        if (!scalar_traits<S>::is_zero(v)) return std::nullopt;
    std::vector<S> full(sp->cyclic_next().dimension(), scalar_traits<S>::zero());
    for (size_t k = 0; k < c.size(); ++k) full[sp->boundary_column(k)] = c[k];
    return sp->cyclic_next().lift(full, xi.base, xi.m);
}

/// Equality in CC_n (difference lies in Im(1 - tau)).
template <class S>
bool cc_equal(const TensorElement<S>& a, const TensorElement<S>& b) {
    if (a.degree != b.degree) return false;
    CyclicSpace cs(a.algebra(), a.degree);
    auto za = cs.coordinates(a), zb = cs.coordinates(b);
    for (size_t i = 0; i < za.size(); ++i)
        if (!scalar_traits<S>::equal(za[i], zb[i])) return false;
    return true;
}

/// Tensor for the k-th quotient basis vector of HC_n.
template <class S>
TensorElement<S> hc_basis_tensor(const HomologySpace& sp, size_t k, const MultiMatrixAlgebra& base, size_t m) {
    std::vector<S> z;
    for (const auto& v : sp.quotient_basis()[k]) z.push_back(scalar_traits<S>::from_rational(v));
    return sp.cyclic().lift(z, base, m);
}

}  // namespace ncg
