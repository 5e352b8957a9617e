#pragma once

// Multi-matrix algebras A = M_{r_1} + ... + M_{r_k}, their amplifications
// M_m(A), normal elements with spectral calculus, and unital *-homomorphisms.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ncg/matrix.hpp"

namespace ncg {

struct MultiMatrixAlgebra {
    std::vector<size_t> blocks;

    MultiMatrixAlgebra() = default;
    explicit MultiMatrixAlgebra(std::vector<size_t> dims) : blocks(std::move(dims)) { validate(); }

    void validate() const {
        if (blocks.empty()) throw ValidationError("algebra needs at least one block");
        for (size_t r : blocks)
            if (r == 0) throw ValidationError("algebra block dimensions must be positive");
    }

    size_t factors() const { return blocks.size(); }
    /// Complex dimension sum r_i^2.
    size_t dimension() const {
        size_t d = 0;
        for (size_t r : blocks) d += r * r;
        return d;
    }
    bool all_blocks_scalar() const {
        return std::all_of(blocks.begin(), blocks.end(), [](size_t r) { return r == 1; });
    }
    /// M_m(A) viewed as a multi-matrix algebra in its own right.
    MultiMatrixAlgebra amplified(size_t m) const {
        std::vector<size_t> b(blocks);
        for (auto& r : b) r *= m;
        return MultiMatrixAlgebra(std::move(b));
    }

    std::string to_string() const {
        std::string s = "[";
        for (size_t i = 0; i < blocks.size(); ++i) s += (i ? "," : "") + std::to_string(blocks[i]);
        return s + "]";
    }

    friend bool operator==(const MultiMatrixAlgebra&, const MultiMatrixAlgebra&) = default;
};

inline void require_same_algebra(const MultiMatrixAlgebra& a, const MultiMatrixAlgebra& b, const char* what) {
    if (!(a == b))
        throw ValidationError(std::string(what) + ": algebra mismatch " + a.to_string() + " vs " + b.to_string());
}

/// Element of M_m(A). Block i is an (m r_i) x (m r_i) matrix; entry (alpha, beta)
/// of the A-valued matrix sits at rows alpha*r_i.., columns beta*r_i...
template <class S>
struct AlgebraElement {
    using T = scalar_traits<S>;

    MultiMatrixAlgebra algebra;
    size_t m = 1;
    std::vector<Matrix<S>> blocks;

    AlgebraElement() = default;
    AlgebraElement(MultiMatrixAlgebra alg, size_t amp, std::vector<Matrix<S>> b)
        : algebra(std::move(alg)), m(amp), blocks(std::move(b)) {
        validate();
    }

    static AlgebraElement zero(const MultiMatrixAlgebra& alg, size_t amp = 1) {
        std::vector<Matrix<S>> b;
        for (size_t r : alg.blocks) b.emplace_back(amp * r, amp * r);
        return {alg, amp, std::move(b)};
    }
    static AlgebraElement identity(const MultiMatrixAlgebra& alg, size_t amp = 1) {
        std::vector<Matrix<S>> b;
        for (size_t r : alg.blocks) b.push_back(Matrix<S>::identity(amp * r));
        return {alg, amp, std::move(b)};
    }
    static AlgebraElement scalar(const MultiMatrixAlgebra& alg, const S& c, size_t amp = 1) {
        return identity(alg, amp) * c;
    }
    /// Matrix unit in block b at (row, col) of the amplified block.
    static AlgebraElement unit(const MultiMatrixAlgebra& alg, size_t b, size_t row, size_t col, size_t amp = 1) {
        auto e = zero(alg, amp);
        if (b >= alg.factors() || row >= amp * alg.blocks[b] || col >= amp * alg.blocks[b])
            throw ValidationError("matrix unit index out of range");
        e.blocks[b](row, col) = T::one();
        return e;
    }

    void validate() const {
        algebra.validate();
        if (m == 0) throw ValidationError("amplification must be positive");
        if (blocks.size() != algebra.factors())
            throw ValidationError("element has " + std::to_string(blocks.size()) + " blocks, algebra has " +
                                  std::to_string(algebra.factors()));
        for (size_t i = 0; i < blocks.size(); ++i) {
            size_t s = m * algebra.blocks[i];
            if (blocks[i].rows() != s || blocks[i].cols() != s)
                throw ValidationError("block " + std::to_string(i) + " has shape " + blocks[i].shape() +
                                      ", expected " + std::to_string(s) + "x" + std::to_string(s));
        }
    }

    size_t block_size(size_t i) const { return m * algebra.blocks[i]; }

    AlgebraElement adjoint() const {
        AlgebraElement r(*this);
        for (auto& b : r.blocks) b = b.adjoint();
        return r;
    }

    AlgebraElement& operator+=(const AlgebraElement& o) {
        check_compatible(o);
        for (size_t i = 0; i < blocks.size(); ++i) blocks[i] += o.blocks[i];
        return *this;
    }
    AlgebraElement& operator-=(const AlgebraElement& o) {
        check_compatible(o);
        for (size_t i = 0; i < blocks.size(); ++i) blocks[i] -= o.blocks[i];
        return *this;
    }
    AlgebraElement& operator*=(const S& c) {
        for (auto& b : blocks) b *= c;
        return *this;
    }
    friend AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b) { return a += b; }
    friend AlgebraElement operator-(AlgebraElement a, const AlgebraElement& b) { return a -= b; }
    friend AlgebraElement operator*(AlgebraElement a, const S& c) { return a *= c; }
    friend AlgebraElement operator*(const S& c, AlgebraElement a) { return a *= c; }
    friend AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b) {
        a.check_compatible(b);
        AlgebraElement r(a);
        for (size_t i = 0; i < a.blocks.size(); ++i) r.blocks[i] = a.blocks[i] * b.blocks[i];
        return r;
    }
    friend bool operator==(const AlgebraElement& a, const AlgebraElement& b) {
        return a.algebra == b.algebra && a.m == b.m && a.blocks == b.blocks;
    }

    bool is_zero() const {
        return std::all_of(blocks.begin(), blocks.end(), [](const Matrix<S>& b) { return b.is_zero(); });
    }

    /// ||x||_max over all blocks.
    double max_abs() const {
        double r = 0;
        for (const auto& b : blocks) r = std::max(r, ncg::max_abs(b));
        return r;
    }
    /// C*-norm: the largest block operator norm.
    double norm() const {
        double r = 0;
        for (const auto& b : blocks) r = std::max(r, operator_norm(b));
        return r;
    }

    /// Entry (alpha, beta) of the A-valued matrix as an element of A.
    AlgebraElement entry(size_t alpha, size_t beta) const {
        std::vector<Matrix<S>> b;
        for (size_t i = 0; i < blocks.size(); ++i) {
            size_t r = algebra.blocks[i];
            b.push_back(blocks[i].block(alpha * r, beta * r, r, r));
        }
        return {algebra, 1, std::move(b)};
    }

    /// Same matrices regarded as an element (m = 1) of M_m(A).
    AlgebraElement flatten() const { return {algebra.amplified(m), 1, blocks}; }

    void check_compatible(const AlgebraElement& o) const {
        require_same_algebra(algebra, o.algebra, "element arithmetic");
        if (m != o.m) throw ValidationError("amplification mismatch");
    }
};

/// a + b in M_{m+m'}(A).
template <class S>
AlgebraElement<S> direct_sum(const AlgebraElement<S>& a, const AlgebraElement<S>& b) {
    require_same_algebra(a.algebra, b.algebra, "direct_sum");
    std::vector<Matrix<S>> bl;
    for (size_t i = 0; i < a.blocks.size(); ++i) bl.push_back(direct_sum(a.blocks[i], b.blocks[i]));
    return {a.algebra, a.m + b.m, std::move(bl)};
}

template <class S>
bool is_normal(const AlgebraElement<S>& x) {
    x.validate();
    for (const auto& b : x.blocks) {
        Matrix<S> bh = b.adjoint();
        Matrix<S> c = b * bh - bh * b;
        if constexpr (scalar_traits<S>::is_exact) {
            if (!c.is_zero()) return false;
        } else {
            if (max_abs(c) > epsilon()) return false;
        }
    }
    return true;
}

template <class S>
bool is_projection(const AlgebraElement<S>& p) {
    return p * p == p && p.adjoint() == p;
}

template <class S>
bool is_unitary(const Matrix<S>& u) {
    return u.square() && u * u.adjoint() == Matrix<S>::identity(u.rows());
}

// ---------------------------------------------------------------------------
// Spectral forms

template <class S>
struct SpectralPair {
    S lambda;
    AlgebraElement<S> projection;
};

template <class S>
struct SpectralForm {
    using T = scalar_traits<S>;

    MultiMatrixAlgebra algebra;
    size_t m = 1;
    std::vector<SpectralPair<S>> pairs;  // nonzero eigenvalues, sorted by (re, im)
    AlgebraElement<S> kernel;

    AlgebraElement<S> reconstruct() const {
        auto x = AlgebraElement<S>::zero(algebra, m);
        for (const auto& p : pairs) x += p.projection * p.lambda;
        return x;
    }

    std::vector<S> spectrum(bool with_zero = false) const {
        std::vector<S> s;
        if (with_zero && !kernel.is_zero()) s.push_back(T::zero());
        for (const auto& p : pairs) s.push_back(p.lambda);
        std::sort(s.begin(), s.end(), [](const S& a, const S& b) { return T::compare(a, b) < 0; });
        return s;
    }

    void canonicalize() {
        std::sort(pairs.begin(), pairs.end(),
                  [](const SpectralPair<S>& a, const SpectralPair<S>& b) { return T::compare(a.lambda, b.lambda) < 0; });
    }

    /// Throws ValidationError if any invariant fails.
    void validate() const {
        algebra.validate();
        auto fail = [](const std::string& w) { throw ValidationError("invalid spectral form: " + w); };
        if (kernel.algebra != algebra || kernel.m != m) fail("kernel projection has wrong shape");
        kernel.validate();
        if (!is_projection(kernel)) fail("kernel is not a projection");
        auto total = kernel;
        for (size_t i = 0; i < pairs.size(); ++i) {
            const auto& p = pairs[i];
            if (p.projection.algebra != algebra || p.projection.m != m) fail("projection has wrong shape");
            p.projection.validate();
            if (T::is_zero(p.lambda)) fail("zero eigenvalue listed as a pair");
            if (!is_projection(p.projection)) fail("pair projection is not a projection");
            if (p.projection.is_zero()) fail("pair projection is zero");
            if (!(p.projection * kernel).is_zero()) fail("projection not orthogonal to kernel");
            for (size_t j = 0; j < i; ++j) {
                if (T::equal(p.lambda, pairs[j].lambda)) fail("repeated eigenvalue");
                if (!(p.projection * pairs[j].projection).is_zero()) fail("projections not orthogonal");
            }
            total += p.projection;
        }
        if (!(total == AlgebraElement<S>::identity(algebra, m))) fail("projections do not sum to identity");
    }
};

/// Finite point set standing in for a Borel set.
template <class S>
struct BorelSet {
    std::vector<S> points;

    bool admissible() const {
        return std::none_of(points.begin(), points.end(), [](const S& p) { return scalar_traits<S>::is_zero(p); });
    }
    bool contains(const S& x) const {
        return std::any_of(points.begin(), points.end(), [&](const S& p) { return scalar_traits<S>::equal(p, x); });
    }
};

template <class S>
AlgebraElement<S> spectral_projection(const SpectralForm<S>& a, const BorelSet<S>& e) {
    auto p = AlgebraElement<S>::zero(a.algebra, a.m);
    for (const auto& pr : a.pairs)
        if (e.contains(pr.lambda)) p += pr.projection;
    if (e.contains(scalar_traits<S>::zero())) p += a.kernel;
    return p;
}

namespace detail {

// Numerical eigenvalues of each block (the element is assumed normal).
inline std::vector<std::vector<Float>> block_eigenvalues(const std::vector<Eigen::MatrixXcd>& mats) {
    std::vector<std::vector<Float>> out;
    for (const auto& m : mats) {
        std::vector<Float> ev;
        if (m.rows() > 0) {
            Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, false);
            if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed");
            for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) ev.push_back(es.eigenvalues()(i));
        }
        out.push_back(std::move(ev));
    }
    return out;
}

// Single-linkage clustering of points at the given radius; returns cluster ids.
inline std::vector<size_t> single_linkage(const std::vector<Float>& pts, double radius, size_t& clusters) {
    const size_t n = pts.size();
    std::vector<size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            if (std::abs(pts[i] - pts[j]) <= radius) parent[find(i)] = find(j);
    std::vector<size_t> id(n), root_id(n, n);
    clusters = 0;
    for (size_t i = 0; i < n; ++i) {
        size_t r = find(i);
        if (root_id[r] == n) root_id[r] = clusters++;
        id[i] = root_id[r];
    }
    return id;
}

}  // namespace detail

/// Spectral decomposition of a normal element.
///
/// Float: Schur vectors per block, eigenvalues clustered by single linkage at
/// radius 2*epsilon and keyed by the cluster mean.
/// Exact: numeric eigenvalues are matched against `hints` or recognized as
/// elements of Q(sqrt3, i); eigenspaces are then computed exactly and must
/// fill every block, otherwise a DomainError is raised.
template <class S>
SpectralForm<S> spectral_decompose(const AlgebraElement<S>& x, const std::vector<S>& hints = {}) {
    using T = scalar_traits<S>;
    if (!is_normal(x)) throw DomainError("spectral_decompose: element is not normal");
    SpectralForm<S> sf;
    sf.algebra = x.algebra;
    sf.m = x.m;
    sf.kernel = AlgebraElement<S>::zero(x.algebra, x.m);
    const size_t k = x.blocks.size();

    if constexpr (!T::is_exact) {
        const double eps = epsilon();
        std::vector<Float> all;
        std::vector<std::pair<size_t, size_t>> where;  // (block, schur column)
        std::vector<Eigen::MatrixXcd> schur_q(k);
        for (size_t b = 0; b < k; ++b) {
            Eigen::MatrixXcd mat = to_eigen(x.blocks[b]);
            if (mat.rows() == 0) continue;
            Eigen::ComplexSchur<Eigen::MatrixXcd> cs(mat);
            if (cs.info() != Eigen::Success) throw NumericalError("Schur decomposition failed");
            const auto& tm = cs.matrixT();
            double scale = std::max(1.0, mat.cwiseAbs().maxCoeff());
            for (Eigen::Index i = 0; i < tm.rows(); ++i)
                for (Eigen::Index j = i + 1; j < tm.cols(); ++j)
                    if (std::abs(tm(i, j)) > 1e-6 * scale)
                        throw NumericalError("Schur form is not diagonal; normal element is ill-conditioned");
            schur_q[b] = cs.matrixU();
            for (Eigen::Index i = 0; i < tm.rows(); ++i) {
                all.push_back(tm(i, i));
                where.emplace_back(b, static_cast<size_t>(i));
            }
        }
        size_t nc = 0;
        auto id = detail::single_linkage(all, 2 * eps, nc);
        std::vector<Float> mean(nc, 0.0);
        std::vector<size_t> count(nc, 0);
        for (size_t i = 0; i < all.size(); ++i) {
            mean[id[i]] += all[i];
            ++count[id[i]];
        }
        for (size_t c = 0; c < nc; ++c) {
            mean[c] /= static_cast<double>(count[c]);
            auto proj = AlgebraElement<S>::zero(x.algebra, x.m);
            for (size_t i = 0; i < all.size(); ++i) {
                if (id[i] != c) continue;
                auto [b, col] = where[i];
                const auto& q = schur_q[b];
                for (Eigen::Index r = 0; r < q.rows(); ++r)
                    for (Eigen::Index s = 0; s < q.rows(); ++s)
                        proj.blocks[b](r, s) += q(r, col) * std::conj(q(s, col));
            }
            if (std::abs(mean[c]) <= 2 * eps)
                sf.kernel += proj;
            else
                sf.pairs.push_back({mean[c], std::move(proj)});
        }
    } else {
        std::vector<Eigen::MatrixXcd> mats;
        for (const auto& b : x.blocks) mats.push_back(to_eigen(b));
        auto evs = detail::block_eigenvalues(mats);
        // distinct exact candidates
        std::vector<S> cands;
        auto add_cand = [&](const S& c) {
            for (const auto& e : cands)
                if (T::equal(e, c)) return;
            cands.push_back(c);
        };
        for (const auto& ev : evs)
            for (const Float& z : ev) {
                std::optional<S> hit;
                double best = 1e-6;
                for (const auto& h : hints) {
                    double d = std::abs(T::to_complex(h) - z);
                    if (d <= best) {
                        best = d;
                        hit = h;
                    }
                }
                if (!hit && std::abs(z) <= 1e-9) hit = T::zero();
                if (!hit) hit = recognize_exact(z);
                if (!hit)
                    throw DomainError("spectral_decompose: eigenvalue " + std::to_string(z.real()) + "+" +
                                      std::to_string(z.imag()) +
                                      "i is not recognizable in Q(sqrt3, i); use the float backend or "
                                      "supply a spectral form directly");
                add_cand(*hit);
            }
        std::vector<size_t> filled(k, 0);
        for (const auto& lam : cands) {
            auto proj = AlgebraElement<S>::zero(x.algebra, x.m);
            for (size_t b = 0; b < k; ++b) {
                size_t n = x.blocks[b].rows();
                Matrix<S> shifted = x.blocks[b] - Matrix<S>::identity(n) * lam;
                Matrix<S> ns = nullspace(shifted);
                if (ns.cols() == 0) continue;
                filled[b] += ns.cols();
                proj.blocks[b] = column_projection(ns);
            }
            if (proj.is_zero()) continue;
            if (T::is_zero(lam))
                sf.kernel = proj;
            else
                sf.pairs.push_back({lam, std::move(proj)});
        }
        for (size_t b = 0; b < k; ++b)
            if (filled[b] != x.blocks[b].rows())
                throw DomainError("spectral_decompose: exact eigenvalue recovery failed in block " +
                                  std::to_string(b) + "; use the float backend or supply a spectral form directly");
    }
    sf.canonicalize();
    return sf;
}

// ---------------------------------------------------------------------------
// *-homomorphisms

/// Unital *-homomorphism A -> B: target block i receives source block j with
/// multiplicity mult[i][j] (block-diagonally, in order j = 0..k-1), then is
/// conjugated by unitaries[i] (empty = identity).
template <class S>
struct StarHomomorphism {
    MultiMatrixAlgebra source;
    MultiMatrixAlgebra target;
    std::vector<std::vector<size_t>> mult;
    std::vector<Matrix<S>> unitaries;

    static StarHomomorphism identity(const MultiMatrixAlgebra& a) {
        StarHomomorphism h;
        h.source = h.target = a;
        h.mult.assign(a.factors(), std::vector<size_t>(a.factors(), 0));
        for (size_t i = 0; i < a.factors(); ++i) h.mult[i][i] = 1;
        return h;
    }

    void validate() const {
        source.validate();
        target.validate();
        if (mult.size() != target.factors()) throw ValidationError("multiplicity matrix needs one row per target block");
        for (size_t i = 0; i < mult.size(); ++i) {
            if (mult[i].size() != source.factors())
                throw ValidationError("multiplicity row needs one entry per source block");
            size_t s = 0;
            for (size_t j = 0; j < mult[i].size(); ++j) s += mult[i][j] * source.blocks[j];
            if (s != target.blocks[i])
                throw ValidationError("homomorphism is not unital: target block " + std::to_string(i) + " has size " +
                                      std::to_string(target.blocks[i]) + " but receives " + std::to_string(s));
        }
        if (!unitaries.empty()) {
            if (unitaries.size() != target.factors()) throw ValidationError("need one unitary per target block");
            for (size_t i = 0; i < unitaries.size(); ++i) {
                if (unitaries[i].rows() != target.blocks[i] || !unitaries[i].square())
                    throw ValidationError("unitary " + std::to_string(i) + " has wrong shape");
                if (!is_unitary(unitaries[i])) throw ValidationError("matrix " + std::to_string(i) + " is not unitary");
            }
        }
    }
};

template <class S>
AlgebraElement<S> apply_hom(const StarHomomorphism<S>& phi, const AlgebraElement<S>& x) {
    require_same_algebra(phi.source, x.algebra, "apply_hom");
    const size_t m = x.m;
    auto y = AlgebraElement<S>::zero(phi.target, m);
    for (size_t i = 0; i < phi.target.factors(); ++i) {
        const size_t ri = phi.target.blocks[i];
        Matrix<S>& out = y.blocks[i];
        size_t off = 0;
        for (size_t j = 0; j < phi.source.factors(); ++j) {
            const size_t rj = phi.source.blocks[j];
            for (size_t c = 0; c < phi.mult[i][j]; ++c, off += rj)
                for (size_t a = 0; a < m; ++a)
                    for (size_t b = 0; b < m; ++b)
                        for (size_t k = 0; k < rj; ++k)
                            for (size_t l = 0; l < rj; ++l)
                                out(a * ri + off + k, b * ri + off + l) = x.blocks[j](a * rj + k, b * rj + l);
        }
        if (!phi.unitaries.empty()) {
            Matrix<S> u = kron(Matrix<S>::identity(m), phi.unitaries[i]);
            out = u * out * u.adjoint();
        }
    }
    return y;
}

/// Pushes a spectral form through phi without re-decomposing.
template <class S>
SpectralForm<S> apply_hom(const StarHomomorphism<S>& phi, const SpectralForm<S>& a) {
    SpectralForm<S> r;
    r.algebra = phi.target;
    r.m = a.m;
    r.kernel = apply_hom(phi, a.kernel);
    for (const auto& p : a.pairs) r.pairs.push_back({p.lambda, apply_hom(phi, p.projection)});
    return r;
}

/// P_{phi(a)}(E) == phi(P_a(E)), the left side from a fresh decomposition of phi(a).
template <class S>
bool check_hom_spectral_commute(const StarHomomorphism<S>& phi, const SpectralForm<S>& a, const BorelSet<S>& e) {
    auto image = apply_hom(phi, a.reconstruct());
    auto lhs = spectral_projection(spectral_decompose(image, a.spectrum()), e);
    auto rhs = apply_hom(phi, spectral_projection(a, e));
    return lhs == rhs;
}

}  // namespace ncg
