#pragma once

// Reference computations that share no code with the library's algorithms.
// Cyclic homology here is rank-nullity on the full (unreduced) tensor space
// over a prime field; equivalence of normal elements is decided from numeric
// eigenvalues by brute force over subsets of the joint spectrum.

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <cstdint>
#include <map>
#include <vector>

namespace oracle {

using u64 = std::uint64_t;

// ---------------------------------------------------------------------------
// dense linear algebra over F_p

struct ModP {
    u64 p;
    u64 add(u64 a, u64 b) const { return (a + b) % p; }
    u64 mul(u64 a, u64 b) const { return static_cast<u64>((static_cast<unsigned __int128>(a) * b) % p); }
    u64 neg(u64 a) const { return a == 0 ? 0 : p - a; }
    u64 pow(u64 a, u64 e) const {
        u64 r = 1;
        for (; e; e >>= 1, a = mul(a, a))
            if (e & 1) r = mul(r, a);
        return r;
    }
    u64 inv(u64 a) const { return pow(a, p - 2); }
    u64 from(long v) const { return v >= 0 ? static_cast<u64>(v) % p : neg(static_cast<u64>(-v) % p); }
};

/// Rank of a dense matrix given column by column.
inline size_t rank_mod(std::vector<std::vector<u64>> cols, const ModP& f) {
    if (cols.empty()) return 0;
    const size_t rows = cols.front().size();
    size_t rank = 0;
    std::vector<bool> used(cols.size(), false);
    for (size_t r = 0; r < rows; ++r) {
        size_t piv = cols.size();
        for (size_t c = 0; c < cols.size(); ++c)
            if (!used[c] && cols[c][r] != 0) {
                piv = c;
                break;
            }
        if (piv == cols.size()) continue;
        used[piv] = true;
        ++rank;
        u64 iv = f.inv(cols[piv][r]);
        for (size_t c = 0; c < cols.size(); ++c) {
            if (c == piv || cols[c][r] == 0) continue;
            u64 k = f.mul(cols[c][r], iv);
            for (size_t i = r; i < rows; ++i) cols[c][i] = f.add(cols[c][i], f.neg(f.mul(k, cols[piv][i])));
        }
    }
    return rank;
}

// ---------------------------------------------------------------------------
// multi-matrix algebra as an explicit list of matrix units

struct Units {
    std::vector<int> block, row, col;
    explicit Units(const std::vector<size_t>& blocks) {
        for (size_t b = 0; b < blocks.size(); ++b)
            for (size_t i = 0; i < blocks[b]; ++i)
                for (size_t j = 0; j < blocks[b]; ++j) {
                    block.push_back(static_cast<int>(b));
                    row.push_back(static_cast<int>(i));
                    col.push_back(static_cast<int>(j));
                }
    }
    size_t size() const { return block.size(); }
    /// e_u e_v as a unit index, or -1 when the product vanishes.
    long product(size_t u, size_t v) const {
        if (block[u] != block[v] || col[u] != row[v]) return -1;
        for (size_t w = 0; w < size(); ++w)
            if (block[w] == block[u] && row[w] == row[u] && col[w] == col[v]) return static_cast<long>(w);
        return -1;
    }
};

inline u64 power(u64 b, size_t e) {
    u64 r = 1;
    while (e--) r *= b;
    return r;
}

inline std::vector<size_t> digits(u64 idx, size_t len, size_t base) {
    std::vector<size_t> d(len);
    for (size_t k = len; k-- > 0;) {
        d[k] = static_cast<size_t>(idx % base);
        idx /= base;
    }
    return d;
}

inline u64 undigits(const std::vector<size_t>& d, size_t base) {
    u64 r = 0;
    for (size_t x : d) r = r * base + x;
    return r;
}

/// Columns of (1 - t) on A^{(n+1)}, t(a_0..a_n) = (-1)^n (a_n, a_0, .., a_{n-1}).
inline std::vector<std::vector<u64>> one_minus_t(const Units& u, size_t n, const ModP& f) {
    const size_t d = u.size();
    const u64 dim = power(d, n + 1);
    std::vector<std::vector<u64>> cols;
    for (u64 idx = 0; idx < dim; ++idx) {
        auto t = digits(idx, n + 1, d);
        std::vector<size_t> r(n + 1);
        r[0] = t[n];
        for (size_t k = 1; k <= n; ++k) r[k] = t[k - 1];
        std::vector<u64> c(dim, 0);
        c[idx] = f.add(c[idx], 1);
        u64 j = undigits(r, d);
        c[j] = f.add(c[j], f.from(n % 2 ? 1 : -1));
        cols.push_back(std::move(c));
    }
    return cols;
}

/// Columns of the Hochschild boundary A^{(n+1)} -> A^{(n)}.
inline std::vector<std::vector<u64>> hochschild(const Units& u, size_t n, const ModP& f) {
    const size_t d = u.size();
    const u64 dim = power(d, n + 1), codim = power(d, n);
    std::vector<std::vector<u64>> cols;
    for (u64 idx = 0; idx < dim; ++idx) {
        auto t = digits(idx, n + 1, d);
        std::vector<u64> c(codim, 0);
        for (size_t i = 0; i < n; ++i) {
            long w = u.product(t[i], t[i + 1]);
            if (w < 0) continue;
            std::vector<size_t> s;
            for (size_t k = 0; k < i; ++k) s.push_back(t[k]);
            s.push_back(static_cast<size_t>(w));
            for (size_t k = i + 2; k <= n; ++k) s.push_back(t[k]);
            u64 j = undigits(s, d);
            c[j] = f.add(c[j], f.from(i % 2 ? -1 : 1));
        }
        if (n >= 1) {
            long w = u.product(t[n], t[0]);
            if (w >= 0) {
                std::vector<size_t> s{static_cast<size_t>(w)};
                for (size_t k = 1; k < n; ++k) s.push_back(t[k]);
                u64 j = undigits(s, d);
                c[j] = f.add(c[j], f.from(n % 2 ? -1 : 1));
            }
        }
        cols.push_back(std::move(c));
    }
    return cols;
}

inline std::vector<std::vector<u64>> concat(std::vector<std::vector<u64>> a, const std::vector<std::vector<u64>>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

/// dim HC_n from dim CC_n - rank beta_n - rank beta_{n+1}, with
/// rank beta_k = rank[b_k | 1-t] - rank(1-t) on the target.
inline size_t hc_dimension(const std::vector<size_t>& blocks, size_t n, u64 prime = 2147483647ULL) {
    ModP f{prime};
    Units u(blocks);
    auto T = [&](size_t k) { return one_minus_t(u, k, f); };
    std::vector<size_t> rank_t(n + 2);
    std::vector<std::vector<std::vector<u64>>> t_cols(n + 2);
    for (size_t k = 0; k <= n + 1; ++k) {
        t_cols[k] = T(k);
        rank_t[k] = rank_mod(t_cols[k], f);
    }
    auto rank_beta = [&](size_t k) -> size_t {
        if (k == 0) return 0;
        return rank_mod(concat(hochschild(u, k, f), t_cols[k - 1]), f) - rank_t[k - 1];
    };
    size_t cc = static_cast<size_t>(power(u.size(), n + 1)) - rank_t[n];
    return cc - rank_beta(n) - rank_beta(n + 1);
}

// ---------------------------------------------------------------------------
// numeric spectra

using cd = std::complex<double>;

/// Eigenvalues of each block with multiplicity.
inline std::vector<std::vector<cd>> block_spectra(const std::vector<Eigen::MatrixXcd>& blocks) {
    std::vector<std::vector<cd>> out;
    for (const auto& m : blocks) {
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m);
        std::vector<cd> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
        out.push_back(std::move(ev));
    }
    return out;
}

/// Distinct nonzero points of the joint spectrum (tolerance tol).
inline std::vector<cd> joint_points(const std::vector<std::vector<std::vector<cd>>>& spectra, double tol) {
    std::vector<cd> pts;
    for (const auto& s : spectra)
        for (const auto& blk : s)
            for (const auto& z : blk) {
                if (std::abs(z) <= tol) continue;
                if (std::none_of(pts.begin(), pts.end(), [&](const cd& p) { return std::abs(p - z) <= tol; })) pts.push_back(z);
            }
    return pts;
}

/// a ~ b iff rank_b P_a(E) = rank_b P_b(E) in every block, for every subset E of
/// nonzero joint spectrum points. Exponential in the number of points.
inline bool equivalent(const std::vector<std::vector<cd>>& sa, const std::vector<std::vector<cd>>& sb, double tol = 1e-6) {
    if (sa.size() != sb.size()) return false;
    auto pts = joint_points({sa, sb}, tol);
    const size_t k = pts.size();
    for (u64 mask = 1; mask < (u64(1) << k); ++mask) {
        for (size_t blk = 0; blk < sa.size(); ++blk) {
            auto count = [&](const std::vector<cd>& ev) {
                size_t c = 0;
                for (const auto& z : ev)
                    for (size_t i = 0; i < k; ++i)
                        if ((mask >> i & 1) && std::abs(z - pts[i]) <= tol) {
                            ++c;
                            break;
                        }
                return c;
            };
            if (count(sa[blk]) != count(sb[blk])) return false;
        }
    }
    return true;
}

}  // namespace oracle
