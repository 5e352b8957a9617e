#pragma once

// Finite groups by multiplication table, and unitary irrep tables.

#include <algorithm>
#include <array>
#include <string>
#include <utility>
#include <vector>

#include "ncg/matrix.hpp"

namespace ncg {

struct FiniteGroup {
    std::string name;
    std::vector<std::vector<size_t>> table;  // table[g][h] = g h
    size_t identity = 0;
    std::vector<size_t> inverse;

    size_t order() const { return table.size(); }
    size_t mul(size_t g, size_t h) const { return table[g][h]; }

    /// Validates the table and fills identity and inverses.
    static FiniteGroup from_table(std::vector<std::vector<size_t>> t, std::string name = "custom") {
        FiniteGroup g;
        g.name = std::move(name);
        g.table = std::move(t);
        const size_t n = g.table.size();
        if (n == 0) throw ValidationError("group table is empty");
        for (const auto& row : g.table) {
            if (row.size() != n) throw ValidationError("group table is not square");
            for (size_t x : row)
                if (x >= n) throw ValidationError("group table entry out of range");
        }
        bool found = false;
        for (size_t e = 0; e < n && !found; ++e) {
            bool ok = true;
            for (size_t x = 0; x < n && ok; ++x) ok = g.table[e][x] == x && g.table[x][e] == x;
            if (ok) {
                g.identity = e;
                found = true;
            }
        }
        if (!found) throw ValidationError("group table has no identity");
        for (size_t a = 0; a < n; ++a)
            for (size_t b = 0; b < n; ++b)
                for (size_t c = 0; c < n; ++c)
                    if (g.table[g.table[a][b]][c] != g.table[a][g.table[b][c]])
                        throw ValidationError("group table is not associative");
        g.inverse.assign(n, n);
        for (size_t a = 0; a < n; ++a)
            for (size_t b = 0; b < n; ++b)
                if (g.table[a][b] == g.identity && g.table[b][a] == g.identity) g.inverse[a] = b;
        for (size_t a = 0; a < n; ++a)
            if (g.inverse[a] == n) throw ValidationError("group element " + std::to_string(a) + " has no inverse");
        return g;
    }

    static FiniteGroup cyclic(size_t n) {
        if (n == 0) throw ValidationError("cyclic group order must be positive");
        std::vector<std::vector<size_t>> t(n, std::vector<size_t>(n));
        for (size_t a = 0; a < n; ++a)
            for (size_t b = 0; b < n; ++b) t[a][b] = (a + b) % n;
        return from_table(std::move(t), "Z" + std::to_string(n));
    }

    /// S3 as permutations of {0,1,2} in lexicographic order; (g h)(x) = g(h(x)).
    static const std::vector<std::array<int, 3>>& s3_elements() {
        static const std::vector<std::array<int, 3>> e = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                                          {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
        return e;
    }
    static FiniteGroup symmetric3() {
        const auto& el = s3_elements();
        std::vector<std::vector<size_t>> t(6, std::vector<size_t>(6));
        for (size_t a = 0; a < 6; ++a)
            for (size_t b = 0; b < 6; ++b) {
                std::array<int, 3> c{};
                for (int x = 0; x < 3; ++x) c[x] = el[a][el[b][x]];
                t[a][b] = static_cast<size_t>(std::find(el.begin(), el.end(), c) - el.begin());
            }
        return from_table(std::move(t), "S3");
    }

    static FiniteGroup by_name(const std::string& n) {
        if (n == "S3") return symmetric3();
        if (n.size() > 1 && n[0] == 'Z') return cyclic(std::stoul(n.substr(1)));
        throw ValidationError("unknown built-in group '" + n + "' (use Zn or S3, or give a table)");
    }
};

template <class S>
struct Irrep {
    size_t dim = 1;
    std::vector<Matrix<S>> mats;  // one per group element
    S character(size_t g) const { return mats[g].trace(); }
};

template <class S>
struct IrrepTable {
    std::vector<Irrep<S>> irreps;

    /// Throws ValidationError on the first violated property.
    void validate(const FiniteGroup& g) const {
        using T = scalar_traits<S>;
        const size_t n = g.order();
        size_t sum_sq = 0;
        for (size_t k = 0; k < irreps.size(); ++k) {
            const auto& pi = irreps[k];
            if (pi.mats.size() != n) throw ValidationError("irrep " + std::to_string(k) + " needs one matrix per element");
            for (const auto& m : pi.mats)
                if (m.rows() != pi.dim || m.cols() != pi.dim) throw ValidationError("irrep matrix has wrong shape");
            for (size_t a = 0; a < n; ++a) {
                if (!(pi.mats[a] * pi.mats[a].adjoint() == Matrix<S>::identity(pi.dim)))
                    throw ValidationError("irrep " + std::to_string(k) + " is not unitary");
                for (size_t b = 0; b < n; ++b)
                    if (!(pi.mats[a] * pi.mats[b] == pi.mats[g.mul(a, b)]))
                        throw ValidationError("irrep " + std::to_string(k) + " is not a homomorphism");
            }
            sum_sq += pi.dim * pi.dim;
        }
        if (sum_sq != n) throw ValidationError("sum of squared irrep dimensions differs from the group order");
        for (size_t i = 0; i < irreps.size(); ++i)
            for (size_t j = 0; j <= i; ++j) {
                S acc = T::zero();
                for (size_t a = 0; a < n; ++a) acc += irreps[i].character(a) * T::conj(irreps[j].character(a));
                S expected = T::from_int(i == j ? static_cast<long>(n) : 0);
                if (!T::equal(acc, expected)) throw ValidationError("character orthogonality fails");
            }
    }

    static IrrepTable cyclic(size_t n) {
        using T = scalar_traits<S>;
        IrrepTable t;
        for (size_t k = 0; k < n; ++k) {
            Irrep<S> pi;
            for (size_t a = 0; a < n; ++a) {
                auto z = T::root_of_unity(static_cast<long>(k * a), static_cast<long>(n));
                if (!z) throw DomainError("exact characters of Z" + std::to_string(n) + " are unavailable (n must divide 12); use the float backend");
                Matrix<S> m(1, 1);
                m(0, 0) = *z;
                pi.mats.push_back(std::move(m));
            }
            t.irreps.push_back(std::move(pi));
        }
        return t;
    }

    /// trivial, sign, and the 2-dimensional standard representation of S3.
    static IrrepTable symmetric3() {
        using T = scalar_traits<S>;
        const auto& el = FiniteGroup::s3_elements();
        IrrepTable t;
        Irrep<S> triv, sgn, std2;
        std2.dim = 2;
        // orthogonal basis of the sum-zero plane, squared lengths 2 and 6
        const long u[2][3] = {{1, -1, 0}, {1, 1, -2}};
        for (const auto& p : el) {
            Matrix<S> one(1, 1), s(1, 1);
            one(0, 0) = T::one();
            int inv = 0;
            for (int a = 0; a < 3; ++a)
                for (int b = a + 1; b < 3; ++b)
                    if (p[a] > p[b]) ++inv;
            s(0, 0) = T::from_int(inv % 2 == 0 ? 1 : -1);
            triv.mats.push_back(one);
            sgn.mats.push_back(s);
            Matrix<S> m(2, 2);
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    // <u_a, P u_b> with (P v)_{p(x)} = v_x
                    long raw = 0;
                    for (int x = 0; x < 3; ++x) raw += u[a][p[x]] * u[b][x];
                    if (a == b)
                        m(a, b) = T::from_rational(make_rational(raw, a == 0 ? 2 : 6));
                    else
                        m(a, b) = T::from_quad(QuadSqrt3(Rational(0), make_rational(raw, 6)));
                }
            std2.mats.push_back(std::move(m));
        }
        t.irreps = {std::move(triv), std::move(sgn), std::move(std2)};
        return t;
    }

    static IrrepTable builtin(const FiniteGroup& g) {
        if (g.name == "S3") return symmetric3();
        if (!g.name.empty() && g.name[0] == 'Z') return cyclic(g.order());
        throw ValidationError("no built-in irreps for group '" + g.name + "'; supply an irrep table");
    }
};

}  // namespace ncg
