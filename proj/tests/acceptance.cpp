// Acceptance run: one PASS/FAIL line per criterion. Limits and tolerances are fixed here.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ncg/ncg.hpp"
#include "ncg/verify.hpp"
#include "oracles.hpp"

using namespace ncg;
using E = ExactComplex;

namespace {

constexpr uint64_t kSeed = 20240601;
constexpr double kOracleTol = 1e-6;  // numeric eigenvalue matching in the th1 oracle

struct Outcome {
    bool ok = true;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double limit_s;
    std::function<Outcome()> run;
};

verify::Options opts(size_t count) {
    verify::Options o;
    o.seed = kSeed;
    o.count = count;
    return o;
}

// Folds verification reports into one outcome.
Outcome reports(std::initializer_list<verify::Report> rs) {
    Outcome o;
    std::ostringstream d;
    for (const auto& r : rs) {
        d << r.theorem << " " << r.passes << "/" << r.instances << " ";
        if (!r.ok()) {
            o.ok = false;
            d << "[" << r.to_json().dump() << "] ";
        }
    }
    o.detail = d.str();
    return o;
}

std::vector<Eigen::MatrixXcd> eigen_blocks(const AlgebraElement<E>& x) {
    std::vector<Eigen::MatrixXcd> out;
    for (const auto& b : x.blocks) out.push_back(to_eigen(b));
    return out;
}

// n_class(a) == n_class(b) must match the brute-force subset oracle on numeric spectra.
Outcome th1_oracle(size_t pairs) {
    Rng rng(verify::splitmix(kSeed ^ 0x7431));
    size_t equal = 0;
    for (size_t i = 0; i < pairs; ++i) {
        MultiMatrixAlgebra alg({static_cast<size_t>(uniform_int(rng, 1, 3))});
        auto pool = random_pool<E>(rng, 2, 1);
        auto a = random_spectral_form<E>(rng, alg, static_cast<size_t>(uniform_int(rng, 1, 2)), pool, 0.3);
        auto b = coin(rng, 0.5) ? a : random_spectral_form<E>(rng, alg, static_cast<size_t>(uniform_int(rng, 1, 2)), pool, 0.3);
        if (coin(rng, 0.3)) {
            // equivalent by construction: conjugate, then pad with a zero block
            auto x = a.reconstruct();
            auto u = random_unitary<E>(rng, x.blocks[0].rows());
            AlgebraElement<E> y(alg, x.m, {u * x.blocks[0] * u.adjoint()});
            b = spectral_decompose(direct_sum(y, AlgebraElement<E>::zero(alg, 1)), pool);
        }
        bool lib = n_class(a) == n_class(b);
        bool ref = oracle::equivalent(oracle::block_spectra(eigen_blocks(a.reconstruct())),
                                      oracle::block_spectra(eigen_blocks(b.reconstruct())), kOracleTol);
        if (lib != ref) return {false, "pair " + std::to_string(i) + ": library " + std::to_string(lib) + " oracle " + std::to_string(ref)};
        equal += lib;
    }
    return {true, "oracle pairs " + std::to_string(pairs) + " (" + std::to_string(equal) + " equivalent) "};
}

Outcome hc_dims() {
    struct Case {
        std::vector<size_t> blocks;
        std::vector<size_t> expect;  // empty: oracle only
    };
    const std::vector<Case> cases{{{1}, {1, 0, 1, 0, 1}}, {{2}, {1, 0, 1}}, {{1, 1}, {}}, {{1, 2}, {}}};
    std::ostringstream d;
    for (const auto& c : cases) {
        size_t top = c.expect.empty() ? (c.blocks == std::vector<size_t>{1, 1} ? 3 : 1) : c.expect.size() - 1;
        auto got = hc_dimensions(MultiMatrixAlgebra(c.blocks), top);
        for (size_t n = 0; n <= top; ++n) {
            size_t ref = oracle::hc_dimension(c.blocks, n);
            if (got[n] != ref || (!c.expect.empty() && got[n] != c.expect[n]))
                return {false, "blocks size " + std::to_string(c.blocks.size()) + " n=" + std::to_string(n) + " got " +
                                   std::to_string(got[n]) + " oracle " + std::to_string(ref)};
        }
        d << "[";
        for (size_t n = 0; n <= top; ++n) d << (n ? "," : "") << got[n];
        d << "] ";
    }
    return {true, d.str()};
}

Outcome trace_iso() {
    std::ostringstream d;
    for (const auto& base : {MultiMatrixAlgebra({1}), MultiMatrixAlgebra({1, 1})}) {
        for (size_t n = 0; n <= 2; ++n) {
            auto big = hc_space(base.amplified(2), n);
            auto small = hc_space(base, n);
            if (big->dimension() != small->dimension()) return {false, "induced matrix not square at n=" + std::to_string(n)};
            Matrix<E> induced(small->dimension(), big->dimension());
            for (size_t k = 0; k < big->dimension(); ++k) {
                auto cls = hc_class(trace_map(hc_basis_tensor<E>(*big, k, base, 2)));
                for (size_t i = 0; i < cls.coords.size(); ++i) induced(i, k) = cls.coords[i];
            }
            if (rank(induced) != small->dimension()) return {false, "induced matrix singular at n=" + std::to_string(n)};
            d << small->dimension() << "x" << big->dimension() << " ";
        }
    }
    return {true, d.str()};
}

}  // namespace

int main() {
    const std::vector<Criterion> crit{
        {1, "N-group isomorphism (th1)", 10,
         [] {
             auto o = reports({verify::run_th1<E>(opts(200))});
             if (!o.ok) return o;
             auto p = th1_oracle(200);
             return Outcome{p.ok, o.detail + p.detail};
         }},
        {2, "homomorphisms commute with spectral projections (lem2)", 10, [] { return reports({verify::run_lem2<E>(opts(200))}); }},
        {3, "H lies in Ker h, h t = id, g^(n) reduction (n <= 20)", 10, [] { return reports({verify::run_hker<E>(opts(200))}); }},
        {4, "cyclic homology dimensions vs dense oracle", 120, hc_dims},
        {5, "trace map induces isomorphisms, r = 2, n <= 2", 60, trace_iso},
        {6, "face and trace norm bounds, tolerance 1e-9", 30, [] { return reports({verify::run_bounds<Float>(opts(500))}); }},
        {7, "eta vanishes (th2), 100 families + 10 witnesses", 120, [] { return reports({verify::run_th2<E>(opts(100), 10)}); }},
        {8, "cover limit independent of tags (th6)", 60, [] { return reports({verify::run_th6<E>(opts(100))}); }},
        {9, "Chern dual paths (th7, th8)", 60,
         [] { return reports({verify::run_th7<E>(opts(200)), verify::run_th8<E>(opts(200))}); }},
        {10, "Lefschetz identities (th4, th5) and acyclic invariance", 300,
         [] { return reports({verify::run_th4<E>(opts(50)), verify::run_th5<E>(opts(50)), verify::run_acyclic<E>(opts(25))}); }},
        {11, "N0 cancellation and group laws", 5, [] { return reports({verify::run_n0laws<E>(opts(500))}); }},
    };

    int failed = 0;
    for (const auto& c : crit) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool in_time = s < c.limit_s;
        bool pass = o.ok && in_time;
        failed += !pass;
        char timing[64];
        std::snprintf(timing, sizeof timing, "%.2fs/%.0fs", s, c.limit_s);
        std::cout << (pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << " (" << timing << ")"
                  << (in_time ? "" : " time limit exceeded") << " " << o.detail << std::endl;
    }
    std::cout << (crit.size() - static_cast<size_t>(failed)) << "/" << crit.size() << " criteria passed" << std::endl;
    return failed ? 1 : 0;
}
