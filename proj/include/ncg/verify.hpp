#pragma once

// Seeded verification batches. Instance i of theorem t draws from its own
// generator seeded by mix(seed, t, i), so a failing instance is reproducible
// from the report alone and batches may run on several threads.

#include <atomic>
#include <exception>
#include <functional>
#include <map>
#include <optional>
#include <thread>

#include "ncg/io.hpp"
#include "ncg/random.hpp"

namespace ncg::verify {

using io::json;

struct Failure {
    size_t instance = 0;
    uint64_t seed = 0;
    json input;
    json lhs;
    json rhs;
    std::string what;
};

struct Report {
    std::string theorem;
    size_t instances = 0;
    size_t passes = 0;
    std::vector<Failure> failures;

    bool ok() const { return failures.empty() && passes == instances; }

    json to_json() const {
        json f = json::array();
        for (const auto& x : failures)
            f.push_back(json{{"instance", x.instance}, {"seed", x.seed}, {"check", x.what},
                             {"input", x.input}, {"lhs", x.lhs}, {"rhs", x.rhs}});
        return json{{"theorem", theorem}, {"instances", instances}, {"passes", passes}, {"failures", f}};
    }
};

struct Options {
    uint64_t seed = 0;
    size_t count = 25;
    unsigned threads = 0;  // 0: hardware concurrency
};

inline uint64_t splitmix(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t instance_seed(uint64_t seed, const std::string& theorem, size_t i) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : theorem) h = (h ^ c) * 1099511628211ULL;
    return splitmix(splitmix(seed) ^ splitmix(h) ^ splitmix(static_cast<uint64_t>(i) + 0x51ed27ULL));
}

/// Check body: returns a failure (without instance/seed) or nothing.
using InstanceFn = std::function<std::optional<Failure>(Rng&, size_t)>;

inline Report run_batch(const std::string& theorem, const Options& opt, const InstanceFn& body) {
    Report rep;
    rep.theorem = theorem;
    rep.instances = opt.count;
    std::vector<std::optional<Failure>> results(opt.count);
    std::vector<std::exception_ptr> errors(opt.count);
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t i; (i = next.fetch_add(1)) < opt.count;) {
            uint64_t s = instance_seed(opt.seed, theorem, i);
            Rng rng(s);
            try {
                results[i] = body(rng, i);
                if (results[i]) {
                    results[i]->instance = i;
                    results[i]->seed = s;
                }
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    unsigned n = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
    n = static_cast<unsigned>(std::min<size_t>(n, std::max<size_t>(opt.count, 1)));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (size_t i = 0; i < opt.count; ++i) {
        if (errors[i]) std::rethrow_exception(errors[i]);
        if (results[i])
            rep.failures.push_back(std::move(*results[i]));
        else
            ++rep.passes;
    }
    return rep;
}

inline Failure failure(std::string what, json input, json lhs, json rhs) {
    Failure f;
    f.what = std::move(what);
    f.input = std::move(input);
    f.lhs = std::move(lhs);
    f.rhs = std::move(rhs);
    return f;
}

inline size_t pick(Rng& rng, size_t n) {
    return static_cast<size_t>(uniform_int(rng, 0, static_cast<long>(n) - 1));
}

template <class S>
S fresh_value(Rng& rng, const std::vector<S>& avoid) {
    while (true) {
        S v = random_nonzero_value<S>(rng, 4);
        if (std::none_of(avoid.begin(), avoid.end(), [&](const S& a) { return scalar_traits<S>::equal(a, v); })) return v;
    }
}

// ---------------------------------------------------------------------------
// N-group

/// [a] as a support function, injective up to equivalence and onto finite maps.
template <class S>
Report run_th1(const Options& opt) {
    return run_batch("th1", opt, [](Rng& rng, size_t) -> std::optional<Failure> {
        MultiMatrixAlgebra alg({static_cast<size_t>(uniform_int(rng, 1, 3))});
        auto pool = random_pool<S>(rng, static_cast<size_t>(uniform_int(rng, 1, 3)));
        auto a = random_spectral_form<S>(rng, alg, 1, pool, 0.3);
        auto x = a.reconstruct();
        auto ca = n_class(a);
        auto in = io::element_to_json(x);

        auto again = n_class(spectral_decompose(x, pool));
        if (!(again == ca)) return failure("decompose round trip", in, io::n0_to_json(again), io::n0_to_json(ca));

        // unitary conjugate, then amplified by a zero block: same class
        auto u = random_unitary<S>(rng, alg.blocks[0]);
        AlgebraElement<S> y(alg, 1, {u * x.blocks[0] * u.adjoint()});
        auto yz = direct_sum(y, AlgebraElement<S>::zero(alg, 1));
        auto cy = n_class(spectral_decompose(yz, pool));
        if (!(cy == ca)) return failure("equivalent element", in, io::n0_to_json(cy), io::n0_to_json(ca));

        // one spectral value moved to a fresh point: class must change
        if (!a.pairs.empty()) {
            auto b = a;
            b.pairs[pick(rng, b.pairs.size())].lambda = fresh_value(rng, pool);
            b.canonicalize();
            auto cb = n_class(b);
            if (cb == ca)
                return failure("inequivalent element", io::spectral_to_json(b), io::n0_to_json(cb), io::n0_to_json(ca));
        }

        // surjectivity: an arbitrary finite map with |support| <= 4
        auto target = random_n0<S>(rng, alg, 4);
        auto r = realize(target);
        r.a.validate();
        r.b.validate();
        auto got = n_class(r.a) - n_class(r.b);
        if (!(got == target)) return failure("realization", io::n0_to_json(target), io::n0_to_json(got), io::n0_to_json(target));
        return std::nullopt;
    });
}

/// Star homomorphisms commute with spectral projections.
template <class S>
Report run_lem2(const Options& opt) {
    return run_batch("lem2", opt, [](Rng& rng, size_t) -> std::optional<Failure> {
        auto alg = random_algebra<S>(rng, 3, 2);
        auto pool = random_pool<S>(rng, static_cast<size_t>(uniform_int(rng, 1, 3)));
        auto a = random_spectral_form<S>(rng, alg, 1, pool, 0.3);
        auto phi = random_hom<S>(rng, alg, 3, 4);
        BorelSet<S> e;
        for (const auto& v : pool)
            if (coin(rng)) e.points.push_back(v);
        if (coin(rng, 0.3)) e.points.push_back(scalar_traits<S>::zero());
        if (coin(rng, 0.3)) e.points.push_back(fresh_value(rng, pool));
        if (check_hom_spectral_commute(phi, a, e)) return std::nullopt;
        auto lhs = spectral_projection(spectral_decompose(apply_hom(phi, a.reconstruct()), a.spectrum()), e);
        auto rhs = apply_hom(phi, spectral_projection(a, e));
        json pts = json::array();
        for (const auto& p : e.points) pts.push_back(io::scalar_to_json(p));
        return failure("P(phi a)(E) = phi(P_a(E))",
                       json{{"hom", io::hom_to_json(phi)}, {"element", io::spectral_to_json(a)}, {"borel", pts}},
                       io::element_to_json(lhs), io::element_to_json(rhs));
    });
}

/// Generators of H lie in Ker h, h o t = id, and g^(n) reduces to h-generators.
template <class S>
Report run_hker(const Options& opt) {
    return run_batch("hker", opt, [](Rng& rng, size_t i) -> std::optional<Failure> {
        using T = scalar_traits<S>;
        auto alg = random_algebra<S>(rng, 3, 3);
        auto p = random_projection<S>(rng, alg, static_cast<size_t>(uniform_int(rng, 1, 2)));
        auto val = [&] { return coin(rng, 0.15) ? T::zero() : random_nonzero_value<S>(rng, 3); };
        S lam = val(), mu = coin(rng, 0.1) ? -lam : val();
        auto gen = generator_h(lam, mu, p);
        auto hz = h_map(gen);
        auto zero = K0TensorC<S>{std::vector<S>(alg.factors(), T::zero())};
        if (!(hz == zero)) return failure("h(h_{lambda,mu;p}) = 0", io::n0_to_json(gen), io::k0c_to_json(hz), io::k0c_to_json(zero));

        K0TensorC<S> v;
        for (size_t b = 0; b < alg.factors(); ++b) v.coeffs.push_back(coin(rng, 0.2) ? T::zero() : random_nonzero_value<S>(rng, 5));
        auto back = h_map(t_map(v, alg));
        if (!(back == v)) return failure("h(t(v)) = v", io::k0c_to_json(v), io::k0c_to_json(back), io::k0c_to_json(v));

        long n = static_cast<long>(i % 19) + 2;
        auto sum = evaluate(reduce_g_to_h(n, lam), p);
        auto g = generator_g(n, lam, p);
        if (!(sum == g))
            return failure("sum of reduce_g_to_h = g^(n)", json{{"n", n}, {"lambda", io::scalar_to_json(lam)}, {"p", io::element_to_json(p)}},
                           io::n0_to_json(sum), io::n0_to_json(g));
        return std::nullopt;
    });
}

/// Cancellation semigroup and abelian group laws.
template <class S>
Report run_n0laws(const Options& opt) {
    return run_batch("n0laws", opt, [](Rng& rng, size_t) -> std::optional<Failure> {
        auto alg = random_algebra<S>(rng, 3, 3);
        auto x = random_n0<S>(rng, alg, 4), y = random_n0<S>(rng, alg, 4), z = random_n0<S>(rng, alg, 4);
        auto in = json{{"x", io::n0_to_json(x)}, {"y", io::n0_to_json(y)}, {"z", io::n0_to_json(z)}};
        auto bad = [&](const char* what, const N0Class<S>& l, const N0Class<S>& r) {
            return failure(what, in, io::n0_to_json(l), io::n0_to_json(r));
        };
        N0Class<S> zero(alg);
        if (!((x + y) + z == x + (y + z))) return bad("associativity", (x + y) + z, x + (y + z));
        if (!(x + y == y + x)) return bad("commutativity", x + y, y + x);
        if (!(x + zero == x)) return bad("identity", x + zero, x);
        if (!(x + (-x) == zero)) return bad("inverse", x + (-x), zero);
        // x + z = y + z exactly when x = y
        bool sums_equal = (x + z == y + z);
        if (sums_equal != (x == y)) return bad("cancellation", x + z, y + z);
        auto w = x + z - z;
        if (!(w == x)) return bad("cancellation", w, x);
        if (!(h_map(x + y) == [&] {
                auto a = h_map(x), b = h_map(y);
                for (size_t i = 0; i < a.coeffs.size(); ++i) a.coeffs[i] += b.coeffs[i];
                return a;
            }()))
            return bad("h additive", x + y, x + y);
        return std::nullopt;
    });
}

// ---------------------------------------------------------------------------
// cyclic homology bounds

template <class S>
AlgebraElement<S> random_element(Rng& rng, const MultiMatrixAlgebra& alg, size_t m) {
    auto x = AlgebraElement<S>::zero(alg, m);
    for (auto& b : x.blocks)
        for (size_t i = 0; i < b.rows(); ++i)
            for (size_t j = 0; j < b.cols(); ++j)
                if (coin(rng, 0.7)) b(i, j) = gaussian_int<S>(rng, 3);
    return x;
}

/// Face operators are contractions and ||Tr xi|| <= r^{n+1} ||xi||, per representative.
template <class S>
Report run_bounds(const Options& opt) {
    return run_batch("bounds", opt, [](Rng& rng, size_t) -> std::optional<Failure> {
        auto alg = random_algebra<S>(rng, 2, 2);
        size_t m = static_cast<size_t>(uniform_int(rng, 1, 2));
        size_t n = static_cast<size_t>(uniform_int(rng, 0, 2));
        DecompositionRep<S> rep{alg, m, {}};
        size_t k = static_cast<size_t>(uniform_int(rng, 1, 3));
        for (size_t s = 0; s < k; ++s) {
            std::vector<AlgebraElement<S>> sm;
            for (size_t f = 0; f <= n; ++f) sm.push_back(random_element<S>(rng, alg, m));
            rep.summands.push_back(std::move(sm));
        }
        json in{{"algebra", io::algebra_to_json(alg)}, {"m", m}, {"degree", n}, {"summands", k}};
        double base = decomposition_norm(rep);
        for (size_t i = 0; i < n; ++i) {
            if (!check_face_bound(rep, i))
                return failure("||b_i rep|| <= ||rep||", in, decomposition_norm(face_rep(rep, i)), base);
            if (!(face_rep(rep, i).expand() == face_component(rep.expand(), i)))
                return failure("face representative expands to b_i", in, "mismatch", "match");
        }
        if (!check_trace_bound(rep)) {
            double rhs = std::pow(static_cast<double>(m), static_cast<double>(n + 1)) * base;
            return failure("||Tr rep|| <= r^{n+1} ||rep||", in, decomposition_norm(trace_rep(rep)), rhs);
        }
        if (!(trace_rep(rep).expand() == trace_map(rep.expand())))
            return failure("trace representative expands to Tr", in, "mismatch", "match");
        return std::nullopt;
    });
}

// ---------------------------------------------------------------------------
// Chern character

/// Orthogonal families have a vanishing mixed class. The first `witnesses`
/// instances are small (r = 2, N = 2) and also solve for a boundary witness.
template <class S>
Report run_th2(const Options& opt, size_t witnesses = 0) {
    Options o = opt;
    o.count = opt.count + witnesses;
    return run_batch("th2", o, [witnesses](Rng& rng, size_t i) -> std::optional<Failure> {
        auto alg = coin(rng) ? MultiMatrixAlgebra({1}) : MultiMatrixAlgebra({1, 1});
        bool wit = i < witnesses;
        size_t m = wit ? 2 : static_cast<size_t>(uniform_int(rng, 1, 3));
        size_t total = m * alg.dimension();
        size_t count = wit ? 2 : static_cast<size_t>(uniform_int(rng, std::min<long>(2, static_cast<long>(total)),
                                                                 std::min<long>(4, static_cast<long>(total))));
        auto ps = random_orthogonal_family<S>(rng, alg, m, count);
        auto rep = verify_eta_vanishes(ps, 1, wit);
        if (rep.ok()) return std::nullopt;
        json fam = json::array();
        for (const auto& p : ps) fam.push_back(io::element_to_json(p));
        json got{{"is_cycle", rep.is_cycle}, {"trace_class_zero", rep.trace_class_zero}, {"witness_found", rep.witness_found}};
        json want{{"is_cycle", true}, {"trace_class_zero", true}, {"witness_found", wit}};
        return failure("<eta> = 0", json{{"family", fam}, {"l", 1}}, got, want);
    });
}

/// Spectrum with some near-degenerate pairs at distance 2^-9.
template <class S>
std::vector<S> near_degenerate_pool(Rng& rng) {
    using T = scalar_traits<S>;
    auto pool = random_pool<S>(rng, static_cast<size_t>(uniform_int(rng, 1, 3)));
    if (coin(rng, 0.6)) {
        S base = pool[pick(rng, pool.size())];
        Rational gap = make_rational(1, 512);
        S off = coin(rng) ? T::from_rational(gap, 0) : T::from_rational(0, coin(rng) ? gap : Rational(-gap));
        S v = base + off;
        if (!T::is_zero(v) && std::none_of(pool.begin(), pool.end(), [&](const S& a) { return T::equal(a, v); }))
            pool.push_back(v);
    }
    return pool;
}

/// The cover limit is independent of the tag policy and equals T_direct.
template <class S>
Report run_th6(const Options& opt) {
    return run_batch("th6", opt, [](Rng& rng, size_t) -> std::optional<Failure> {
        auto alg = random_algebra<S>(rng, 2, 2);
        int l = static_cast<int>(uniform_int(rng, 0, std::min(1, max_chern_degree(alg))));
        auto a = random_spectral_form<S>(rng, alg, 1, near_degenerate_pool<S>(rng), 0.2);
        auto direct = T_direct(a, l);
        auto lo = T_cover_run(a, l, 12, TagPolicy::Min);
        auto hi = T_cover_run(a, l, 12, TagPolicy::Max);
        json in{{"element", io::spectral_to_json(a)}, {"l", l}};
        if (!(lo.value == direct)) return failure("T_cover(min) = T_direct", in, io::hc_to_json(lo.value), io::hc_to_json(direct));
        if (!(hi.value == direct)) return failure("T_cover(max) = T_direct", in, io::hc_to_json(hi.value), io::hc_to_json(direct));
        if (lo.depth > 12 || hi.depth > 12) return failure("stabilization depth <= 12", in, std::max(lo.depth, hi.depth), 12);
        return std::nullopt;
    });
}

template <class S>
Report run_th7(const Options& opt) {
    return run_batch("th7", opt, [](Rng& rng, size_t) -> std::optional<Failure> {
        auto alg = random_algebra<S>(rng, 2, 2);
        int l = static_cast<int>(uniform_int(rng, 0, std::min(1, max_chern_degree(alg))));
        auto p = random_projection<S>(rng, alg, 1);
        auto sides = th7_sides(p, l);
        if (sides.equal()) return std::nullopt;
        return failure("Ch[p] = pi*(Ch p)", json{{"projection", io::element_to_json(p)}, {"l", l}},
                       io::hc_to_json(sides.lhs), io::hc_to_json(sides.rhs));
    });
}

template <class S>
Report run_th8(const Options& opt) {
    return run_batch("th8", opt, [](Rng& rng, size_t) -> std::optional<Failure> {
        MultiMatrixAlgebra alg({1, 1});
        auto x = random_n0<S>(rng, alg, 4);
        auto sides = th8_sides(x, 0);
        if (sides.equal()) return std::nullopt;
        return failure("Ch x = pi*(sum Ch(e_i) h(x)_i)", json{{"n0", io::n0_to_json(x)}, {"l", 0}},
                       io::hc_to_json(sides.lhs), io::hc_to_json(sides.rhs));
    });
}

// ---------------------------------------------------------------------------
// Lefschetz

/// Complex over C+C or M_2(C) acted on by Z2, Z3 or S3.
template <class S>
GAComplex<S> draw_complex(Rng& rng, size_t min_length = 1) {
    auto alg = coin(rng) ? MultiMatrixAlgebra({1, 1}) : MultiMatrixAlgebra({2});
    FiniteGroup g;
    switch (uniform_int(rng, 0, 2)) {
    case 0: g = FiniteGroup::cyclic(2); break;
    case 1: g = FiniteGroup::cyclic(3); break;
    default: g = FiniteGroup::symmetric3(); break;
    }
    size_t len = static_cast<size_t>(uniform_int(rng, static_cast<long>(min_length), 3));
    return random_complex(rng, alg, g, IrrepTable<S>::builtin(g), len);
}

template <class S>
Report run_th4(const Options& opt) {
    return run_batch("th4", opt, [](Rng& rng, size_t) -> std::optional<Failure> {
        auto c = draw_complex<S>(rng);
        require_valid(c);
        for (size_t g = 0; g < c.group.order(); ++g) {
            auto sides = th4_sides(c, g);
            if (!sides.equal())
                return failure("h(L1 generalized) = L1", json{{"complex", io::complex_to_json(c)}, {"g", g}},
                               io::k0c_to_json(sides.lhs), io::k0c_to_json(sides.rhs));
        }
        return std::nullopt;
    });
}

template <class S>
Report run_th5(const Options& opt) {
    return run_batch("th5", opt, [](Rng& rng, size_t) -> std::optional<Failure> {
        auto c = draw_complex<S>(rng);
        require_valid(c);
        int lmax = std::min(1, max_chern_degree(c.algebra));
        for (size_t g = 0; g < c.group.order(); ++g)
            for (int l = 0; l <= lmax; ++l) {
                auto sides = th5_sides(c, g, l);
                if (!sides.equal())
                    return failure("pi*(L_2l) = Ch(L1 generalized)", json{{"complex", io::complex_to_json(c)}, {"g", g}, {"l", l}},
                                   io::hc_to_json(sides.lhs), io::hc_to_json(sides.rhs));
            }
        return std::nullopt;
    });
}

/// Adding 0 -> M -> M -> 0 changes none of the three Lefschetz numbers.
template <class S>
Report run_acyclic(const Options& opt) {
    return run_batch("acyclic", opt, [](Rng& rng, size_t) -> std::optional<Failure> {
        auto c = draw_complex<S>(rng, 2);
        size_t j = pick(rng, c.length() - 1);
        auto mod = random_module(rng, c.algebra, static_cast<size_t>(uniform_int(rng, 1, 2)), c.group, c.irreps);
        auto c2 = add_acyclic_summand(c, j, mod.q, mod.action);
        require_valid(c2);
        json in{{"complex", io::complex_to_json(c)}, {"degree", j}, {"summand", io::element_to_json(mod.q)}};
        int lmax = std::min(1, max_chern_degree(c.algebra));
        for (size_t g = 0; g < c.group.order(); ++g) {
            auto a = lefschetz_first(c, g), b = lefschetz_first(c2, g);
            if (!(a == b)) return failure("L1 unchanged", in, io::k0c_to_json(b), io::k0c_to_json(a));
            auto x = generalized_lefschetz_group(c, g), y = generalized_lefschetz_group(c2, g);
            if (!(x == y)) return failure("generalized L1 unchanged", in, io::n0_to_json(y), io::n0_to_json(x));
            for (int l = 0; l <= lmax; ++l) {
                auto s = lefschetz_second(c, g, l), t = lefschetz_second(c2, g, l);
                if (!(s == t)) return failure("L_2l unchanged", in, io::hc_to_json(t), io::hc_to_json(s));
            }
        }
        return std::nullopt;
    });
}

// ---------------------------------------------------------------------------

inline const std::vector<std::string>& theorem_names() {
    static const std::vector<std::string> names = {"th1", "lem2", "hker", "n0laws", "bounds", "th2",
                                                   "th6", "th7",  "th8",  "th4",    "th5",    "acyclic"};
    return names;
}

template <class S>
Report run_theorem(const std::string& name, const Options& opt) {
    if (name == "th1") return run_th1<S>(opt);
    if (name == "lem2") return run_lem2<S>(opt);
    if (name == "hker") return run_hker<S>(opt);
    if (name == "n0laws") return run_n0laws<S>(opt);
    if (name == "bounds") return run_bounds<S>(opt);
    if (name == "th2") return run_th2<S>(opt, std::min<size_t>(opt.count, 2));
    if (name == "th6") return run_th6<S>(opt);
    if (name == "th7") return run_th7<S>(opt);
    if (name == "th8") return run_th8<S>(opt);
    if (name == "th4") return run_th4<S>(opt);
    if (name == "th5") return run_th5<S>(opt);
    if (name == "acyclic") return run_acyclic<S>(opt);
    throw ValidationError("unknown theorem '" + name + "'");
}

}  // namespace ncg::verify
