// K0 classes, the N-group, h, t and functoriality.

#include <gtest/gtest.h>

#include "helpers.hpp"
#include "oracles.hpp"

using namespace ncg;
using th::E;
using th::F;

namespace {

const MultiMatrixAlgebra kC({1});
const MultiMatrixAlgebra kM2({2});
const MultiMatrixAlgebra kCC({1, 1});

N0Class<E> cls(const MultiMatrixAlgebra& alg, std::vector<std::pair<E, K0Class>> items) {
    N0Class<E> x(alg);
    for (auto& [l, r] : items) x.add(l, r);
    return x;
}

SpectralForm<E> sf_of(std::vector<size_t> blocks, size_t m, std::vector<Matrix<E>> mats) {
    return spectral_decompose(th::elem<E>(std::move(blocks), m, std::move(mats)));
}

std::vector<std::vector<oracle::cd>> numeric_spectra(const AlgebraElement<E>& x) {
    std::vector<Eigen::MatrixXcd> b;
    for (const auto& m : x.blocks) b.push_back(to_eigen(m));
    return oracle::block_spectra(b);
}

}  // namespace

TEST(K0, OfProjection) {
    EXPECT_EQ(k0_of_projection(AlgebraElement<E>::identity(kM2)), (K0Class{2}));
    EXPECT_EQ(k0_of_projection(AlgebraElement<E>::zero(MultiMatrixAlgebra({2, 1, 3}))), (K0Class{0, 0, 0}));
    E half(make_rational(1, 2), Rational(0));
    auto p = th::elem<E>({2}, 1, {th::mat<E>({{1, 1}, {1, 1}}) * half});
    EXPECT_EQ(k0_of_projection(p), (K0Class{1}));
    EXPECT_THROW(k0_of_projection(th::elem<E>({2}, 1, {th::diag<E>({2, 0})})), DomainError);
}

TEST(N0, ClassExamples) {
    EXPECT_EQ(n_class(sf_of({1}, 3, {th::diag<E>({5, 5, 0})})), cls(kC, {{E(5L), {2}}}));
    EXPECT_TRUE(n_class(sf_of({1}, 2, {th::diag<E>({0, 0})})).empty());
    EXPECT_EQ(n_class(sf_of({2}, 1, {th::diag<E>({2, 3})})), cls(kM2, {{E(2L), {1}}, {E(3L), {1}}}));
}

TEST(N0, EquivalenceExamples) {
    EXPECT_TRUE(n_equiv(sf_of({1}, 3, {th::diag<E>({5, 0, 5})}), sf_of({1}, 3, {th::diag<E>({5, 5, 0})})));
    EXPECT_TRUE(n_equiv(sf_of({1}, 2, {th::diag<E>({1, 2})}), sf_of({1}, 2, {th::diag<E>({2, 1})})));
    EXPECT_FALSE(n_equiv(sf_of({1}, 2, {th::diag<E>({1, 1})}), sf_of({1}, 1, {th::diag<E>({1})})));
}

TEST(N0, AdditionExamples) {
    auto x = cls(kC, {{E(5L), {2}}});
    EXPECT_EQ(n0_add(x, N0Class<E>(kC)), x);
    auto y = cls(kC, {{E(1L), {1}}});
    EXPECT_TRUE(n0_add(y, n0_neg(y)).empty());
}

TEST(N0, AlgebraMismatchRejected) {
    EXPECT_THROW(n0_add(cls(kC, {{E(1L), {1}}}), cls(kCC, {{E(1L), {1, 0}}})), ValidationError);
}

TEST(N0, ZeroKeysAndRanksDropped) {
    auto x = cls(kCC, {{E(0L), {1, 1}}, {E(2L), {0, 0}}});
    EXPECT_TRUE(x.empty());
}

TEST(N0, FloatKeysMergeWithinTwoEpsilon) {
    N0Class<F> x(kC);
    x.add(F(1.0, 0), {1});
    x.add(F(1.0 + 1e-10, 0), {1});
    ASSERT_EQ(x.support().size(), 1u);
    EXPECT_EQ(x.support()[0].second, (K0Class{2}));
}

TEST(H, Examples) {
    EXPECT_EQ(h_map(N0Class<E>(kCC)), th::k0c<E>({0, 0}));
    EXPECT_EQ(h_map(cls(kC, {{E(2L), {1}}})), th::k0c<E>({2}));
    auto p = AlgebraElement<E>::identity(kC);
    auto gen = generator_h(E(1L), E(1L), p);
    EXPECT_EQ(gen, cls(kC, {{E(2L), {1}}, {E(1L), {-2}}}));
    EXPECT_EQ(h_map(gen), th::k0c<E>({0}));
}

TEST(H, GeneratorG) {
    auto p = AlgebraElement<E>::identity(kC);
    EXPECT_EQ(generator_g(2, E(1L), p), cls(kC, {{E(1L), {2}}, {E(2L), {-1}}}));
    EXPECT_THROW(generator_g(0, E(1L), p), ValidationError);
}

TEST(H, DegenerateGeneratorsAreZeroRule) {
    auto p = AlgebraElement<E>::identity(kC);
    // [0 p] is the zero class
    EXPECT_EQ(generator_h(E(0L), E(3L), p), N0Class<E>(kC));
    auto g = generator_h(E(2L), E(-2L), p);
    EXPECT_EQ(g, cls(kC, {{E(2L), {-1}}, {E(-2L), {-1}}}));
    EXPECT_EQ(h_map(g), th::k0c<E>({0}));
}

TEST(H, ReduceGToH) {
    EXPECT_TRUE(reduce_g_to_h(1, E(3L)).empty());
    auto r2 = reduce_g_to_h(2, E(3L));
    ASSERT_EQ(r2.size(), 1u);
    EXPECT_EQ(r2[0].sign, -1);
    EXPECT_EQ(r2[0].lambda, E(3L));
    EXPECT_EQ(r2[0].mu, E(3L));
    auto r3 = reduce_g_to_h(3, E(3L));
    ASSERT_EQ(r3.size(), 2u);
    EXPECT_EQ(r3[1].lambda, E(6L));
    Rng rng(9);
    for (long n = 1; n <= 20; ++n) {
        auto alg = random_algebra<E>(rng, 3, 2);
        auto p = random_projection<E>(rng, alg, 2);
        E lam = random_nonzero_value<E>(rng);
        EXPECT_EQ(evaluate(reduce_g_to_h(n, lam), p), generator_g(n, lam, p)) << n;
    }
}

TEST(T, Examples) {
    EXPECT_TRUE(t_map(th::k0c<E>({0}), kC).empty());
    EXPECT_EQ(t_map(th::k0c<E>({2}), kC), cls(kC, {{E(2L), {1}}}));
    K0TensorC<E> v{{th::cplx<E>(1, 1), E(0L)}};
    EXPECT_EQ(t_map(v, kCC), cls(kCC, {{th::cplx<E>(1, 1), {1, 0}}}));
}

TEST(T, RoundTripRandom) {
    Rng rng(21);
    for (int it = 0; it < 100; ++it) {
        auto alg = random_algebra<E>(rng, 3, 3);
        K0TensorC<E> v;
        for (size_t b = 0; b < alg.factors(); ++b) v.coeffs.push_back(gaussian_int<E>(rng, 4));
        EXPECT_EQ(h_map(t_map(v, alg)), v);
    }
}

TEST(H, KernelContainsGeneratorsRandom) {
    Rng rng(4);
    for (int it = 0; it < 100; ++it) {
        auto alg = random_algebra<E>(rng, 3, 2);
        auto p = random_projection<E>(rng, alg, 2);
        auto gen = generator_h(random_nonzero_value<E>(rng), random_nonzero_value<E>(rng), p);
        EXPECT_EQ(h_map(gen), (K0TensorC<E>{std::vector<E>(alg.factors(), E(0L))}));
    }
}

TEST(H, IsGroupHomomorphism) {
    Rng rng(8);
    for (int it = 0; it < 100; ++it) {
        auto alg = random_algebra<E>(rng, 3, 3);
        auto x = random_n0<E>(rng, alg), y = random_n0<E>(rng, alg);
        auto hx = h_map(x), hy = h_map(y), hs = h_map(x + y), hn = h_map(-x);
        for (size_t i = 0; i < alg.factors(); ++i) {
            EXPECT_EQ(hs.coeffs[i], hx.coeffs[i] + hy.coeffs[i]);
            EXPECT_EQ(hn.coeffs[i], -hx.coeffs[i]);
        }
    }
}

TEST(Functorial, Examples) {
    auto x = cls(kC, {{E(5L), {1}}});
    EXPECT_EQ(functorial_map(StarHomomorphism<E>::identity(kC), x), x);
    StarHomomorphism<E> amp{kC, kM2, {{2}}, {Matrix<E>::identity(2)}};
    EXPECT_EQ(functorial_map(amp, x), cls(kM2, {{E(5L), {2}}}));
}

TEST(Functorial, AgreesWithApplyHomAndIsAdditive) {
    Rng rng(13);
    for (int it = 0; it < 40; ++it) {
        auto alg = random_algebra<E>(rng, 2, 2);
        auto phi = random_hom<E>(rng, alg, 2, 4);
        auto a = random_spectral_form<E>(rng, alg, 1, random_pool<E>(rng, 3));
        auto image = spectral_decompose(apply_hom(phi, a.reconstruct()), a.spectrum());
        EXPECT_EQ(n_class(image), functorial_map(phi, n_class(a)));
        auto x = random_n0<E>(rng, alg), y = random_n0<E>(rng, alg);
        EXPECT_EQ(functorial_map(phi, x + y), functorial_map(phi, x) + functorial_map(phi, y));
    }
}

// n_class(a) = n_class(b) exactly when brute-force subset ranks agree.
TEST(Th1, InjectiveAgainstBruteForceOracle) {
    Rng rng(31);
    size_t equal_pairs = 0;
    for (int it = 0; it < 200; ++it) {
        size_t r = static_cast<size_t>(uniform_int(rng, 1, 3));
        MultiMatrixAlgebra alg({r});
        // a small shared pool makes coincidences common
        auto pool = random_pool<E>(rng, 2, 1);
        size_t ma = static_cast<size_t>(uniform_int(rng, 1, 2)), mb = static_cast<size_t>(uniform_int(rng, 1, 2));
        auto a = random_spectral_form<E>(rng, alg, ma, pool, 0.3);
        auto b = random_spectral_form<E>(rng, alg, mb, pool, 0.3);
        bool oracle_eq = oracle::equivalent(numeric_spectra(a.reconstruct()), numeric_spectra(b.reconstruct()));
        EXPECT_EQ(n_class(a) == n_class(b), oracle_eq);
        EXPECT_EQ(n_equiv(a, b), oracle_eq);
        equal_pairs += oracle_eq;
    }
    EXPECT_GT(equal_pairs, 5u);
}

TEST(Th1, SurjectiveOntoFiniteMaps) {
    Rng rng(37);
    for (int it = 0; it < 100; ++it) {
        MultiMatrixAlgebra alg({static_cast<size_t>(uniform_int(rng, 1, 3))});
        auto x = random_n0<E>(rng, alg, 4);
        auto r = realize(x);
        r.a.validate();
        r.b.validate();
        EXPECT_EQ(n_class(r.a) - n_class(r.b), x);
    }
}

TEST(N0, CancellationAndGroupLaws) {
    Rng rng(41);
    for (int it = 0; it < 200; ++it) {
        auto alg = random_algebra<E>(rng, 2, 2);
        auto x = random_n0<E>(rng, alg, 3, 1), y = random_n0<E>(rng, alg, 3, 1), z = random_n0<E>(rng, alg, 3, 1);
        EXPECT_EQ((x + y) + z, x + (y + z));
        EXPECT_EQ(x + y, y + x);
        EXPECT_EQ((x + z == y + z), (x == y));
        EXPECT_TRUE((x - x).empty());
    }
}

TEST(N0, TrivialRanksGiveEmptyClass) {
    Rng rng(43);
    for (int it = 0; it < 20; ++it) {
        auto alg = random_algebra<E>(rng, 3, 2);
        N0Class<E> x(alg);
        for (int k = 0; k < 3; ++k) x.add(random_nonzero_value<E>(rng), K0Class(alg.factors(), 0));
        EXPECT_TRUE(x.empty());
    }
}

TEST(N0, FloatBackendAgrees) {
    auto a = spectral_decompose(th::elem<F>({2}, 1, {th::diag<F>({2, 3})}));
    N0Class<F> want(kM2);
    want.add(F(2, 0), {1});
    want.add(F(3, 0), {1});
    EXPECT_EQ(n_class(a), want);
}
