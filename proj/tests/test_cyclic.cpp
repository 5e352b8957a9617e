// Cyclic operator, face operator, orbit-reduced cyclic homology and the trace map.

#include <gtest/gtest.h>

#include "helpers.hpp"
#include "oracles.hpp"

using namespace ncg;
using th::E;
using th::F;

namespace {

const MultiMatrixAlgebra kC({1});
const MultiMatrixAlgebra kM2({2});

AlgebraElement<E> unit(const MultiMatrixAlgebra& a, size_t b, size_t i, size_t j, size_t m = 1) {
    return AlgebraElement<E>::unit(a, b, i, j, m);
}

TensorElement<E> tp(std::vector<AlgebraElement<E>> xs) { return tensor_product(xs); }

TensorElement<E> random_tensor(Rng& rng, const MultiMatrixAlgebra& base, size_t m, size_t degree, size_t terms) {
    TensorElement<E> t(base, m, degree);
    UnitBasis ub(base.amplified(m));
    for (size_t k = 0; k < terms; ++k) {
        Tuple idx(degree + 1);
        for (auto& x : idx) x = static_cast<uint32_t>(uniform_int(rng, 0, static_cast<long>(ub.dim()) - 1));
        t.add(idx, gaussian_int<E>(rng, 2));
    }
    return t;
}

}  // namespace

TEST(CyclicOp, Examples) {
    auto a = unit(kM2, 0, 0, 1), b = unit(kM2, 0, 1, 0);
    EXPECT_EQ(cyclic_op(tp({a})), tp({a}));
    EXPECT_EQ(cyclic_op(tp({a, b})), tp({b, a}) * E(-1L));
    auto e11 = unit(kM2, 0, 0, 0), e12 = unit(kM2, 0, 0, 1), e21 = unit(kM2, 0, 1, 0);
    EXPECT_EQ(cyclic_op(tp({e11, e12, e21})), tp({e21, e11, e12}));
}

TEST(CyclicOp, PowerIsIdentity) {
    Rng rng(2);
    for (size_t n = 0; n <= 3; ++n) {
        auto xi = random_tensor(rng, MultiMatrixAlgebra({2, 1}), 1, n, 6);
        auto y = xi;
        for (size_t k = 0; k <= n; ++k) y = cyclic_op(y);
        EXPECT_EQ(y, xi) << n;
    }
}

TEST(FaceOp, Examples) {
    auto one = AlgebraElement<E>::identity(kC);
    auto two = one * E(2L);
    EXPECT_TRUE(face_op(tp({one, two})).is_zero());
    auto e11 = unit(kM2, 0, 0, 0), e12 = unit(kM2, 0, 0, 1), e21 = unit(kM2, 0, 1, 0), e22 = unit(kM2, 0, 1, 1);
    EXPECT_EQ(face_op(tp({e12, e21})), tp({e11}) - tp({e22}));
    Rng rng(6);
    for (int it = 0; it < 10; ++it) {
        auto p = random_projection<E>(rng, MultiMatrixAlgebra({2, 1}), 1);
        EXPECT_EQ(face_op(tensor_power(p, 3)), tensor_power(p, 2));
    }
    EXPECT_THROW(face_op(tp({e11})), DomainError);
}

TEST(FaceOp, SquareVanishesOnCC) {
    Rng rng(7);
    for (size_t n = 2; n <= 3; ++n)
        for (int it = 0; it < 10; ++it) {
            auto xi = random_tensor(rng, MultiMatrixAlgebra({2, 1}), 1, n, 8);
            auto bb = face_op(face_op(xi));
            EXPECT_TRUE(cc_equal(bb, TensorElement<E>(bb.base, bb.m, bb.degree)));
            // b sends Im(1 - tau) into Im(1 - tau)
            auto d = face_op(xi - cyclic_op(xi));
            EXPECT_TRUE(cc_equal(d, TensorElement<E>(d.base, d.m, d.degree)));
        }
}

TEST(HC, DimensionsMatchDenseOracle) {
    struct Case {
        std::vector<size_t> blocks;
        size_t max_n;
    };
    for (const auto& c : {Case{{1}, 4}, Case{{2}, 2}, Case{{1, 1}, 3}, Case{{1, 2}, 1}}) {
        auto dims = hc_dimensions(MultiMatrixAlgebra(c.blocks), c.max_n);
        ASSERT_EQ(dims.size(), c.max_n + 1);
        for (size_t n = 0; n <= c.max_n; ++n) EXPECT_EQ(dims[n], oracle::hc_dimension(c.blocks, n)) << n;
    }
    EXPECT_EQ(hc_dimensions(kC, 4), (std::vector<size_t>{1, 0, 1, 0, 1}));
    EXPECT_EQ(hc_dimensions(kM2, 2), (std::vector<size_t>{1, 0, 1}));
    EXPECT_EQ(hc_dimensions(MultiMatrixAlgebra({1, 1}), 2), (std::vector<size_t>{2, 0, 2}));
}

TEST(HC, DegreeZeroHasNoQuotient) {
    for (auto blocks : {std::vector<size_t>{1}, {2}, {1, 2}, {3}}) {
        MultiMatrixAlgebra a(blocks);
        EXPECT_EQ(build_cyclic_space(a, 0)->dimension(), a.dimension());
    }
}

TEST(HC, BudgetExceededIsResourceError) {
    auto saved = settings().max_ambient.load();
    settings().max_ambient = 1000;
    EXPECT_THROW(hc_space(MultiMatrixAlgebra({3}), 3), ResourceError);
    settings().max_ambient = saved;
}

TEST(HC, ClassExamples) {
    auto z = hc_class(TensorElement<E>(kC, 1, 2));
    EXPECT_TRUE(z.is_zero());
    auto p = AlgebraElement<E>::identity(kC);
    auto c = hc_class(tensor_power(p, 3));
    ASSERT_EQ(c.coords.size(), 1u);
    EXPECT_FALSE(c.is_zero());
    // degree 0: every element is a cycle, e12 = [e12, e22] is a commutator
    auto e11 = unit(kM2, 0, 0, 0), e12 = unit(kM2, 0, 0, 1);
    EXPECT_TRUE(hc_class(tp({e12})).is_zero());
    EXPECT_THROW(hc_class(tp({e11, e12})), DomainError);
}

TEST(HC, BoundariesHaveZeroClassAndWitness) {
    Rng rng(12);
    for (int it = 0; it < 10; ++it) {
        auto eta = random_tensor(rng, kM2, 1, 2, 5);
        auto xi = face_op(eta);
        EXPECT_TRUE(hc_class(xi).is_zero());
        auto w = is_boundary(xi);
        ASSERT_TRUE(w.has_value());
        EXPECT_TRUE(cc_equal(face_op(*w), xi));
    }
    auto p = AlgebraElement<E>::identity(kC);
    EXPECT_FALSE(is_boundary(tensor_power(p, 3)).has_value());
}

TEST(HC, EvenPowerOfProjectionVanishesInCC) {
    Rng rng(14);
    for (int it = 0; it < 10; ++it) {
        auto p = random_projection<E>(rng, MultiMatrixAlgebra({2}), 1);
        auto t = tensor_power(p, 2);
        EXPECT_TRUE(cc_equal(t, TensorElement<E>(t.base, t.m, t.degree)));
    }
}

TEST(Trace, Examples) {
    auto one = AlgebraElement<E>::identity(kC);
    // r = 1 is the identity
    Rng rng(15);
    auto xi = random_tensor(rng, kM2, 1, 2, 5);
    EXPECT_EQ(trace_map(xi), xi);
    auto e12 = unit(kC, 0, 0, 1, 2), e21 = unit(kC, 0, 1, 0, 2);
    EXPECT_EQ(trace_map(tp({e12, e21})), tp({one, one}));
    auto p = unit(kC, 0, 0, 0, 2);
    EXPECT_EQ(trace_map(tensor_power(p, 3)), tensor_power(one, 3));
}

TEST(Trace, IsChainMap) {
    Rng rng(16);
    for (int it = 0; it < 50; ++it) {
        auto base = it % 2 ? MultiMatrixAlgebra({1, 1}) : kC;
        size_t n = static_cast<size_t>(uniform_int(rng, 1, 2));
        auto xi = random_tensor(rng, base, 2, n, 6);
        EXPECT_EQ(trace_map(face_op(xi)), face_op(trace_map(xi)));
        EXPECT_EQ(trace_map(cyclic_op(xi)), cyclic_op(trace_map(xi)));
    }
}

TEST(Trace, InducedMapIsIsomorphism) {
    for (auto base : {kC, MultiMatrixAlgebra({1, 1})}) {
        for (size_t n = 0; n <= 2; ++n) {
            auto big = hc_space(base.amplified(2), n);
            auto small = hc_space(base, n);
            ASSERT_EQ(big->dimension(), small->dimension());
            Matrix<E> induced(small->dimension(), big->dimension());
            for (size_t k = 0; k < big->dimension(); ++k) {
                auto cls = hc_class(trace_map(hc_basis_tensor<E>(*big, k, base, 2)));
                for (size_t i = 0; i < cls.coords.size(); ++i) induced(i, k) = cls.coords[i];
            }
            EXPECT_EQ(rank(induced), small->dimension()) << n;
        }
    }
}

TEST(Bounds, Examples) {
    auto one = AlgebraElement<E>::identity(kC);
    DecompositionRep<E> r1{kC, 1, {{one, one}}};
    EXPECT_DOUBLE_EQ(decomposition_norm(r1), 1.0);
    EXPECT_TRUE(check_face_bound(r1, 0));
    DecompositionRep<E> r2{kC, 1, {{one * E(2L), one * E(3L)}}};
    EXPECT_DOUBLE_EQ(decomposition_norm(r2), 6.0);
    EXPECT_TRUE(check_trace_bound(r2));
    DecompositionRep<E> empty{kC, 1, {}};
    EXPECT_THROW(decomposition_norm(empty), DomainError);
}

TEST(Bounds, RandomRepresentativesOverM2) {
    Rng rng(17);
    for (int it = 0; it < 500; ++it) {
        DecompositionRep<F> rep{kC, 2, {}};
        for (int s = 0; s < 2; ++s) {
            std::vector<AlgebraElement<F>> sm;
            for (int f = 0; f < 2; ++f) {
                auto x = AlgebraElement<F>::zero(kC, 2);
                for (size_t i = 0; i < 2; ++i)
                    for (size_t j = 0; j < 2; ++j) x.blocks[0](i, j) = F(std::normal_distribution<double>()(rng), std::normal_distribution<double>()(rng));
                sm.push_back(x);
            }
            rep.summands.push_back(sm);
        }
        EXPECT_TRUE(check_trace_bound(rep));
        EXPECT_TRUE(check_face_bound(rep, 0));
    }
}

TEST(HC, FloatBackendClasses) {
    auto p = AlgebraElement<F>::identity(kC);
    auto c = hc_class(tensor_power(p, 3));
    auto e = hc_class(tensor_power(AlgebraElement<E>::identity(kC), 3));
    ASSERT_EQ(c.coords.size(), e.coords.size());
    for (size_t i = 0; i < c.coords.size(); ++i) EXPECT_NEAR(std::abs(c.coords[i] - e.coords[i].to_complex()), 0.0, 1e-9);
}
