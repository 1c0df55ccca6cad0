#include <cmath>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace qd;
using namespace qd::testing;

TEST(OperatorSpec, Validation) {
    auto ctx = QContext::exact(1, 2);
    EXPECT_THROW(OperatorSpec::plain(0, ctx), domain_error);
    EXPECT_THROW(OperatorSpec::stancu(3, ctx, R(2), R(1)), domain_error);
    EXPECT_THROW(OperatorSpec::stancu(3, ctx, R(-1), R(1)), domain_error);
    EXPECT_THROW(OperatorSpec::stancu(3, ctx, Scalar(0.0), Scalar(1.0)), backend_mismatch);
    EXPECT_THROW(OperatorSpec::plain(3, QContext::classical()), domain_error);
    EXPECT_TRUE(OperatorSpec::stancu(3, ctx, R(1), R(2)).as_plain().is_plain());
}

TEST(Bernstein, KnownValues) {
    auto spec = OperatorSpec::plain(2, QContext::exact(1, 2));
    EXPECT_EQ(bernstein_basis(spec, 0, R(1, 2)), R(3, 8));
    EXPECT_EQ(bernstein_basis(spec, 1, R(1, 2)), R(3, 8));
    EXPECT_EQ(bernstein_basis(spec, 2, R(1, 2)), R(1, 4));
    EXPECT_THROW(bernstein_basis(spec, 3, R(1, 2)), domain_error);
    EXPECT_THROW(bernstein_basis(spec, 0, R(3, 2)), domain_error);
}

TEST(Bernstein, PartitionOfUnityProperty) {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        auto spec = OperatorSpec::plain(std::uniform_int_distribution<int>(1, 10)(rng), QContext(random_q(rng)));
        Scalar x = random_unit(rng), s = R(0);
        for (int k = 0; k <= spec.n(); ++k) s += bernstein_basis(spec, k, x);
        EXPECT_EQ(s, R(1));
    }
}

TEST(KernelMass, EqualsQPowerOverQInteger) {
    auto spec = OperatorSpec::plain(2, QContext::exact(1, 2));
    EXPECT_EQ(kernel_mass(spec, 1), R(2, 7));
    for (const auto& ctx : standard_contexts())
        for (int n = 1; n <= 8; ++n)
            for (int k = 0; k <= n; ++k)
                EXPECT_EQ(kernel_mass(OperatorSpec::plain(n, ctx), k), ctx.q_pow(k) / ctx.q_int(n + 1));
    EXPECT_THROW(kernel_mass(OperatorSpec::classical(2), 0), unsupported_error);
}

TEST(DurrmeyerApply, ConstantsArePreserved) {
    for (const auto& ctx : standard_contexts())
        for (int n = 1; n <= 12; ++n)
            EXPECT_EQ(durrmeyer_apply_poly(OperatorSpec::plain(n, ctx), P({R(3, 7)})), P({R(3, 7)}));
}

TEST(DurrmeyerApply, FirstAndSecondMonomial) {
    auto spec = OperatorSpec::plain(2, QContext::exact(1, 2));
    EXPECT_EQ(durrmeyer_apply_poly(spec, T(1)), P({R(8, 15), R(2, 5)}));
    EXPECT_EQ(durrmeyer_apply_poly(spec, T(2))(R(1)), R(28, 31));
    EXPECT_EQ(durrmeyer_apply_fn(spec, FunctionSpec::polynomial(T(2)), R(1)), R(28, 31));
}

TEST(DurrmeyerApply, FirstMomentMatchesClosedExpression) {
    // D(t; x) = x + (1 - (1 + q^{n+1}) x) / [n+2]_q
    for (const auto& ctx : standard_contexts())
        for (int n = 1; n <= 8; ++n) {
            Scalar c = ctx.q_int(n + 2);
            Polynomial expect({R(1) / c, R(1) - (R(1) + ctx.q_pow(n + 1)) / c});
            EXPECT_EQ(durrmeyer_apply_poly(OperatorSpec::plain(n, ctx), T(1)), expect);
        }
}

TEST(DurrmeyerApply, LinearityProperty) {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        auto spec = OperatorSpec::plain(std::uniform_int_distribution<int>(1, 7)(rng), QContext(random_q(rng)));
        Polynomial a = random_poly(rng, 3), b = random_poly(rng, 4);
        Scalar s = random_unit(rng);
        EXPECT_EQ(durrmeyer_apply_poly(spec, a * s + b),
                  durrmeyer_apply_poly(spec, a) * s + durrmeyer_apply_poly(spec, b));
    }
}

TEST(DurrmeyerApply, JacksonPathMatchesPolynomialPath) {
    // exp through its degree-20 Taylor polynomial versus the Jackson series path.
    std::vector<Scalar> c;
    double fact = 1.0;
    for (int i = 0; i <= 20; ++i) {
        if (i) fact *= i;
        c.push_back(Scalar(1.0 / fact));
    }
    Polynomial taylor(c);
    for (double q : {0.5, 0.8}) {
        auto spec = OperatorSpec::plain(5, QContext::real(q));
        for (double x : {0.1, 0.45, 0.9}) {
            double poly = durrmeyer_apply_poly(spec, taylor)(Scalar(x)).as_float();
            double series = durrmeyer_apply_fn(spec, FunctionSpec::builtin(Builtin::Exp), Scalar(x)).as_float();
            EXPECT_NEAR(poly, series, 1e-10) << "q=" << q << " x=" << x;
        }
    }
}

TEST(DurrmeyerApply, TruncationCarriesKernelIndex) {
    auto spec = OperatorSpec::plain(3, QContext::real(0.999));
    try {
        durrmeyer_apply_fn(spec, FunctionSpec::builtin(Builtin::Sin), Scalar(0.5), {1e-12, 50});
        FAIL() << "expected truncation_error";
    } catch (const truncation_error& e) {
        ASSERT_TRUE(e.k().has_value());
        EXPECT_EQ(*e.k(), 0);
    }
}

TEST(DurrmeyerApply, ExactBackendRejectsBuiltins) {
    auto spec = OperatorSpec::plain(3, QContext::exact(1, 2));
    EXPECT_THROW(durrmeyer_apply_fn(spec, FunctionSpec::builtin(Builtin::Exp), R(1, 2)), backend_mismatch);
}

TEST(Stancu, FirstMomentKnownValue) {
    auto spec = OperatorSpec::stancu(2, QContext::exact(1, 2), R(1), R(2));
    EXPECT_EQ(stancu_apply(spec, T(1)), P({R(18, 35), R(6, 35)}));
}

TEST(Stancu, ZeroParametersReproducePlain) {
    std::mt19937 rng(29);
    for (int trial = 0; trial < 10; ++trial) {
        QContext ctx(random_q(rng));
        int n = std::uniform_int_distribution<int>(1, 6)(rng);
        Polynomial p = random_poly(rng, 4);
        EXPECT_EQ(stancu_apply(OperatorSpec::stancu(n, ctx, R(0), R(0)), p),
                  durrmeyer_apply_poly(OperatorSpec::plain(n, ctx), p));
    }
}

TEST(Stancu, FunctionPathMatchesPolynomialPath) {
    auto ctx = QContext::real(0.6);
    auto spec = OperatorSpec::stancu(4, ctx, Scalar(1.0), Scalar(2.0));
    Polynomial p({Scalar(0.5), Scalar(-1.0), Scalar(0.0), Scalar(2.0)});
    auto f = FunctionSpec::tabulated({{0.0, 0.5}, {1.0, 1.5}});
    Polynomial line({Scalar(0.5), Scalar(1.0)});
    for (double x : {0.2, 0.7}) {
        EXPECT_NEAR(stancu_apply(spec, FunctionSpec::polynomial(p), Scalar(x)).as_float(),
                    stancu_apply(spec, p)(Scalar(x)).as_float(), 1e-12);
        EXPECT_NEAR(stancu_apply(spec, f, Scalar(x)).as_float(), stancu_apply(spec, line)(Scalar(x)).as_float(),
                    1e-10);
    }
}

TEST(Classical, BetaIntegralOracle) {
    for (int n = 1; n <= 6; ++n) {
        auto spec = OperatorSpec::classical(n);
        EXPECT_EQ(classical_durrmeyer_apply(spec, T(0)), T(0));
        EXPECT_EQ(classical_durrmeyer_apply(spec, T(1)), P({R(1, n + 2), R(n, n + 2)}));
    }
    EXPECT_THROW(classical_durrmeyer_apply(OperatorSpec::plain(2, QContext::exact(1, 2)), T(1)), unsupported_error);
}

TEST(Classical, QFirstMomentConvergesLinearly) {
    for (int n = 1; n <= 4; ++n) {
        Polynomial ref = classical_durrmeyer_apply(OperatorSpec::classical(n), T(1));
        for (int i = 4; i <= 12; ++i) {
            Scalar eps = R(1, 1L << i);
            auto ctx = QContext(R(1) - eps);
            Polynomial d = durrmeyer_apply_poly(OperatorSpec::plain(n, ctx), T(1)) - ref;
            for (int j = 0; j <= d.degree(); ++j) {
                double ratio = std::abs(d.coeff(j).to_double()) / eps.to_double();
                EXPECT_LT(ratio, 2.0) << "n=" << n << " i=" << i;
            }
        }
    }
}
