#include <gtest/gtest.h>

#include "sagnac/errors.hpp"
#include "sagnac/polarization.hpp"
#include "support.hpp"

using namespace sagnac;
using namespace testing_support;

namespace {

PolarizationTransform from_oracle(const M2& m) {
    PolarizationTransform t;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) t.m[i][j] = m[i][j];
    return t;
}

}  // namespace

TEST(Normalize, KeepsUnitState) {
    const auto s = normalize({1.0, 0.0});
    EXPECT_EQ(s.alpha, Complex(1.0));
    EXPECT_EQ(s.beta, Complex(0.0));
}

TEST(Normalize, ScalesThreeFourFive) {
    const auto s = normalize({3.0, Complex(0, 4)});
    EXPECT_NEAR(std::abs(s.alpha - Complex(0.6)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(s.beta - Complex(0, 0.8)), 0.0, 1e-15);
}

TEST(Normalize, RejectsZeroState) {
    try {
        normalize({0.0, 0.0});
        FAIL() << "expected DomainError";
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("unnormalizable"), std::string::npos);
    }
}

TEST(Normalize, PreservesDirection) {
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        const PolarizationState raw{{rng.normal(), rng.normal()}, {rng.normal(), rng.normal()}};
        const auto s = normalize(raw);
        EXPECT_NEAR(s.norm2(), 1.0, 1e-12);
        EXPECT_NEAR(std::abs(s.beta / s.alpha - raw.beta / raw.alpha), 0.0, 1e-12 * std::abs(raw.beta / raw.alpha));
    }
}

TEST(Apply, Identity) {
    const PolarizationState s{Complex(0.3, 0.1), Complex(-0.2, 0.9)};
    EXPECT_EQ(apply(PolarizationTransform::identity(), s), s);
}

TEST(Apply, SwapMatrix) {
    PolarizationTransform swap;
    swap.m = {{{0.0, 1.0}, {1.0, 0.0}}};
    const auto out = apply(swap, PolarizationState::horizontal());
    EXPECT_EQ(out.alpha, Complex(0.0));
    EXPECT_EQ(out.beta, Complex(1.0));
}

TEST(Apply, PiPhaseNegatesState) {
    Rng rng(12);
    const auto s = rng.state();
    const Complex e = std::polar(1.0, kPi);
    const auto out = apply(PolarizationTransform::diagonal(e, e), s);
    EXPECT_NEAR(std::abs(out.alpha + s.alpha), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(out.beta + s.beta), 0.0, 1e-15);
    EXPECT_NEAR(out.norm2(), 1.0, 1e-12);
}

TEST(Compose, IdentityIsNeutral) {
    Rng rng(13);
    const auto m = rng.unitary();
    EXPECT_LT(max_abs_diff(compose(PolarizationTransform::identity(), m), m), 1e-15);
}

TEST(Compose, RotationsAdd) {
    Rng rng(14);
    for (int i = 0; i < 100; ++i) {
        const double a = rng.uniform(-kPi, kPi), b = rng.uniform(-kPi, kPi);
        const auto got = compose(PolarizationTransform::rotation(a), PolarizationTransform::rotation(b));
        EXPECT_LT(max_diff(got, rot(a + b)), 1e-12);
    }
}

TEST(Compose, SecondArgumentActsFirst) {
    const auto a = PolarizationTransform::half_wave(0.0);
    const auto b = PolarizationTransform::rotation(kPi / 4);
    EXPECT_LT(max_diff(compose(a, b), mul(hwp(0.0), rot(kPi / 4))), 1e-15);
}

// A half-wave plate after any rotation is a reflection (determinant -1), so
// HWP(22.5 deg) * rot(45 deg) is diag(1, -1), not a multiple of the identity.
TEST(Compose, HalfWaveAfterRotationIsReflection) {
    const auto got = compose(PolarizationTransform::half_wave(22.5 * kDeg), PolarizationTransform::rotation(45 * kDeg));
    const M2 expected = mul(hwp(22.5 * kDeg), rot(45 * kDeg));
    EXPECT_LT(max_diff(got, expected), 1e-15);
    EXPECT_LT(max_diff(got, diag(1.0, -1.0)), 1e-15);
    EXPECT_NEAR(identity_infidelity(got), 1.0, 1e-15);
}

TEST(Compose, Associative) {
    Rng rng(15);
    for (int i = 0; i < 500; ++i) {
        const auto a = rng.unitary(), b = rng.unitary(), c = rng.unitary();
        EXPECT_LT(max_abs_diff(compose(compose(a, b), c), compose(a, compose(b, c))), 1e-12);
    }
}

TEST(Decompose, Identity) {
    const auto d = global_phase_decompose(PolarizationTransform::identity());
    EXPECT_EQ(d.global_phase, 0.0);
    EXPECT_LT(max_abs_diff(d.residual, PolarizationTransform::identity()), 1e-15);
}

TEST(Decompose, ImaginaryScalar) {
    const auto d = global_phase_decompose(PolarizationTransform::diagonal({0, 1}, {0, 1}));
    EXPECT_NEAR(d.global_phase, kPi / 2, 1e-15);
    EXPECT_LT(max_abs_diff(d.residual, PolarizationTransform::identity()), 1e-15);
}

TEST(Decompose, PhasedHalfWavePlate) {
    const auto t = std::polar(1.0, kPi / 3) * PolarizationTransform::half_wave(0.0);
    const auto d = global_phase_decompose(t);
    // Both diagonal entries tie in magnitude; row-major order picks m00.
    EXPECT_NEAR(d.global_phase, kPi / 3, 1e-15);
    EXPECT_LT(max_diff(d.residual, diag(1.0, -1.0)), 1e-15);
}

TEST(Decompose, MinusIdentityMapsToPlusPi) {
    const auto d = global_phase_decompose(PolarizationTransform::diagonal(-1.0, -1.0));
    EXPECT_EQ(d.global_phase, kPi);
}

TEST(Decompose, RejectsZeroMatrix) {
    EXPECT_THROW(global_phase_decompose(PolarizationTransform::diagonal(0.0, 0.0)), DomainError);
}

TEST(Decompose, RoundTripOnRandomUnitaries) {
    Rng rng(16);
    for (int i = 0; i < 10000; ++i) {
        const auto t = rng.unitary();
        const auto d = global_phase_decompose(t);
        ASSERT_GT(d.global_phase, -kPi);
        ASSERT_LE(d.global_phase, kPi);
        ASSERT_LT(max_abs_diff(std::polar(1.0, d.global_phase) * d.residual, t), 1e-11);
        // Canonical form: the largest entry is real and positive.
        double best = 0;
        Complex pivot;
        for (const auto& row : d.residual.m)
            for (const auto& z : row)
                if (std::abs(z) > best * (1 + 1e-12)) {
                    best = std::abs(z);
                    pivot = z;
                }
        ASSERT_EQ(pivot.imag(), 0.0);
        ASSERT_GT(pivot.real(), 0.0);
    }
}

TEST(Infidelity, ZeroForPhasedIdentity) {
    Rng rng(17);
    for (int i = 0; i < 100; ++i) {
        const Complex g = std::polar(1.0, rng.uniform(-10, 10));
        EXPECT_LT(identity_infidelity(PolarizationTransform::diagonal(g, g)), 1e-15);
    }
}

TEST(Infidelity, OneForHalfWavePlate) {
    EXPECT_NEAR(identity_infidelity(PolarizationTransform::half_wave(0.0)), 1.0, 1e-15);
}

TEST(Infidelity, SmallRotationIsQuadratic) {
    for (double d : {1e-3, 1e-2, 0.1, 0.5}) {
        const double got = identity_infidelity(PolarizationTransform::rotation(d));
        EXPECT_NEAR(got, 1.0 - std::abs(std::cos(d)), 1e-15);
        if (d <= 1e-2) {
            EXPECT_NEAR(got, d * d / 2, 1e-3 * d * d);
        }
    }
}

TEST(Infidelity, RejectsLossyMatrix) {
    EXPECT_THROW(identity_infidelity(PolarizationTransform::diagonal(0.9, 0.9)), DomainError);
}

TEST(Infidelity, NormalizedVariantIgnoresScale) {
    EXPECT_LT(normalized_identity_infidelity(PolarizationTransform::diagonal(0.3, 0.3)), 1e-15);
    Rng rng(18);
    for (int i = 0; i < 200; ++i) {
        const auto u = rng.unitary();
        EXPECT_NEAR(normalized_identity_infidelity(0.4 * u), identity_infidelity(u), 1e-12);
    }
}

TEST(Infidelity, InvariantUnderGlobalPhase) {
    Rng rng(19);
    for (int i = 0; i < 1000; ++i) {
        const auto t = rng.unitary();
        const Complex g = std::polar(1.0, rng.uniform(-kPi, kPi));
        ASSERT_NEAR(identity_infidelity(g * t), identity_infidelity(t), 1e-12);
    }
}

TEST(Stokes, BasisStates) {
    const auto h = stokes({1.0, 0.0});
    EXPECT_EQ(h.s0, 1.0);
    EXPECT_EQ(h.s1, 1.0);
    EXPECT_EQ(h.s2, 0.0);
    EXPECT_EQ(h.s3, 0.0);

    const double r = 1 / std::sqrt(2.0);
    const auto d = stokes({r, r});
    EXPECT_NEAR(d.s0, 1, 1e-15);
    EXPECT_NEAR(d.s1, 0, 1e-15);
    EXPECT_NEAR(d.s2, 1, 1e-15);
    EXPECT_NEAR(d.s3, 0, 1e-15);

    const auto c = stokes({r, Complex(0, r)});
    EXPECT_NEAR(c.s0, 1, 1e-15);
    EXPECT_NEAR(c.s1, 0, 1e-15);
    EXPECT_NEAR(c.s2, 0, 1e-15);
    EXPECT_NEAR(c.s3, 1, 1e-15);
}

TEST(Stokes, PureStatesLieOnSphere) {
    Rng rng(20);
    for (int i = 0; i < 1000; ++i) {
        const auto s = stokes(rng.state());
        ASSERT_NEAR(s.s1 * s.s1 + s.s2 * s.s2 + s.s3 * s.s3, s.s0 * s.s0, 1e-12);
    }
}

TEST(Properties, UnitaryChainsStayUnitary) {
    Rng rng(21);
    for (int trial = 0; trial < 1000; ++trial) {
        const int len = 1 + static_cast<int>(rng.uniform(0, 32));
        auto acc = PolarizationTransform::identity();
        for (int k = 0; k < len; ++k) acc = compose(rng.unitary(), acc);
        ASSERT_LT(unitarity_defect(acc), 1e-11);
    }
}

TEST(Properties, ApplyRespectsCompose) {
    Rng rng(22);
    for (int i = 0; i < 1000; ++i) {
        const auto a = rng.unitary(), b = rng.unitary();
        const auto s = rng.state();
        const auto lhs = apply(compose(a, b), s);
        const auto rhs = apply(a, apply(b, s));
        ASSERT_LT(std::abs(lhs.alpha - rhs.alpha) + std::abs(lhs.beta - rhs.beta), 1e-12);
    }
}

TEST(Properties, LosslessApplyPreservesNorm) {
    Rng rng(23);
    for (int i = 0; i < 1000; ++i) ASSERT_NEAR(apply(rng.unitary(), rng.state()).norm2(), 1.0, 1e-12);
}

TEST(Properties, MatrixFactoriesMatchReference) {
    Rng rng(24);
    for (int i = 0; i < 100; ++i) {
        const double t = rng.uniform(-kPi, kPi);
        EXPECT_LT(max_diff(PolarizationTransform::rotation(t), rot(t)), 1e-15);
        EXPECT_LT(max_diff(PolarizationTransform::half_wave(t), hwp(t)), 1e-15);
        const double g = rng.uniform(-kPi, kPi);
        const M2 ret = mul(rot(t), mul(diag(1.0, std::polar(1.0, g)), rot(-t)));
        EXPECT_LT(max_diff(PolarizationTransform::retarder(t, g), ret), 1e-15);
    }
    EXPECT_LT(max_abs_diff(from_oracle(hwp(0.3)), PolarizationTransform::half_wave(0.3)), 1e-15);
}

TEST(WrapPhase, Boundaries) {
    EXPECT_EQ(wrap_phase(kPi), kPi);
    EXPECT_EQ(wrap_phase(-kPi), kPi);
    EXPECT_NEAR(wrap_phase(3 * kPi / 2), -kPi / 2, 1e-15);
    EXPECT_NEAR(wrap_phase(-3 * kPi / 2), kPi / 2, 1e-15);
    EXPECT_EQ(wrap_phase(0.0), 0.0);
}
