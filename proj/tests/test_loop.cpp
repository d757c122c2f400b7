#include <gtest/gtest.h>

#include "sagnac/errors.hpp"
#include "sagnac/loop.hpp"
#include "support.hpp"

using namespace sagnac;
using namespace testing_support;

namespace {

const CrystalSpec kCrystal = lithium_niobate();
const double kVh = v_half_oracle(kCrystal);

}  // namespace

TEST(DefaultLoop, FiveElementsWithModulatorInTheMiddle) {
    const auto layout = build_default_loop(kCrystal);
    ASSERT_EQ(layout.cw_path.size(), 5u);
    EXPECT_TRUE(std::holds_alternative<Eom>(layout.cw_path[2]));
    EXPECT_TRUE(std::holds_alternative<FaradayRotator>(layout.cw_path[0]));
    EXPECT_TRUE(std::holds_alternative<HalfWavePlate>(layout.cw_path[1]));
    EXPECT_TRUE(std::holds_alternative<HalfWavePlate>(layout.cw_path[3]));
    EXPECT_TRUE(std::holds_alternative<FaradayRotator>(layout.cw_path[4]));
    EXPECT_EQ(layout.pbs, Pbs{});
    EXPECT_NO_THROW(validate(layout));
}

// Without rotation both beams see the same plate-modulator-plate product, so
// the output stays scalar but half the light leaves through the input port.
TEST(DefaultLoop, ZeroRotationStaysScalarButLeaks) {
    const auto layout = build_default_loop(kCrystal, 0.0);
    EXPECT_NO_THROW(validate(layout));
    const auto m = device_matrix(layout, kVh / 2);
    EXPECT_LT(normalized_identity_infidelity(m), 1e-12);
    EXPECT_NEAR(std::norm(m(0, 0)) + std::norm(m(1, 0)), 0.5, 1e-12);
    const auto leak = leak_matrix(layout, kVh / 2);
    EXPECT_NEAR(std::norm(leak(0, 0)) + std::norm(leak(1, 0)), 0.5, 1e-12);
}

TEST(DefaultLoop, BadCrystalPropagates) {
    auto c = kCrystal;
    c.thickness_d = -1e-3;
    EXPECT_THROW(build_default_loop(c), DomainError);
}

TEST(Layout, ValidationRejectsMisplacedModulator) {
    auto layout = build_default_loop(kCrystal);
    std::swap(layout.cw_path[1], layout.cw_path[2]);
    EXPECT_THROW(validate(layout), DomainError);

    layout = build_default_loop(kCrystal);
    layout.cw_path.insert(layout.cw_path.begin(), Mirror{0.0});
    EXPECT_THROW(validate(layout), DomainError);

    layout = build_default_loop(kCrystal);
    layout.cw_path[0] = Eom{kCrystal, Axis::kV, 0.0};
    EXPECT_THROW(validate(layout), DomainError);

    layout = build_default_loop(kCrystal);
    layout.cw_path[0] = Pbs{};
    EXPECT_THROW(validate(layout), DomainError);
}

TEST(Trace, IdealAtZeroVoltsReturnsInput) {
    const auto layout = build_default_loop(kCrystal);
    Rng rng(41);
    for (int i = 0; i < 100; ++i) {
        const auto s = rng.state();
        const auto out = trace(layout, s, 0.0);
        EXPECT_LT(std::abs(out.alpha - s.alpha) + std::abs(out.beta - s.beta), 1e-12);
    }
}

TEST(Trace, IdealAtHalfWaveVoltageFlipsSign) {
    const auto layout = build_default_loop(kCrystal);
    const auto in = PolarizationState::linear(kPi / 4);
    const auto out = trace(layout, in, kVh);
    // Oracle: multiply the element matrices per direction by hand.
    LoopParams p;
    const M2 d = device_oracle(p, kVh, kVh);
    const Complex oa = d[0][0] * in.alpha + d[0][1] * in.beta;
    const Complex ob = d[1][0] * in.alpha + d[1][1] * in.beta;
    EXPECT_LT(std::abs(out.alpha - oa) + std::abs(out.beta - ob), 1e-12);
    EXPECT_LT(std::abs(out.alpha + in.alpha) + std::abs(out.beta + in.beta), 1e-12);
    EXPECT_NEAR(std::arg(out.beta / out.alpha), 0.0, 1e-12);
}

TEST(Trace, GlobalPhaseTracksVoltage) {
    const auto layout = build_default_loop(kCrystal);
    Rng rng(42);
    for (int i = 0; i < 200; ++i) {
        const auto s = rng.state();
        const double v = rng.uniform(0, 2 * kVh);
        const Complex g = std::polar(1.0, kPi * v / kVh);
        const auto out = trace(layout, s, v);
        ASSERT_LT(std::abs(out.alpha - g * s.alpha) + std::abs(out.beta - g * s.beta), 1e-10);
    }
}

// Both rotators 5 degrees short: each beam leaks the same sin^2 share into
// the wrong arm, so the device stays proportional to the identity,
// (sin^2 e + e^{i phi} cos^2 e) I, while the missing power exits port A.
TEST(Trace, SymmetricRotatorErrorHasClosedForm) {
    const auto layout = build_default_loop(kCrystal, 40 * kDeg);
    const double e = 5 * kDeg;
    for (double v : {0.0, kVh / 3, kVh / 2, kVh, 1.7 * kVh}) {
        const Complex k = std::sin(e) * std::sin(e) + std::polar(1.0, kPi * v / kVh) * std::cos(e) * std::cos(e);
        EXPECT_LT(max_diff(device_matrix(layout, v), scalar(k)), 1e-12);
    }
    const auto in = PolarizationState::linear(kPi / 4);
    const auto ports = trace_ports(layout, in, kVh);
    EXPECT_LT(std::abs(ports.output.alpha + std::cos(2 * e) * in.alpha), 1e-12);
    EXPECT_NEAR(ports.other.norm2(), std::pow(std::sin(2 * e), 2), 1e-12);
    EXPECT_NEAR(ports.output.norm2() + ports.other.norm2(), 1.0, 1e-12);
}

TEST(Trace, MixedErrorsBreakIndependence) {
    LoopParams p;
    p.fr_err[0] = -5 * kDeg;
    p.hwp_err[1] = 3 * kDeg;
    const auto layout = build_loop(kCrystal, to_options(p));
    const auto m = device_matrix(layout, kVh / 2);
    EXPECT_LT(max_diff(m, device_oracle(p, kVh, kVh / 2)), 1e-12);
    EXPECT_GT(normalized_identity_infidelity(m), 1e-5);
}

TEST(DeviceMatrix, ColumnsAreBasisTraces) {
    Rng rng(43);
    for (int i = 0; i < 100; ++i) {
        const auto p = rng.loop(true);
        const auto layout = build_loop(kCrystal, to_options(p));
        const double v = rng.uniform(0, 2 * kVh);
        const auto m = device_matrix(layout, v);
        const auto h = trace(layout, PolarizationState::horizontal(), v);
        const auto vv = trace(layout, PolarizationState::vertical(), v);
        EXPECT_EQ(m.m[0][0], h.alpha);
        EXPECT_EQ(m.m[1][0], h.beta);
        EXPECT_EQ(m.m[0][1], vv.alpha);
        EXPECT_EQ(m.m[1][1], vv.beta);
        // Superpositions follow the matrix.
        const auto s = rng.state();
        const auto direct = trace(layout, s, v);
        const auto via = apply(m, s);
        ASSERT_LT(std::abs(direct.alpha - via.alpha) + std::abs(direct.beta - via.beta), 1e-12);
    }
}

TEST(DeviceMatrix, IdealValues) {
    const auto layout = build_default_loop(kCrystal);
    EXPECT_LT(max_diff(device_matrix(layout, 0.0), ident()), 1e-12);
    EXPECT_LT(max_diff(device_matrix(layout, kVh), scalar(-1.0)), 1e-12);
    EXPECT_LT(max_diff(device_matrix(layout, kVh / 2), scalar(Complex(0, 1))), 1e-12);
    const auto d = global_phase_decompose(device_matrix(layout, kVh));
    EXPECT_NEAR(d.global_phase, kPi, 1e-12);
    EXPECT_LT(max_diff(d.residual, ident()), 1e-12);
}

TEST(DeviceMatrix, CounterClockwiseVariantIsAlsoIdeal) {
    LoopParams p;
    p.ccw = true;
    const auto layout = build_loop(kCrystal, to_options(p));
    for (double v : {0.0, 0.25 * kVh, kVh, 1.9 * kVh})
        EXPECT_LT(max_diff(device_matrix(layout, v), scalar(std::polar(1.0, kPi * v / kVh))), 1e-12);
}

TEST(DeviceMatrix, MatchesBruteForceOracle) {
    Rng rng(44);
    for (int i = 0; i < 500; ++i) {
        const auto p = rng.loop(i % 5 != 0);
        const auto layout = build_loop(kCrystal, to_options(p));
        const double v = rng.uniform(-kVh, 3 * kVh);
        ASSERT_LT(max_diff(device_matrix(layout, v), device_oracle(p, kVh, v)), 1e-12) << "case " << i;
    }
}

TEST(DeviceMatrix, LosslessLayoutsConservePower) {
    Rng rng(45);
    for (int i = 0; i < 500; ++i) {
        const auto layout = build_loop(kCrystal, to_options(rng.loop(true)));
        const auto s = rng.state();
        const auto ports = trace_ports(layout, s, rng.uniform(0, 2 * kVh));
        ASSERT_NEAR(ports.output.norm2() + ports.other.norm2(), 1.0, 1e-12);
    }
}

TEST(DeviceMatrix, MirrorsMoveFreelyInsideTheCentralSection) {
    LoopParams p;
    p.has_mirror = true;
    p.mirror = 0.4;
    p.fr_err[0] = 2 * kDeg;
    p.hwp_err[1] = -1 * kDeg;
    const auto layout = build_loop(kCrystal, to_options(p));
    ASSERT_EQ(layout.cw_path.size(), 7u);
    auto moved = layout;
    std::swap(moved.cw_path[2], moved.cw_path[3]);  // modulator now off-centre
    EXPECT_THROW(validate(moved), DomainError);
    for (double v : {0.0, 30.0, kVh})
        EXPECT_LT(max_abs_diff(device_matrix(moved, v), device_matrix(layout, v)), 1e-12);
}

TEST(DeviceMatrix, CommonMirrorPhaseIsGlobal) {
    LoopParams p;
    p.has_mirror = true;
    p.mirror = 0.9;
    const auto layout = build_loop(kCrystal, to_options(p));
    const auto m = device_matrix(layout, 20.0);
    EXPECT_LT(normalized_identity_infidelity(m), 1e-12);
    EXPECT_NEAR(wrap_phase(global_phase_decompose(m).global_phase - (kPi * 20.0 / kVh + 2 * 0.9)), 0.0, 1e-12);
}

TEST(Scan, IdealThreePoints) {
    const auto layout = build_default_loop(kCrystal);
    const double volts[] = {0.0, kVh / 2, kVh};
    const auto scan = independence_scan(layout, volts);
    ASSERT_EQ(scan.size(), 3u);
    const double expected[] = {0.0, kPi / 2, kPi};
    for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR(scan[i].unwrapped_phase, expected[i], 1e-12);
        EXPECT_LT(scan[i].infidelity, 1e-12);
        EXPECT_LT(scan[i].port_a_power, 1e-24);
    }
}

TEST(Scan, EmptyListIsRejected) {
    const auto layout = build_default_loop(kCrystal);
    EXPECT_THROW(independence_scan(layout, std::span<const double>{}), DomainError);
}

TEST(Scan, UnwrapsBeyondPi) {
    const auto layout = build_default_loop(kCrystal);
    std::vector<double> volts;
    for (int k = 0; k <= 400; ++k) volts.push_back(4.0 * kVh * k / 400);
    const auto scan = independence_scan(layout, volts);
    for (const auto& p : scan) {
        ASSERT_NEAR(p.unwrapped_phase, kPi * p.voltage / kVh, 1e-9 * std::max(1.0, kPi * p.voltage / kVh));
        ASSERT_GT(p.global_phase, -kPi);
        ASSERT_LE(p.global_phase, kPi);
    }
}

TEST(Scan, SymmetricRotatorErrorKeepsInfidelityFlat) {
    const auto layout = build_default_loop(kCrystal, 40 * kDeg);
    std::vector<double> volts;
    for (int k = 0; k <= 50; ++k) volts.push_back(2.0 * kVh * k / 50);
    const auto scan = independence_scan(layout, volts);
    for (const auto& p : scan) EXPECT_LT(p.infidelity, 1e-12);
    // The imperfection shows up as returned power instead.
    EXPECT_NEAR(scan[25].port_a_power, std::pow(std::sin(10 * kDeg), 2), 1e-12);
    EXPECT_LT(scan[0].port_a_power, 1e-24);
}

TEST(Scan, IdealIndependenceForRandomInputs) {
    const auto layout = build_default_loop(kCrystal);
    Rng rng(46);
    for (int i = 0; i < 1000; ++i) {
        const double v = rng.uniform(0, 2 * kVh);
        const auto s = rng.state();
        const auto out = trace(layout, s, v);
        // Overlap with the input has full magnitude: same polarization.
        const Complex ov = std::conj(s.alpha) * out.alpha + std::conj(s.beta) * out.beta;
        ASSERT_NEAR(std::abs(ov), 1.0, 1e-10);
    }
}
