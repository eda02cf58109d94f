#include <gtest/gtest.h>

#include <random>

#include <brunesynth/response.hpp>

#include "support.hpp"

using namespace brunesynth;
using namespace testing_support;

namespace {

RationalFunction rf(std::initializer_list<double> num, std::initializer_list<double> den) {
    std::vector<Real> n, d;
    for (double x : num) n.emplace_back(x);
    for (double x : den) d.emplace_back(x);
    return {Poly<Real>(n), Poly<Real>(d)};
}

// Max relative deviation between the synthesized ladder and the rational function on a j-axis grid.
double ladder_mismatch(const SynthesisResult& r, const RationalFunction& z, double w_lo, double w_hi, int n,
                       bool extended) {
    double worst = 0;
    for (int i = 0; i < n; ++i) {
        const double w = w_lo * std::pow(w_hi / w_lo, double(i) / (n - 1));
        const Complex s(Real(0), Real(w));
        const Complex want = z(s);
        const Complex got = extended ? ladder_impedance(r.exact, s) : to_ext(ladder_impedance(r.circuit, to_double(s)));
        worst = std::max(worst, to_double(Real(abs(got - want) / abs(want))));
    }
    return worst;
}

}  // namespace

TEST(Stage, TToCoupledConversion) {
    const auto k = t_to_coupled(-1, 2, 2);
    EXPECT_DOUBLE_EQ(k.L11, 1);
    EXPECT_DOUBLE_EQ(k.L22, 4);
    EXPECT_DOUBLE_EQ(k.M, 2);
    EXPECT_DOUBLE_EQ(std::sqrt(k.L11 * k.L22), k.M);
}

TEST(Stage, RegularStageIsTightlyCoupled) {
    const auto s = make_regular_stage(1, 0.5, 3, 12);
    EXPECT_NEAR(s.M, std::sqrt(s.L11 * s.L22), 1e-12 * s.M);
    EXPECT_NEAR(s.t, 0.5, 1e-15);
    EXPECT_NEAR(s.L3, -s.L1 * s.L2 / (s.L1 + s.L2), 1e-12 * std::abs(s.L3));
    EXPECT_NO_THROW(validate_circuit(BruneCircuit{{}, {s}, 1.0, TerminalKind::Resistor}));
}

TEST(Stage, CoupledAndTFormsAgree) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> w(0.1, 20);
    for (int i = 0; i < 20; ++i) {
        const auto c = random_brune_circuit(rng, 4, i % 3 == 0 ? 2 : -1);
        const cdouble s(0.01 * w(rng), w(rng));
        const cdouble a = ladder_impedance(c, s, LadderForm::TEquivalent);
        const cdouble b = ladder_impedance(c, s, LadderForm::Coupled);
        EXPECT_LT(rel_err(a, b), 1e-10);
    }
}

TEST(RemoveJaxis, SeriesLCToShort) {
    // s + 1/s: inductor and capacitor in series, nothing left behind them.
    const auto z = rf({1, 0, 1}, {0, 1});
    const auto r = remove_jaxis_poles(z);
    EXPECT_TRUE(r.terminated);
    EXPECT_EQ(r.terminal, TerminalKind::Short);
    double L = 0, C = 0;
    for (const auto& e : r.elements) {
        if (e.kind == AxisElementKind::SeriesL) L += to_double(e.L);
        if (e.kind == AxisElementKind::SeriesC) C += to_double(e.C);
    }
    EXPECT_NEAR(L, 1, 1e-30);
    EXPECT_NEAR(C, 1, 1e-30);
}

TEST(RemoveJaxis, ParallelLCBlock) {
    // 1 + s/(s^2+4): a parallel LC (L = 1/4, C = 1) in series with 1 Ohm.
    const auto z = rf({4, 1, 1}, {4, 0, 1});
    const auto r = remove_jaxis_poles(z);
    ASSERT_EQ(r.elements.size(), 1u);
    EXPECT_EQ(r.elements[0].kind, AxisElementKind::SeriesParallelLC);
    EXPECT_NEAR(to_double(r.elements[0].L), 0.25, 1e-30);
    EXPECT_NEAR(to_double(r.elements[0].C), 1.0, 1e-30);
    EXPECT_FALSE(r.terminated);
    EXPECT_NEAR(to_double(r.reduced(Complex(Real(3), Real(1))).real()), 1.0, 1e-40);
}

TEST(RemoveJaxis, PoleAtInfinity) {
    const auto r = remove_jaxis_poles(rf({1, 1}, {1}));
    ASSERT_EQ(r.elements.size(), 1u);
    EXPECT_EQ(r.elements[0].kind, AxisElementKind::SeriesL);
    EXPECT_NEAR(to_double(r.elements[0].L), 1, 1e-30);
    const auto red = r.reduced.normalized();
    EXPECT_EQ(red.num.degree(), 0u);
    EXPECT_NEAR(to_double(red.num[0] / red.den[0]), 1, 1e-30);
}

TEST(RemoveJaxis, NoAxisPolesIsIdentity) {
    const auto z = rf({2, 1}, {1, 1});
    const auto r = remove_jaxis_poles(z);
    EXPECT_TRUE(r.elements.empty());
    EXPECT_EQ(r.reduced.num.degree(), 1u);
    EXPECT_EQ(r.reduced.den.degree(), 1u);
    EXPECT_NEAR(to_double(abs(r.reduced(Complex(Real(0), Real(2))) - z(Complex(Real(0), Real(2))))), 0, 1e-40);
}

TEST(RemoveJaxis, NegativeResidueIsRejected) {
    // 1 - 1/s
    EXPECT_THROW(remove_jaxis_poles(rf({-1, 1}, {0, 1})), NotPositiveRealError);
}

TEST(MinRealPart, DegenerateTrigger) {
    const auto mn = find_min_real_part(rf({2, 1}, {1, 1}));  // 1 + 1/(s+1)
    EXPECT_EQ(mn.where, MinimumLocation::Infinity);
    EXPECT_NEAR(to_double(mn.value), 1, 1e-30);
}

TEST(MinRealPart, Constant) {
    const auto mn = find_min_real_part(rf({50}, {1}));
    EXPECT_NEAR(to_double(mn.value), 50, 1e-30);
}

TEST(MinRealPart, BiquadAgainstDenseScan) {
    const auto z = rf({1, 1, 1}, {4, 1, 1});
    const auto mn = find_min_real_part(z);
    double best = 1e300, at = 0;
    for (int i = 0; i <= 1000000; ++i) {
        const double w = 10.0 * i / 1000000;
        const double re = z(cdouble(0, w)).real();
        if (re < best) best = re, at = w;
    }
    EXPECT_EQ(mn.where, MinimumLocation::Finite);
    EXPECT_NEAR(to_double(mn.value), best, 1e-10);
    EXPECT_NEAR(to_double(mn.omega), at, 2e-5);
    // Re Z(jw) = (w^2-2)^2/|.|^2: the minimum is exactly 0 at sqrt(2).
    EXPECT_NEAR(to_double(mn.omega), std::sqrt(2.0), 1e-10);
}

TEST(MinRealPart, NotPositiveRealThrows) {
    EXPECT_THROW(find_min_real_part(rf({-1, 1}, {1, 1})), NotPositiveRealError);  // (s-1)/(s+1)
}

TEST(Extract, BiquadStageReproducesImpedance) {
    const auto z = rf({1, 1, 1}, {4, 1, 1});
    SynthesisState st{z, {}, 0};
    auto [stage, rest] = extract_stage(st);
    EXPECT_EQ(stage.kind, StageKind::Regular);
    EXPECT_NEAR(to_double(stage.omega1), std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(to_double(stage.R), 0, 1e-12);
    EXPECT_NEAR(to_double(stage.M), to_double(sqrt(stage.L11 * stage.L22)), 1e-12);
    const auto rem = rest.z.normalized();
    ASSERT_EQ(rem.num.degree(), 0u);
    ASSERT_EQ(rem.den.degree(), 0u);
    BruneCircuitExt c;
    c.stages.push_back(stage);
    c.r_terminal = rem.num[0] / rem.den[0];
    for (int i = 1; i <= 100; ++i) {
        const Complex s(Real(0), Real(0.05 * i));
        EXPECT_LT(to_double(Real(abs(ladder_impedance(c, s) - z(s)) / abs(z(s)))), 1e-9) << i;
    }
}

TEST(Extract, DegenerateStage) {
    SynthesisState st{rf({2, 1}, {1, 1}), {}, 0};  // 1 + 1/(s+1)
    auto [stage, rest] = extract_degenerate_stage(st);
    EXPECT_EQ(stage.kind, StageKind::Degenerate);
    EXPECT_NEAR(to_double(stage.R), 1, 1e-30);
    EXPECT_NEAR(to_double(stage.C), 1, 1e-30);
    const auto rem = rest.z.normalized();
    ASSERT_EQ(rem.num.degree(), 0u);
    EXPECT_NEAR(to_double(rem.num[0] / rem.den[0]), 1, 1e-30);
}

TEST(Extract, DegenerateRc) {
    // R + 1/(sC) with R = 2, C = 0.5: the shunt capacitor absorbs the whole reactance.
    SynthesisState st{rf({1, 1}, {0, 0.5}), {}, 0};
    auto [stage, rest] = extract_degenerate_stage(st);
    EXPECT_NEAR(to_double(stage.R), 2, 1e-30);
    EXPECT_NEAR(to_double(stage.C), 0.5, 1e-30);
    EXPECT_TRUE(rest.z.den.normalized().is_zero() || rest.z.num.degree() > rest.z.den.normalized().degree());
}

TEST(Synthesize, Constant) {
    const auto r = synthesize(rf({50}, {1}));
    EXPECT_TRUE(r.circuit.stages.empty());
    EXPECT_TRUE(r.circuit.preamble.empty());
    EXPECT_EQ(r.circuit.terminal, TerminalKind::Resistor);
    EXPECT_DOUBLE_EQ(r.circuit.r_terminal, 50);
}

TEST(Synthesize, SeriesRL) {
    const auto r = synthesize(rf({1, 1}, {1}));
    ASSERT_EQ(r.circuit.preamble.size(), 1u);
    EXPECT_EQ(r.circuit.preamble[0].kind, AxisElementKind::SeriesL);
    EXPECT_DOUBLE_EQ(r.circuit.preamble[0].L, 1);
    EXPECT_TRUE(r.circuit.stages.empty());
    EXPECT_DOUBLE_EQ(r.circuit.r_terminal, 1);
}

TEST(Synthesize, RandomLaddersRoundTrip) {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 12; ++i) {
        const auto z = random_passive_ladder(rng, 2 + i % 3);
        const auto r = synthesize(z);
        EXPECT_LT(ladder_mismatch(r, z, 0.01, 100, 200, true), 1e-9) << i;
        EXPECT_LT(ladder_mismatch(r, z, 0.01, 100, 200, false), 1e-6) << i;
        for (const auto& s : r.circuit.stages) {
            if (s.kind != StageKind::Regular) continue;
            EXPECT_GT(s.C, 0);
            EXPECT_GT(s.L11, 0);
            EXPECT_GT(s.L22, 0);
            EXPECT_NEAR(s.M, std::sqrt(s.L11 * s.L22), 1e-9 * s.M);
        }
    }
}

TEST(Synthesize, DegreeBookkeeping) {
    std::mt19937_64 rng(77);
    for (int i = 0; i < 8; ++i) {
        const auto z = random_passive_ladder(rng, 3);
        const auto r = synthesize(z);
        const auto start = remove_jaxis_poles(z).reduced.normalized();
        std::size_t n = start.num.degree(), d = start.den.degree();
        for (const auto& rec : r.log) {
            const std::size_t drop = rec.kind == StageKind::Regular ? 2 : 1;
            EXPECT_EQ(rec.num_degree + drop, n) << i << " stage " << rec.index;
            EXPECT_EQ(rec.den_degree + drop, d) << i << " stage " << rec.index;
            // Axis elements pulled off after a stage change the degrees by their own amounts.
            if (!r.exact.stages[&rec - r.log.data()].tail.empty()) break;
            n = rec.num_degree;
            d = rec.den_degree;
        }
    }
}

TEST(Synthesize, RejectsNonPositiveReal) {
    PoleResidueModel m;
    m.poles = {1.0};
    m.residues = {1.0};
    m.d = 1;
    EXPECT_THROW(synthesize(m), NumericalError);
}

TEST(Validate, CatchesLooseCoupling) {
    auto s = make_regular_stage(1, 1, 1, 4);
    s.M = 1.9;
    EXPECT_THROW(validate_circuit(BruneCircuit{{}, {s}, 1.0, TerminalKind::Resistor}), ValidationError);
}
