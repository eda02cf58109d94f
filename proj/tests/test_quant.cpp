#include <gtest/gtest.h>

#include <random>

#include <Eigen/Eigenvalues>

#include <brunesynth/quant.hpp>
#include <brunesynth/response.hpp>

#include "support.hpp"

using namespace brunesynth;
using namespace testing_support;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

double max_rel_diff(const MatrixXd& a, const MatrixXd& b) {
    return (a - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff();
}

bool tridiagonal(const MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (std::abs(i - j) > 1 && m(i, j) != 0.0) return false;
    return true;
}

JunctionParams junction(double L_J, double C_J) {
    JunctionParams jp;
    jp.L_J = L_J;
    jp.C_J = C_J;
    return jp;
}

// Same circuit, lossless, with the terminal replaced by a capacitor to ground (open when C_term = 0).
BruneCircuit lossless_with_terminal_cap(BruneCircuit c, double C_term) {
    for (auto& s : c.stages) s.R = 0;
    c.terminal = TerminalKind::Open;
    if (C_term > 0) c.stages.back().tail.push_back({AxisElementKind::ShuntC, 0, 0, C_term, false});
    return c;
}

// Flip the sign of every reduced coordinate after the merged one: maps our projection
// (Phi_{k+1} = -Phi_k) onto the convention in which the merged off-diagonals are positive.
MatrixXd gauge(std::size_t n, std::size_t k) {
    MatrixXd D = MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = k + 1; i < n; ++i) D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = -1;
    return D;
}

}  // namespace

TEST(Quant, SingleStageMatrices) {
    const double CJ = 0.3, C1 = 0.7, L11 = 1.0, L22 = 9.0, Cterm = 0.2;
    BruneCircuit c{{}, {make_regular_stage(2, C1, L11, L22)}, 100, TerminalKind::Resistor};
    QuantOptions opt;
    opt.terminal_capacitance = Cterm;
    const auto sys = build_system(c, junction(4.5, CJ), opt);
    const double t = 1.0 / 3.0, Cp = C1 / ((1 - t) * (1 - t)), Lp = L22 * (1 - t) * (1 - t);
    MatrixXd cap(2, 2), stiff(2, 2);
    cap << CJ + Cp, t * Cp, t * Cp, t * t * Cp + Cterm;
    stiff << 1, 1, 1, 1;
    stiff /= Lp;
    EXPECT_LT(max_rel_diff(sys.cap, cap), 1e-15);
    EXPECT_LT(max_rel_diff(sys.stiffness, stiff), 1e-15);
    EXPECT_EQ(sys.dimension(), 2u);
    ASSERT_EQ(sys.coupling_vectors.size(), 2u);
    EXPECT_NEAR(sys.coupling_vectors[0][0], C1 / (1 - t), 1e-15);
    EXPECT_NEAR(sys.coupling_vectors[0][1], t * C1 / (1 - t), 1e-15);
    EXPECT_EQ(coupling_vector(sys, 2), (VectorXd(2) << 0, 1).finished());
    EXPECT_THROW(coupling_vector(sys, 3), ValidationError);
    EXPECT_THROW(coupling_vector(sys, 0), ValidationError);
    EXPECT_EQ(sys.baths[0].kind, BathKind::MidLadder);
    EXPECT_DOUBLE_EQ(sys.baths[0].C_tail, C1);
    EXPECT_EQ(sys.baths[1].kind, BathKind::Terminal);
}

TEST(Quant, TwoStageCouplingVectorsByHand) {
    const double C1 = 0.4, C2 = 0.9;
    BruneCircuit c{{}, {make_regular_stage(1, C1, 1, 4), make_regular_stage(3, C2, 9, 1)}, 50, TerminalKind::Resistor};
    const auto sys = build_system(c, junction(4.5, 0.1));
    const double t1 = 0.5, t2 = 3.0;
    const VectorXd m1 = (VectorXd(3) << C1 / (1 - t1), -C2 / (1 - t2) + t1 * C1 / (1 - t1), -t2 * C2 / (1 - t2)).finished();
    const VectorXd m2 = (VectorXd(3) << 0, -C2 / (1 - t2), -t2 * C2 / (1 - t2)).finished();
    EXPECT_LT((coupling_vector(sys, 1) - m1).norm(), 1e-14);
    EXPECT_LT((coupling_vector(sys, 2) - m2).norm(), 1e-14);
    EXPECT_EQ(coupling_vector(sys, 3), (VectorXd(3) << 0, 0, 1).finished());
    EXPECT_DOUBLE_EQ(sys.baths[0].C_tail, C1 + C2);
    EXPECT_DOUBLE_EQ(sys.baths[1].C_tail, C2);
}

TEST(Quant, DegenerateTwoStageCouplingVector) {
    // Stage 1 degenerate, stage 2 regular; the resistor after the degenerate stage.
    const double C2 = 0.6;
    BruneCircuit c{{}, {make_degenerate_stage(1, 0.5), make_regular_stage(2, C2, 1, 4)}, 50, TerminalKind::Resistor};
    const auto sys = build_system(c, junction(4.5, 0.0));
    ASSERT_EQ(sys.dimension(), 2u);
    const double t2 = 0.5;
    const VectorXd paper = (VectorXd(2) << C2 / (1 - t2), t2 * C2 / (1 - t2)).finished();
    EXPECT_LT((gauge(2, 0) * coupling_vector(sys, 2) - paper).norm(), 1e-14);
}

TEST(Quant, DegenerateMatricesMatchPrintedReduction) {
    // M = 4, stage 3 degenerate: compare with the reduced matrices assembled entry by entry.
    std::mt19937_64 rng(8);
    const auto c = random_brune_circuit(rng, 4, 2);
    const double CJ = 0.05, Cterm = 0.3;
    QuantOptions opt;
    opt.terminal_capacitance = Cterm;
    const auto sys = build_system(c, junction(4.5, CJ), opt);
    ASSERT_EQ(sys.dimension(), 4u);
    std::vector<double> t(4), Cp(4), Lp(4);
    for (int k = 0; k < 4; ++k) {
        const auto& s = c.stages[k];
        t[k] = s.degenerate() ? 0 : std::sqrt(s.L11 / s.L22);
        Cp[k] = s.C / ((1 - t[k]) * (1 - t[k]));
        Lp[k] = s.degenerate() ? 0 : s.L22 * (1 - t[k]) * (1 - t[k]);
    }
    MatrixXd cap = MatrixXd::Zero(4, 4), st = MatrixXd::Zero(4, 4);
    cap(0, 0) = CJ + Cp[0];
    cap(0, 1) = cap(1, 0) = t[0] * Cp[0];
    cap(1, 1) = t[0] * t[0] * Cp[0] + Cp[1];
    cap(1, 2) = cap(2, 1) = t[1] * Cp[1];
    cap(2, 2) = t[1] * t[1] * Cp[1] + (Cp[3] + Cp[2]);
    cap(2, 3) = cap(3, 2) = t[3] * Cp[3];
    cap(3, 3) = t[3] * t[3] * Cp[3] + Cterm;
    st(0, 0) = 1 / Lp[0];
    st(0, 1) = st(1, 0) = 1 / Lp[0];
    st(1, 1) = 1 / Lp[0] + 1 / Lp[1];
    st(1, 2) = st(2, 1) = 1 / Lp[1];
    st(2, 2) = 1 / Lp[1] + 1 / Lp[3];
    st(2, 3) = st(3, 2) = 1 / Lp[3];
    st(3, 3) = 1 / Lp[3];
    const MatrixXd D = gauge(4, 2);
    EXPECT_LT(max_rel_diff(D * sys.cap * D, cap), 1e-14);
    EXPECT_LT(max_rel_diff(D * sys.stiffness * D, st), 1e-14);
}

TEST(Quant, CouplingVectorsDecomposeCapacitance) {
    // Current through R_k minus current through R_{k+1} charges C_k, so the capacitance
    // matrix is C_J sigma sigma^t + C_term e e^t + sum_k (m_k - m_{k+1})(m_k - m_{k+1})^t / C_k.
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t M = 1 + trial % 6;
        const int deg = (trial % 3 == 0 && M > 1) ? static_cast<int>(trial % M) : -1;
        const auto c = random_brune_circuit(rng, M, deg);
        QuantOptions opt;
        opt.terminal_capacitance = 0.2;
        const auto sys = build_system(c, junction(4.5, 0.3), opt);
        MatrixXd want = 0.3 * sys.junction_vector * sys.junction_vector.transpose();
        const VectorXd& e = sys.coupling_vectors.back();
        want += 0.2 * e * e.transpose();
        for (std::size_t k = 0; k < M; ++k) {
            VectorXd d = sys.coupling_vectors[k];
            if (k + 1 < M) d -= sys.coupling_vectors[k + 1];
            want += d * d.transpose() / c.stages[k].C;
        }
        EXPECT_LT(max_rel_diff(sys.cap, want), 1e-13) << trial;
    }
}

TEST(Quant, SpectralDensity) {
    EXPECT_DOUBLE_EQ(spectral_density({BathKind::MidLadder, 1, 1}, 1), 0.5);
    EXPECT_DOUBLE_EQ(spectral_density({BathKind::Terminal, 4, 0}, 2), 0.5);
    const SpectralDensity sd{BathKind::MidLadder, 3, 0.7};
    EXPECT_NEAR(spectral_density(sd, 2e-6) / spectral_density(sd, 1e-6), 8, 1e-9);
    EXPECT_DOUBLE_EQ(spectral_density(sd, -1.3), -spectral_density(sd, 1.3));
    EXPECT_GT(spectral_density(sd, 1.3), 0);
    EXPECT_THROW(spectral_density({BathKind::Terminal, 0, 0}, 1), ValidationError);
    EXPECT_THROW(spectral_density({BathKind::MidLadder, -1, 1}, 1), ValidationError);
}

TEST(Quant, SingleLc) {
    BruneCircuit c;
    c.terminal = TerminalKind::Open;
    const auto sys = build_system(c, junction(4.5, 0.2));
    const auto modes = harmonic_modes(sys);
    ASSERT_EQ(modes.size(), 1u);
    EXPECT_NEAR(modes[0].omega, 1 / std::sqrt(4.5 * 0.2), 1e-14);
}

TEST(Quant, ThinTurnsRatioIsPlainLcLadder) {
    // t -> 0: the stage is an inductor L22 with C to ground at the junction side.
    BruneCircuit c{{}, {make_regular_stage(1, 0.5, 1e-20, 2.0)}, 1, TerminalKind::Resistor};
    QuantOptions opt;
    opt.terminal_capacitance = 0.25;
    const auto sys = build_system(c, junction(4.5, 0.1), opt);
    MatrixXd cap(2, 2), st(2, 2);
    cap << 0.6, 0, 0, 0.25;
    st << 0.5, 0.5, 0.5, 0.5;
    EXPECT_LT(max_rel_diff(sys.cap, cap), 1e-9);
    EXPECT_LT(max_rel_diff(sys.stiffness, st), 1e-9);
}

TEST(Quant, SingularCapacitanceNeedsJunctionCapacitor) {
    BruneCircuit c{{}, {make_regular_stage(1, 0.5, 1, 4)}, 10, TerminalKind::Resistor};
    EXPECT_THROW(build_system(c, junction(4.5, 0.0)), ValidationError);
}

TEST(Quant, Rejections) {
    BruneCircuit c{{}, {make_regular_stage(1, 0.5, 1, 4)}, 10, TerminalKind::Resistor};
    auto bad = c;
    bad.stages[0].R = -1;
    EXPECT_THROW(build_system(bad, junction(4.5, 0.1)), ValidationError);
    QuantOptions clamp;
    clamp.clamp_negative = true;
    const auto sys = build_system(bad, junction(4.5, 0.1), clamp);
    EXPECT_TRUE(sys.baths[0].clamped);
    EXPECT_EQ(relaxation_rates(sys).rates[0], 0.0);
    EXPECT_FALSE(sys.warnings.empty());

    bad = c;
    bad.stages.push_back(make_degenerate_stage(1, 1));
    bad.stages.push_back(make_degenerate_stage(1, 1));
    EXPECT_THROW(build_system(bad, junction(4.5, 0.1)), UnsupportedError);
    bad = c;
    bad.stages[0].kind = StageKind::InductiveDegenerate;
    bad.stages[0].L_shunt = 1;
    EXPECT_THROW(build_system(bad, junction(4.5, 0.1)), UnsupportedError);
    bad = c;
    bad.preamble.push_back({AxisElementKind::SeriesL, 0, 1, 0, false});
    EXPECT_THROW(build_system(bad, junction(4.5, 0.1)), UnsupportedError);
    EXPECT_THROW(build_system(c, junction(-1, 0.1)), ValidationError);
}

TEST(Quant, PotentialEnergyOfBranchConfigurations) {
    std::mt19937_64 rng(4);
    for (std::size_t M = 1; M <= 3; ++M) {
        const auto c = random_brune_circuit(rng, M);
        const auto sys = build_system(c, junction(4.5, 0.2));
        for (std::size_t j = 0; j < M; ++j) {
            // Node fluxes with Phi_i + Phi_{i+1} = delta_ij: only transformed inductor j carries flux.
            VectorXd phi = VectorXd::Zero(static_cast<Eigen::Index>(M + 1));
            for (std::size_t i = 0; i < M; ++i)
                phi[static_cast<Eigen::Index>(i + 1)] = (i == j ? 1.0 : 0.0) - phi[static_cast<Eigen::Index>(i)];
            const double energy = 0.5 * phi.dot(sys.stiffness * phi);
            EXPECT_NEAR(energy, 0.5 / sys.L_prime[j], 1e-12 / sys.L_prime[j]);
        }
    }
}

TEST(Quant, ModesAreCapacitanceOrthonormal) {
    std::mt19937_64 rng(12);
    const auto c = random_brune_circuit(rng, 5, 1);
    const auto sys = build_system(c, junction(4.5, 0.1));
    const auto modes = harmonic_modes(sys);
    ASSERT_EQ(modes.size(), sys.dimension());
    for (std::size_t p = 0; p < modes.size(); ++p) {
        if (p > 0) EXPECT_GE(modes[p].omega, modes[p - 1].omega);
        for (std::size_t q = 0; q < modes.size(); ++q) {
            const double g = modes[p].v.dot(sys.cap * modes[q].v);
            EXPECT_NEAR(g, p == q ? 1.0 : 0.0, 1e-10);
        }
    }
}

TEST(Quant, ModesAreResonancesOfTheLosslessNetwork) {
    // Independent oracle: zeros of Y(jw) = 1/(jw L_J) + jw C_J + 1/Z(jw) of the classical network.
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t M = 1 + trial % 5;
        const int deg = trial % 2 ? static_cast<int>(trial % M) : -1;
        const auto c = random_brune_circuit(rng, M, deg);
        const double CJ = deg >= 0 ? 0.0 : 0.15, Cterm = 0.4;
        QuantOptions opt;
        opt.terminal_capacitance = Cterm;
        const auto sys = build_system(c, junction(3.0, CJ), opt);
        const auto classical = make_impedance(lossless_with_terminal_cap(c, Cterm));
        for (const auto& mode : harmonic_modes(sys)) {
            const cdouble s(0, mode.omega);
            const cdouble y = shunted_response(classical, 3.0, s, CJ);
            const double scale = 1 / (mode.omega * 3.0) + std::abs(1.0 / classical.z(s));
            EXPECT_LT(std::abs(y) / scale, 1e-8) << trial << " w=" << mode.omega;
        }
    }
}

TEST(Quant, StiffnessNullSpace) {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        const auto c = random_brune_circuit(rng, 1 + trial % 6);
        const auto sys = build_system(c, junction(4.5, 0.2));
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(sys.stiffness);
        const auto ev = es.eigenvalues();
        const double top = ev.cwiseAbs().maxCoeff();
        EXPECT_LT(std::abs(ev[0]), 1e-12 * top);
        if (ev.size() > 1) EXPECT_GT(ev[1], 1e-9 * top);
        const VectorXd n = es.eigenvectors().col(0);
        EXPECT_GT(std::abs(null_space_overlap(sys)), 0.1);
        EXPECT_GT(std::abs(n.dot(sys.cap * sys.junction_vector)), 1e-9 * sys.cap.norm());
    }
}

TEST(Transformations, FcPatternForTwoStages) {
    MatrixXd want(5, 4);
    want << 1, 1, 1, 1,  //
        0, 0, 1, 1,      //
        0, 0, 0, 1,      //
        0, 1, 1, 1,      //
        0, 0, 1, 1;
    EXPECT_EQ(fc_matrix(2), want);
}

TEST(Transformations, RotationIsOrthogonal) {
    const auto U = rotation_matrix({0.3, 2.0, 0.01, 7.5});
    EXPECT_LT((U.transpose() * U - MatrixXd::Identity(U.rows(), U.cols())).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Transformations, SingleStageAtTinyL0) {
    BruneCircuit c{{}, {make_regular_stage(1, 0.5, 1, 4)}, 10, TerminalKind::Resistor};
    const auto jp = junction(4.5, 0.2);
    const auto a = build_system(c, jp);
    const auto b = build_system_via_transformations(c, jp, 1e-9 * std::sqrt(1.0 * 4.0));
    EXPECT_LT(max_rel_diff(b.cap, a.cap), 1e-6);
    EXPECT_LT(max_rel_diff(b.stiffness, a.stiffness), 1e-6);
}

TEST(Transformations, ConvergeAtLeastLinearly) {
    std::mt19937_64 rng(55);
    for (int trial = 0; trial < 5; ++trial) {
        const auto c = random_brune_circuit(rng, 2 + trial % 4);
        const auto jp = junction(4.5, 0.2);
        const auto a = build_system(c, jp);
        double lmin = 1e300;
        for (const auto& s : c.stages) lmin = std::min(lmin, std::sqrt(s.L11 * s.L22));
        std::vector<double> eps{1e-2, 1e-3}, err;
        for (double e : eps) {
            const auto b = build_system_via_transformations(c, jp, e * lmin);
            err.push_back(std::max(max_rel_diff(b.stiffness, a.stiffness), max_rel_diff(b.cap, a.cap)));
        }
        const double slope = std::log(err[0] / err[1]) / std::log(eps[0] / eps[1]);
        EXPECT_GE(slope, 0.9) << trial;
        EXPECT_LT(err[1], eps[1]) << trial;
    }
}

TEST(Transformations, LargeL0IsRejected) {
    BruneCircuit c{{}, {make_regular_stage(1, 0.5, 1, 4)}, 10, TerminalKind::Resistor};
    EXPECT_THROW(build_system_via_transformations(c, junction(4.5, 0.2), 1.9), ConditioningError);
    EXPECT_THROW(build_system_via_transformations(c, junction(4.5, 0.2), 2.5), ConditioningError);
}

TEST(Degenerate, LimitOfVanishingInductances) {
    // Stage k with L_k2 = eps*L and L_k1 = eps^2*L (t = sqrt(eps)) tends to the degenerate stage.
    std::mt19937_64 rng(90);
    for (int trial = 0; trial < 6; ++trial) {
        const std::size_t M = 2 + trial % 4;
        const std::size_t k = trial % (M - 1);
        const auto deg = random_brune_circuit(rng, M, static_cast<int>(k));
        auto lim = deg;
        const double L = deg.stages[k + 1].L22, eps = 1e-6;
        lim.stages[k] = make_regular_stage(deg.stages[k].R, deg.stages[k].C, eps * eps * L, eps * L);
        const auto jp = junction(4.5, 0.2);
        const auto a = build_system(deg, jp);
        const auto b = build_system(lim, jp);
        const MatrixXd P = degenerate_projection(M + 1, k);
        EXPECT_LT(max_rel_diff(P.transpose() * b.cap * P, a.cap), 1e-3) << trial;
        EXPECT_LT(max_rel_diff(P.transpose() * b.stiffness * P, a.stiffness), 1e-3) << trial;
        for (std::size_t j = 0; j < a.coupling_vectors.size(); ++j) {
            const VectorXd pb = P.transpose() * b.coupling_vectors[j];
            EXPECT_LT((pb - a.coupling_vectors[j]).norm(), 1e-3 * a.coupling_vectors[j].norm()) << trial;
        }
        // The constrained coordinate becomes infinitely stiff; the rest of the spectrum converges.
        const auto ma = harmonic_modes(a), mb = harmonic_modes(b);
        for (std::size_t p = 0; p < ma.size(); ++p) EXPECT_NEAR(mb[p].omega, ma[p].omega, 1e-3 * ma[p].omega);
    }
}

TEST(Rates, LosslessLimit) {
    std::mt19937_64 rng(3);
    auto c = random_brune_circuit(rng, 3);
    const auto base = relaxation_rates(build_system(c, junction(4.5, 0.2))).total;
    for (auto& s : c.stages) s.R = 1e-9;
    c.r_terminal = 1e12;
    const auto r = relaxation_rates(build_system(c, junction(4.5, 0.2)));
    EXPECT_LT(r.total, 1e-6 * base);
    for (double x : r.rates) EXPECT_GE(x, 0);
}

TEST(Rates, DoublingResistanceInWeakCoupling) {
    std::mt19937_64 rng(6);
    auto c = random_brune_circuit(rng, 3);
    for (auto& s : c.stages) s.R = 1e-4;
    const auto jp = junction(4.5, 0.2);
    const auto a = relaxation_rates(build_system(c, jp));
    for (auto& s : c.stages) s.R *= 2;
    const auto b = relaxation_rates(build_system(c, jp));
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(b.rates[j] / a.rates[j], 2, 0.02);
}

TEST(Rates, ThermalFactor) {
    std::mt19937_64 rng(7);
    const auto c = random_brune_circuit(rng, 2);
    const auto sys = build_system(c, junction(4.5, 0.2));
    const auto modes = harmonic_modes(sys);
    const auto q = qubit_mode_index(sys, modes);
    const auto cold = relaxation_rates(sys, modes, q, 0.0);
    const auto warm = relaxation_rates(sys, modes, q, 0.05);
    const double x = sys.junction.hbar * modes[q].omega * 1e9 / (2 * sys.junction.k_B * 0.05);
    EXPECT_NEAR(warm.total / cold.total, 1 / std::tanh(x), 1e-12);
}

TEST(Rates, DecreaseWithTerminalResistanceOnTable2) {
    auto c = table2();
    double prev = 1e300;
    for (double f : {1.0, 10.0, 100.0, 1000.0}) {
        c.r_terminal = table2().r_terminal * f;
        const double total = relaxation_rates(build_system(c, junction(4.5, 0.0))).total;
        EXPECT_LT(total, prev);
        prev = total;
    }
}

TEST(Table2, QuantizedSystemShape) {
    const auto sys = build_system(table2(), junction(4.5, 0.0));
    EXPECT_EQ(sys.dimension(), 9u);
    ASSERT_TRUE(sys.degenerate_index.has_value());
    EXPECT_EQ(*sys.degenerate_index, 4u);
    EXPECT_TRUE(tridiagonal(sys.cap));
    EXPECT_TRUE(tridiagonal(sys.stiffness));
    EXPECT_EQ(sys.coupling_vectors.size(), 10u);
}

TEST(Table2, QubitModeMatchesClassicalPole) {
    const auto sys = build_system(table2(), junction(4.5, 0.0));
    const auto modes = harmonic_modes(sys);
    const auto q = qubit_mode_index(sys, modes);
    const auto pole = find_qubit_pole(make_impedance(table2()), 4.5, 6.7);
    EXPECT_NEAR(modes[q].f_ghz(), pole.pole.f_qb, 5e-3);
}
