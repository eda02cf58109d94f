#include "brunesynth/quant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/multiprecision/eigen.hpp>

#include "brunesynth/errors.hpp"

namespace brunesynth {

namespace {

std::string stage_name(std::size_t k) { return "stage " + std::to_string(k + 1); }

struct Prepared {
    std::size_t M = 0;
    std::vector<double> R, C, t, Cp, Lp;
    std::optional<std::size_t> degenerate;
    std::vector<bool> clamped;
    bool terminal_bath = false;
    double R_terminal = 0.0;
    std::vector<std::string> warnings;
};

Prepared prepare(const BruneCircuit& c, const JunctionParams& jp, const QuantOptions& opt) {
    jp.validate();
    if (!c.preamble.empty()) throw UnsupportedError("quantization needs a pure Brune cascade; the circuit has a preamble");
    if (c.terminal == TerminalKind::Short) throw UnsupportedError("quantization of a shorted terminal is not supported");
    if (!(opt.terminal_capacitance >= 0)) throw ValidationError("terminal capacitance must be >= 0");
    validate_circuit(c);

    Prepared p;
    p.M = c.stages.size();
    for (std::size_t k = 0; k < p.M; ++k) {
        const auto& s = c.stages[k];
        if (!s.tail.empty()) throw UnsupportedError(stage_name(k) + " carries axis elements; not quantizable");
        if (s.kind == StageKind::InductiveDegenerate) {
            throw UnsupportedError(stage_name(k) + " is inductive-degenerate (w1 = 0); no quantization recipe");
        }
        double R = s.R;
        bool clamped = false;
        if (R < 0) {
            if (!opt.clamp_negative) {
                throw ValidationError(stage_name(k) + " has negative R = " + std::to_string(R) +
                                      "; enable negative clamping (--clamp-negative) to replace it by 0");
            }
            p.warnings.push_back(stage_name(k) + ": negative R clamped to 0");
            R = 0.0;
            clamped = true;
        }
        p.R.push_back(R);
        p.C.push_back(s.C);
        p.clamped.push_back(clamped || R == 0.0);
        if (s.kind == StageKind::Degenerate) {
            if (p.degenerate) throw UnsupportedError("more than one degenerate stage is not supported");
            p.degenerate = k;
            p.t.push_back(0.0);
            p.Cp.push_back(s.C);
            p.Lp.push_back(0.0);
            continue;
        }
        const double t = std::sqrt(s.L11 / s.L22);
        if (std::abs(1.0 - t) < 1e-12) {
            throw ConditioningError(stage_name(k) + ": L11 = L22 makes the transformed capacitance singular");
        }
        p.t.push_back(t);
        p.Cp.push_back(s.C / ((1 - t) * (1 - t)));
        p.Lp.push_back(s.L22 * (1 - t) * (1 - t));
    }
    if (c.terminal == TerminalKind::Resistor) {
        if (!(c.r_terminal > 0)) throw ValidationError("terminal resistance must be positive");
        p.terminal_bath = true;
        p.R_terminal = c.r_terminal;
    }
    return p;
}

// Non-degenerate coupling vectors of length M+1, with t = 0 for a degenerate stage.
std::vector<Eigen::VectorXd> raw_coupling_vectors(const Prepared& p) {
    const std::size_t M = p.M;
    std::vector<Eigen::VectorXd> out;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(M + 1));
    std::vector<Eigen::VectorXd> rev;
    for (std::size_t k = M; k-- > 0;) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        const double a = sign * p.C[k] / (1 - p.t[k]);
        acc[static_cast<Eigen::Index>(k)] += a;
        acc[static_cast<Eigen::Index>(k + 1)] += a * p.t[k];
        rev.push_back(acc);
    }
    for (auto it = rev.rbegin(); it != rev.rend(); ++it) out.push_back(*it);
    return out;
}

void finish(QuantizedSystem& sys, const Prepared& p, const JunctionParams& jp) {
    const auto N = static_cast<Eigen::Index>(p.M + 1);
    Eigen::VectorXd sigma = Eigen::VectorXd::Zero(N);
    sigma[0] = 1.0;
    std::vector<Eigen::VectorXd> m = raw_coupling_vectors(p);
    Eigen::VectorXd term = Eigen::VectorXd::Zero(N);
    term[N - 1] = 1.0;

    if (p.degenerate) {
        const Eigen::MatrixXd P = degenerate_projection(static_cast<std::size_t>(N), *p.degenerate);
        sys.cap = P.transpose() * sys.cap * P;
        sys.stiffness = P.transpose() * sys.stiffness * P;
        sigma = P.transpose() * sigma;
        for (auto& v : m) v = P.transpose() * v;
        term = P.transpose() * term;
    }
    sys.junction_vector = sigma;

    double tail = 0.0;
    std::vector<double> tails(p.M);
    for (std::size_t k = p.M; k-- > 0;) {
        tail += p.C[k];
        tails[k] = tail;
    }
    for (std::size_t k = 0; k < p.M; ++k) {
        sys.coupling_vectors.push_back(m[k]);
        sys.baths.push_back({BathKind::MidLadder, p.R[k], tails[k], p.clamped[k]});
    }
    if (p.terminal_bath) {
        sys.coupling_vectors.push_back(term);
        sys.baths.push_back({BathKind::Terminal, p.R_terminal, 0.0, false});
    }
    sys.degenerate_index = p.degenerate;
    sys.t = p.t;
    sys.C_prime = p.Cp;
    sys.L_prime = p.Lp;
    sys.junction = jp;
    sys.warnings = p.warnings;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sys.cap, Eigen::EigenvaluesOnly);
    const double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
    if (!(es.eigenvalues().minCoeff() > 1e-14 * lmax)) {
        throw ValidationError(
            "capacitance matrix is singular; a nonzero junction shunt capacitance C_J is required "
            "when the circuit has no degenerate stage");
    }
}

}  // namespace

void JunctionParams::validate() const {
    if (!(L_J > 0) || !std::isfinite(L_J)) throw ValidationError("junction: L_J must be positive");
    if (!(C_J >= 0) || !std::isfinite(C_J)) throw ValidationError("junction: C_J must be >= 0");
    if (!(temperature >= 0)) throw ValidationError("junction: temperature must be >= 0");
    if (!(hbar > 0) || !(k_B > 0) || !(flux_quantum > 0)) throw ValidationError("junction: constants must be positive");
}

const char* to_string(BathKind k) {
    switch (k) {
        case BathKind::MidLadder: return "MID_LADDER";
        case BathKind::Terminal: return "TERMINAL";
    }
    return "?";
}

double spectral_density(const SpectralDensity& sd, double omega) {
    if (!(sd.R > 0)) throw ValidationError("spectral density: R must be positive");
    if (sd.kind == BathKind::Terminal) return omega / sd.R;
    const double x = omega * sd.R * sd.C_tail;
    return omega * omega * omega * sd.R / (1 + x * x);
}

Eigen::MatrixXd degenerate_projection(std::size_t n, std::size_t k) {
    if (n < 2 || k + 1 >= n) throw ValidationError("degenerate projection: stage index out of range");
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n - 1));
    const auto K = static_cast<Eigen::Index>(k);
    for (Eigen::Index c = 0; c < P.cols(); ++c) {
        if (c < K) {
            P(c, c) = 1;
        } else if (c == K) {
            P(c, c) = 1;
            P(c + 1, c) = -1;
        } else {
            P(c + 1, c) = 1;
        }
    }
    return P;
}

QuantizedSystem build_system(const BruneCircuit& c, const JunctionParams& jp, const QuantOptions& opt) {
    const Prepared p = prepare(c, jp, opt);
    const auto N = static_cast<Eigen::Index>(p.M + 1);
    QuantizedSystem sys;
    sys.cap = Eigen::MatrixXd::Zero(N, N);
    sys.stiffness = Eigen::MatrixXd::Zero(N, N);
    sys.cap(0, 0) += jp.C_J;
    sys.cap(N - 1, N - 1) += opt.terminal_capacitance;
    for (std::size_t k = 0; k < p.M; ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        const double t = p.t[k], Cp = p.Cp[k];
        sys.cap(i, i) += Cp;
        sys.cap(i, i + 1) += t * Cp;
        sys.cap(i + 1, i) += t * Cp;
        sys.cap(i + 1, i + 1) += t * t * Cp;
        if (p.degenerate && *p.degenerate == k) continue;
        const double y = 1.0 / p.Lp[k];
        sys.stiffness(i, i) += y;
        sys.stiffness(i, i + 1) += y;
        sys.stiffness(i + 1, i) += y;
        sys.stiffness(i + 1, i + 1) += y;
    }
    finish(sys, p, jp);
    return sys;
}

Eigen::MatrixXd fc_matrix(std::size_t M) {
    const auto m = static_cast<Eigen::Index>(M);
    Eigen::MatrixXd F = Eigen::MatrixXd::Zero(2 * m + 1, m + 2);
    F.row(0).setOnes();
    for (Eigen::Index j = 1; j <= m; ++j) {
        for (Eigen::Index c = j + 1; c <= m + 1; ++c) F(j, c) = 1;  // right branch of stage j
        for (Eigen::Index c = j; c <= m + 1; ++c) F(m + j, c) = 1;  // left branch of stage j
    }
    return F;
}

Eigen::MatrixXd rotation_matrix(const std::vector<double>& t) {
    const auto m = static_cast<Eigen::Index>(t.size());
    Eigen::MatrixXd U = Eigen::MatrixXd::Zero(2 * m + 1, 2 * m + 1);
    U(0, 0) = 1;
    for (Eigen::Index j = 1; j <= m; ++j) {
        const double tj = t[static_cast<std::size_t>(j - 1)];
        const double n = std::sqrt(1 + tj * tj);
        U(j, j) = 1 / n;
        U(j, m + j) = tj / n;
        U(m + j, j) = -tj / n;
        U(m + j, m + j) = 1 / n;
    }
    return U;
}

Eigen::MatrixXd banding_matrix(const std::vector<double>& t) {
    const auto m = static_cast<Eigen::Index>(t.size());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m + 1, m + 1);
    T(0, 0) = 1;
    for (Eigen::Index j = 1; j <= m; ++j) {
        const double tj = t[static_cast<std::size_t>(j - 1)];
        const double v = ((j % 2 == 0) ? 1.0 : -1.0) * std::sqrt(1 + tj * tj) / (1 - tj);
        T(j, j - 1) = v;
        T(j, j) = v;
    }
    return T;
}

QuantizedSystem build_system_via_transformations(const BruneCircuit& c, const JunctionParams& jp, double L0,
                                                 const QuantOptions& opt) {
    if (!(L0 > 0)) throw ValidationError("transformation path needs L0 > 0");
    const Prepared p = prepare(c, jp, opt);
    if (p.degenerate) throw UnsupportedError("transformation path handles non-degenerate circuits only");
    const std::size_t M = p.M;
    const auto m = static_cast<Eigen::Index>(M);

    Eigen::VectorXd cdiag(m + 2);
    cdiag[0] = jp.C_J;
    for (Eigen::Index k = 0; k < m; ++k) cdiag[k + 1] = p.C[static_cast<std::size_t>(k)];
    cdiag[m + 1] = opt.terminal_capacitance;
    const Eigen::MatrixXd F = fc_matrix(M);
    const Eigen::MatrixXd C0 = F * cdiag.asDiagonal() * F.transpose();

    // Tree ordering: junction, right branches L_j2, left branches L_j1.
    // Entries scale as 1/L0^2 and cancel down to O(1) under U, so this part runs in extended precision.
    using MatR = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
    MatR M0 = MatR::Zero(2 * m + 1, 2 * m + 1);
    MatR U = MatR::Zero(2 * m + 1, 2 * m + 1);
    const Real L0sq = Real(L0) * Real(L0);
    U(0, 0) = 1;
    for (Eigen::Index j = 1; j <= m; ++j) {
        const auto& s = c.stages[static_cast<std::size_t>(j - 1)];
        const Real L1(s.L11), L2(s.L22);
        const Real prod = L1 * L2;
        if (!(L0sq < prod)) throw ConditioningError("L0 exceeds the geometric mean inductance of " + stage_name(j - 1));
        const Real Mj = sqrt(prod - L0sq);
        M0(j, j) = L1 / L0sq;
        M0(j, m + j) = Mj / L0sq;
        M0(m + j, j) = Mj / L0sq;
        M0(m + j, m + j) = L2 / L0sq;
        const Real t = sqrt(L1 / L2);
        const Real n = sqrt(1 + t * t);
        U(j, j) = 1 / n;
        U(j, m + j) = t / n;
        U(m + j, j) = -t / n;
        U(m + j, m + j) = 1 / n;
    }
    const MatR MrR = U.transpose() * M0 * U;
    Eigen::MatrixXd Mr(2 * m + 1, 2 * m + 1);
    for (Eigen::Index i = 0; i < Mr.rows(); ++i)
        for (Eigen::Index k = 0; k < Mr.cols(); ++k) Mr(i, k) = to_double(MrR(i, k));
    const Eigen::MatrixXd Cr = rotation_matrix(p.t).transpose() * C0 * rotation_matrix(p.t);

    // The dropped sector must be stiff compared to what is kept.
    const double kept = Mr.topLeftCorner(m + 1, m + 1).cwiseAbs().maxCoeff();
    const double dropped = Mr.bottomRightCorner(m, m).diagonal().minCoeff();
    if (!(dropped > 1e2 * kept)) {
        throw ConditioningError("L0 too large: infinite-inductance sector is not separated from the finite one");
    }

    const Eigen::MatrixXd T = banding_matrix(p.t);
    QuantizedSystem sys;
    sys.cap = T.transpose() * Cr.topLeftCorner(m + 1, m + 1) * T;
    sys.stiffness = T.transpose() * Mr.topLeftCorner(m + 1, m + 1) * T;
    finish(sys, p, jp);
    return sys;
}

Eigen::VectorXd coupling_vector(const QuantizedSystem& sys, std::size_t j) {
    if (j < 1 || j > sys.coupling_vectors.size()) {
        throw ValidationError("coupling_vector: resistor index " + std::to_string(j) + " out of range 1.." +
                              std::to_string(sys.coupling_vectors.size()));
    }
    return sys.coupling_vectors[j - 1];
}

double HarmonicMode::f_ghz() const { return omega / (2 * std::numbers::pi); }

std::vector<HarmonicMode> harmonic_modes(const QuantizedSystem& sys) {
    sys.junction.validate();
    const Eigen::MatrixXd K =
        sys.stiffness + sys.junction_vector * sys.junction_vector.transpose() / sys.junction.L_J;
    std::vector<HarmonicMode> modes;
    // Reducing on K keeps the soft modes accurate when a nearly constrained coordinate makes the
    // spectrum very wide (mu = 1/omega^2 is then small only for the stiff modes).
    Eigen::LLT<Eigen::MatrixXd> kchol(K);
    if (kchol.info() == Eigen::Success) {
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(sys.cap, K,
                                                                      Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
        if (ges.info() == Eigen::Success && ges.eigenvalues().minCoeff() > 0) {
            for (Eigen::Index i = ges.eigenvalues().size(); i-- > 0;) {
                const double mu = ges.eigenvalues()[i];
                modes.push_back({1 / std::sqrt(mu), ges.eigenvectors().col(i) / std::sqrt(mu)});
            }
            return modes;
        }
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(K, sys.cap,
                                                                  Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (ges.info() != Eigen::Success) throw NumericalError("harmonic_modes: capacitance matrix is not positive definite");
    for (Eigen::Index i = 0; i < ges.eigenvalues().size(); ++i) {
        const double lam = ges.eigenvalues()[i];
        if (!(lam > 0)) throw NumericalError("harmonic_modes: non-positive eigenvalue " + std::to_string(lam));
        modes.push_back({std::sqrt(lam), ges.eigenvectors().col(i)});
    }
    return modes;
}

std::size_t qubit_mode_index(const QuantizedSystem& sys, const std::vector<HarmonicMode>& modes) {
    if (modes.empty()) throw ValidationError("qubit_mode_index: no modes");
    const Eigen::VectorXd q = sys.cap * sys.junction_vector;
    std::size_t best = 0;
    double best_val = -1;
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const double v = std::abs(q.dot(modes[i].v));
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    return best;
}

double null_space_overlap(const QuantizedSystem& sys) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sys.stiffness);
    const Eigen::VectorXd n = es.eigenvectors().col(0).normalized();
    return sys.junction_vector.dot(n);
}

RelaxationRates relaxation_rates(const QuantizedSystem& sys, const std::vector<HarmonicMode>& modes,
                                 std::size_t qubit_index, double temperature) {
    if (qubit_index >= modes.size()) throw ValidationError("relaxation_rates: mode index out of range");
    const HarmonicMode& mode = modes[qubit_index];
    const double w = mode.omega;
    if (!(w > 0)) throw ValidationError("relaxation_rates: qubit mode frequency must be positive");
    double thermal = 1.0;
    if (temperature > 0) {
        const double x = sys.junction.hbar * w * 1e9 / (2 * sys.junction.k_B * temperature);
        thermal = 1.0 / std::tanh(x);
    }
    RelaxationRates out;
    out.mode_index = qubit_index;
    out.omega_qb = w;
    for (std::size_t j = 0; j < sys.baths.size(); ++j) {
        const auto& b = sys.baths[j];
        double rate = 0.0;
        if (!(b.clamped && b.kind == BathKind::MidLadder)) {
            const double me = sys.coupling_vectors[j].dot(mode.v);
            rate = 4 * me * me * spectral_density(b, w) / (2 * w) * thermal;
        }
        out.rates.push_back(rate);
        out.total += rate;
    }
    return out;
}

RelaxationRates relaxation_rates(const QuantizedSystem& sys) {
    const auto modes = harmonic_modes(sys);
    return relaxation_rates(sys, modes, qubit_mode_index(sys, modes), sys.junction.temperature);
}

}  // namespace brunesynth
