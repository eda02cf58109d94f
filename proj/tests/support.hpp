#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <brunesynth/brune.hpp>
#include <brunesynth/io.hpp>
#include <brunesynth/polynomial.hpp>
#include <brunesynth/quant.hpp>
#include <brunesynth/ratmodel.hpp>
#include <brunesynth/response.hpp>

namespace testing_support {

using namespace brunesynth;

inline std::filesystem::path data_dir() { return BRUNESYNTH_TEST_DATA_DIR; }
inline PoleResidueModel table1() { return io::load_model(data_dir() / "table1.json"); }
inline BruneCircuit table2() { return io::load_circuit(data_dir() / "table2.json"); }

inline double two_pi() { return 2 * 3.14159265358979323846; }
inline cdouble jw_ghz(double f) { return {0.0, two_pi() * f}; }

inline double rel_err(cdouble a, cdouble b) { return std::abs(a - b) / std::abs(b); }

// Z = n/d built by plain element composition; no cancellation is attempted.
struct Rat {
    Poly<Real> n{Real(0)};
    Poly<Real> d{Real(1)};

    static Rat constant(double r) { return {Poly<Real>{Real(r)}, Poly<Real>{Real(1)}}; }
    Rat series(const Rat& z) const { return {n * z.d + z.n * d, d * z.d}; }
    // Parallel connection with admittance y = p/q: Z' = n q / (d q + p n).
    Rat shunt(const Rat& y) const { return {n * y.d, d * y.d + y.n * n}; }
    RationalFunction rf() const {
        RationalFunction r;
        r.num = n.normalized();
        r.den = d.normalized();
        return r.normalized();
    }
};

inline Rat inductor(double L) { return {Poly<Real>{Real(0), Real(L)}, Poly<Real>{Real(1)}}; }
inline Rat capacitor(double C) { return {Poly<Real>{Real(1)}, Poly<Real>{Real(0), Real(C)}}; }
inline Rat conductance_of_capacitor(double C) { return {Poly<Real>{Real(0), Real(C)}, Poly<Real>{Real(1)}}; }

// Random passive RLC ladder: alternating series (R + sL) and shunt (G + sC) sections on a resistive load.
// Generic element values give a minimal-degree PR impedance of degree 2*sections.
template <class Rng>
RationalFunction random_passive_ladder(Rng& rng, int sections) {
    std::uniform_real_distribution<double> lg(-0.5, 0.5);
    auto val = [&](double scale) { return scale * std::pow(10.0, lg(rng)); };
    Rat z = Rat::constant(val(50.0));
    for (int i = 0; i < sections; ++i) {
        const double G = 1.0 / val(500.0), C = val(0.5);
        z = z.shunt({Poly<Real>{Real(G), Real(C)}, Poly<Real>{Real(1)}});
        const double R = val(1.0), L = val(2.0);
        z = z.series({Poly<Real>{Real(R), Real(L)}, Poly<Real>{Real(1)}});
    }
    return z.rf();
}

// Adds k/(s - a) (a > 0) or a conjugate pair with residues r, r* at p, p* (Re p > 0).
inline RationalFunction inject_real_rhp_pole(const RationalFunction& z, double a, double k) {
    const Poly<Real> q{Real(-a), Real(1)};
    RationalFunction r;
    r.num = z.num * q + z.den * Poly<Real>{Real(k)};
    r.den = z.den * q;
    return r.normalized();
}

inline RationalFunction inject_complex_rhp_pair(const RationalFunction& z, cdouble p, cdouble res) {
    // r/(s-p) + r*/(s-p*) = (2 Re r s - 2 Re(r p*)) / (s^2 - 2 Re p s + |p|^2)
    const Poly<Real> q{Real(std::norm(p)), Real(-2 * p.real()), Real(1)};
    const Poly<Real> a{Real(-2 * (res * std::conj(p)).real()), Real(2 * res.real())};
    RationalFunction r;
    r.num = z.num * q + z.den * a;
    r.den = z.den * q;
    return r.normalized();
}

// Random valid Brune cascade with coupled-form stages; degenerate_at places one capacitive
// degenerate stage (0-based). Turns ratios are kept away from 1.
template <class Rng>
BruneCircuit random_brune_circuit(Rng& rng, std::size_t M, int degenerate_at = -1) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    BruneCircuit c;
    for (std::size_t k = 0; k < M; ++k) {
        const double R = 0.1 + 10 * u(rng);
        const double C = 0.05 + u(rng);
        if (static_cast<int>(k) == degenerate_at) {
            c.stages.push_back(make_degenerate_stage(R, C));
            continue;
        }
        const double L22 = 1 + 9 * u(rng);
        double t = 0.1 + 1.8 * u(rng);
        if (std::abs(t - 1) < 0.15) t += 0.3;
        c.stages.push_back(make_regular_stage(R, C, t * t * L22, L22));
    }
    c.r_terminal = 10 + 100 * u(rng);
    return c;
}

// Total T = 0 relaxation rate of the qubit mode over |Re s| of the classical pole, both with the same C_J.
inline double quantum_classical_ratio(const BruneCircuit& c, double L_J, double C_J = 0.0) {
    JunctionParams jp;
    jp.L_J = L_J;
    jp.C_J = C_J;
    const auto sys = build_system(c, jp);
    const auto modes = harmonic_modes(sys);
    const auto q = qubit_mode_index(sys, modes);
    const auto rates = relaxation_rates(sys, modes, q, 0.0);
    PoleSearchOptions po;
    po.C_J = C_J;
    const auto pole = find_qubit_pole(make_impedance(c), L_J, modes[q].f_ghz(), po);
    return rates.total / std::abs(pole.pole.xi_qb);
}

inline BruneCircuit scale_losses(BruneCircuit c, double stage_scale, double terminal_scale) {
    for (auto& s : c.stages) s.R *= stage_scale;
    c.r_terminal *= terminal_scale;
    return c;
}

}  // namespace testing_support
