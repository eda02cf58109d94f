#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "brunesynth/brune.hpp"
#include "brunesynth/dual.hpp"
#include "brunesynth/foster.hpp"
#include "brunesynth/ratmodel.hpp"

namespace brunesynth {

enum class LadderForm { TEquivalent, Coupled };

namespace detail {

template <class Num>
struct Port {
    bool open = false;
    Num z{};

    void series(const Num& zs) {
        if (!open) z = z + zs;
    }
    // 1/(1/z + y), written so that a short (z = 0) stays a short.
    void shunt(const Num& y) {
        if (open) {
            z = Num(1.0) / y;
            open = false;
        } else {
            z = z / (Num(1.0) + z * y);
        }
    }
};

template <class Num, class T>
void apply_axis_element(Port<Num>& port, const BasicAxisElement<T>& e, const Num& s) {
    const Num one(1.0);
    switch (e.kind) {
        case AxisElementKind::SeriesL: port.series(Num(e.L) * s); break;
        case AxisElementKind::SeriesC: port.series(one / (Num(e.C) * s)); break;
        case AxisElementKind::SeriesParallelLC: port.series(one / (one / (Num(e.L) * s) + Num(e.C) * s)); break;
        case AxisElementKind::SeriesParallelRC: port.series(one / (one / Num(e.R) + Num(e.C) * s)); break;
        case AxisElementKind::ShuntC: port.shunt(Num(e.C) * s); break;
        case AxisElementKind::ShuntL: port.shunt(one / (Num(e.L) * s)); break;
        case AxisElementKind::ShuntSeriesLC: port.shunt(one / (Num(e.L) * s + one / (Num(e.C) * s))); break;
        case AxisElementKind::ShuntSeriesRL: port.shunt(one / (Num(e.R) + Num(e.L) * s)); break;
    }
}

}  // namespace detail

// Input impedance of a Brune cascade, evaluated right to left.
// Num must be constructible from T and from double (complex<double>, complex<Real>, Dual<...>).
template <class Num, class T>
Num brune_ladder(const BasicBruneCircuit<T>& c, const Num& s, LadderForm form = LadderForm::TEquivalent) {
    const Num one(1.0);
    detail::Port<Num> port;
    switch (c.terminal) {
        case TerminalKind::Resistor: port.z = Num(c.r_terminal); break;
        case TerminalKind::Short: port.z = Num(0.0); break;
        case TerminalKind::Open: port.open = true; break;
    }
    for (auto it = c.stages.rbegin(); it != c.stages.rend(); ++it) {
        const auto& st = *it;
        for (auto e = st.tail.rbegin(); e != st.tail.rend(); ++e) detail::apply_axis_element(port, *e, s);
        switch (st.kind) {
            case StageKind::Regular: {
                const Num zc = one / (Num(st.C) * s);
                if (form == LadderForm::TEquivalent) {
                    port.series(Num(st.L3) * s);
                    port.shunt(one / (Num(st.L2) * s + zc));
                    port.series(Num(st.L1) * s);
                } else {
                    // Coupled pair: Z = s L11 + 1/sC - (s M + 1/sC)^2 / (Z_L + s L22 + 1/sC)
                    const Num zm = Num(st.M) * s + zc;
                    if (port.open) {
                        port.z = Num(st.L11) * s + zc;
                        port.open = false;
                    } else {
                        port.z = Num(st.L11) * s + zc - zm * zm / (port.z + Num(st.L22) * s + zc);
                    }
                }
                break;
            }
            case StageKind::Degenerate: port.shunt(Num(st.C) * s); break;
            case StageKind::InductiveDegenerate: port.shunt(one / (Num(st.L_shunt) * s)); break;
        }
        port.series(Num(st.R));
    }
    for (auto e = c.preamble.rbegin(); e != c.preamble.rend(); ++e) detail::apply_axis_element(port, *e, s);
    if (port.open) throw DomainError("ladder input is an open circuit", 0);
    return port.z;
}

// Checked double / extended entry points (throw DomainError at a network pole).
cdouble ladder_impedance(const BruneCircuit& c, cdouble s, LadderForm form = LadderForm::TEquivalent);
Complex ladder_impedance(const BruneCircuitExt& c, const Complex& s, LadderForm form = LadderForm::TEquivalent);
cdouble ladder_impedance(const FosterCircuit& c, cdouble s);

// Uniform view of anything with an impedance: the fit, a Brune circuit or a Foster circuit.
struct Impedance {
    std::string label;
    std::function<cdouble(cdouble)> z;
    std::function<cdouble(cdouble)> dz;  // dZ/ds
};

Impedance make_impedance(const PoleResidueModel& m, std::string label = "fit");
Impedance make_impedance(const BruneCircuit& c, std::string label = "brune");
Impedance make_impedance(const FosterCircuit& c, std::string label = "foster");

// Y_tot(s) = 1/(s L_J) + s C_J + 1/Z(s).
cdouble shunted_response(const Impedance& z, double L_J, cdouble s, double C_J = 0.0);
cdouble shunted_response_derivative(const Impedance& z, double L_J, cdouble s, double C_J = 0.0);

struct QubitPole {
    cdouble s_qb{};       // rad/ns
    double xi_qb = 0.0;   // Re s
    double omega_qb = 0.0;
    double f_qb = 0.0;    // GHz
    double Q_qb = 0.0;
    double T1 = 0.0;      // ns

    static QubitPole from_s(cdouble s);
};

struct PoleSearchOptions {
    double C_J = 0.0;
    double tol = 1e-12;
    int max_iterations = 100;
    double cavity_f_ghz = 6.87473;  // TE101 mode of the golden dataset
    double cavity_window_ghz = 0.05;
};

struct PoleSearchResult {
    QubitPole pole;
    int iterations = 0;
    bool used_muller = false;
    bool cavity_warning = false;
    std::vector<std::string> warnings;
};

PoleSearchResult find_qubit_pole(const Impedance& z, double L_J, double f_guess_ghz, const PoleSearchOptions& opt = {});
PoleSearchResult find_qubit_pole_from(const Impedance& z, double L_J, cdouble s0, const PoleSearchOptions& opt = {});

struct SweepOptions {
    PoleSearchOptions search{};
    double f_seed_ghz = 6.7;
    // Continuation starts here (nearest grid point) and runs outward; default: first grid point.
    std::optional<double> anchor_LJ;
    int substeps = 4;
    double branch_jump_ghz = 0.5;
};

struct SweepRow {
    double L_J = 0.0;
    QubitPole pole;
    bool branch_jump = false;
    bool cavity_warning = false;
};

std::vector<double> default_lj_grid();  // 4.0 .. 6.5 nH, 26 points
std::vector<SweepRow> sweep_LJ(const Impedance& z, const std::vector<double>& lj, const SweepOptions& opt = {});

}  // namespace brunesynth
