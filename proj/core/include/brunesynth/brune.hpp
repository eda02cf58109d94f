#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "brunesynth/extended.hpp"
#include "brunesynth/ratmodel.hpp"

namespace brunesynth {

enum class StageKind { Regular, Degenerate, InductiveDegenerate };
const char* to_string(StageKind k);

// Lossless element pulled off the j axis (or, when forced, a near-axis RC/RL block).
enum class AxisElementKind {
    SeriesL,
    SeriesC,
    SeriesParallelLC,
    SeriesParallelRC,
    ShuntC,
    ShuntL,
    ShuntSeriesLC,
    ShuntSeriesRL
};
const char* to_string(AxisElementKind k);
bool is_series(AxisElementKind k);

template <class T>
struct BasicAxisElement {
    AxisElementKind kind = AxisElementKind::SeriesL;
    T R{0};
    T L{0};
    T C{0};
    bool approximate = false;  // forced near-axis extraction, element is a projection

    template <class U>
    BasicAxisElement<U> cast() const {
        return {kind, U(R), U(L), U(C), approximate};
    }
};

template <class T>
struct BasicBruneStage {
    StageKind kind = StageKind::Regular;
    T R{0};
    T C{0};
    T L11{0};
    T L22{0};
    T M{0};
    T t{0};
    // T-equivalent before conversion; L1 or L3 may be negative.
    T L1{0};
    T L2{0};
    T L3{0};
    T L_shunt{0};  // inductive-degenerate only
    T omega1{0};   // rad/ns; 0 for the degenerate kinds
    // Axis elements extracted from the remainder right after this stage.
    std::vector<BasicAxisElement<T>> tail;

    bool degenerate() const { return kind != StageKind::Regular; }

    template <class U>
    BasicBruneStage<U> cast() const {
        BasicBruneStage<U> s;
        s.kind = kind;
        s.R = U(R);
        s.C = U(C);
        s.L11 = U(L11);
        s.L22 = U(L22);
        s.M = U(M);
        s.t = U(t);
        s.L1 = U(L1);
        s.L2 = U(L2);
        s.L3 = U(L3);
        s.L_shunt = U(L_shunt);
        s.omega1 = U(omega1);
        for (const auto& e : tail) s.tail.push_back(e.template cast<U>());
        return s;
    }
};

enum class TerminalKind { Resistor, Short, Open };
const char* to_string(TerminalKind k);

template <class T>
struct BasicBruneCircuit {
    std::vector<BasicAxisElement<T>> preamble;
    std::vector<BasicBruneStage<T>> stages;
    T r_terminal{0};
    TerminalKind terminal = TerminalKind::Resistor;

    template <class U>
    BasicBruneCircuit<U> cast() const {
        BasicBruneCircuit<U> c;
        for (const auto& e : preamble) c.preamble.push_back(e.template cast<U>());
        for (const auto& s : stages) c.stages.push_back(s.template cast<U>());
        c.r_terminal = U(r_terminal);
        c.terminal = terminal;
        return c;
    }
};

using AxisElement = BasicAxisElement<double>;
using BruneStage = BasicBruneStage<double>;
using BruneCircuit = BasicBruneCircuit<double>;
using BruneStageExt = BasicBruneStage<Real>;
using BruneCircuitExt = BasicBruneCircuit<Real>;

inline BruneCircuitExt to_ext(const BruneCircuit& c) { return c.template cast<Real>(); }
inline BruneCircuit to_double(const BruneCircuitExt& c) {
    BruneCircuit out;
    for (const auto& e : c.preamble)
        out.preamble.push_back({e.kind, to_double(e.R), to_double(e.L), to_double(e.C), e.approximate});
    for (const auto& s : c.stages) {
        BruneStage d;
        d.kind = s.kind;
        d.R = to_double(s.R);
        d.C = to_double(s.C);
        d.L11 = to_double(s.L11);
        d.L22 = to_double(s.L22);
        d.M = to_double(s.M);
        d.t = to_double(s.t);
        d.L1 = to_double(s.L1);
        d.L2 = to_double(s.L2);
        d.L3 = to_double(s.L3);
        d.L_shunt = to_double(s.L_shunt);
        d.omega1 = to_double(s.omega1);
        for (const auto& e : s.tail)
            d.tail.push_back({e.kind, to_double(e.R), to_double(e.L), to_double(e.C), e.approximate});
        out.stages.push_back(std::move(d));
    }
    out.r_terminal = to_double(c.r_terminal);
    out.terminal = c.terminal;
    return out;
}

struct CoupledInductors {
    double L11;
    double L22;
    double M;
};
// (L1, L2, L3) T-network -> tightly coupled pair; exact when L3 = -L1*L2/(L1+L2).
CoupledInductors t_to_coupled(double L1, double L2, double L3);

// Build a stage from coupled-form values (as printed in tables): derives M, t and the T-triple.
BruneStage make_regular_stage(double R, double C, double L11, double L22);
BruneStage make_degenerate_stage(double R, double C);

// Checks BruneStage invariants (tight coupling, signs); throws ValidationError.
void validate_circuit(const BruneCircuit& c);

struct BruneOptions {
    ScanOptions scan{};
    // Near-axis classification for the preamble. 0 selects numerically exact (2^-(bits/2)).
    double axis_tol = 0.0;
    // Real roots with |r| <= axis_tol*zero_scale count as DC poles when axis_tol > 0 (rad/ns).
    double zero_scale = 0.0;
    // Residual of the exact divisions, relative to the polynomial magnitude at the divisor root.
    double cancellation_tol = 1e-10;
    std::size_t max_stages = 64;
};

struct ExtractionRecord {
    std::size_t index = 0;
    StageKind kind = StageKind::Regular;
    Real omega1{0};
    Real R1{0};
    Real L1{0};
    Real L2{0};
    Real C2{0};
    Real L3{0};
    Real min_over_abs{0};  // R1/|Z(j w1)|
    std::size_t num_degree = 0;
    std::size_t den_degree = 0;
    std::string describe() const;
};

struct SynthesisState {
    RationalFunction z;
    std::vector<ExtractionRecord> log;
    std::size_t index = 0;
};

struct AxisRemoval {
    std::vector<BasicAxisElement<Real>> elements;
    RationalFunction reduced;
    // Set when the remainder collapsed to a short (Z = 0) or an open (Y = 0).
    bool terminated = false;
    TerminalKind terminal = TerminalKind::Resistor;
};

AxisRemoval remove_jaxis_poles(const RationalFunction& z, const BruneOptions& opt = {});

// Global minimum of Re Z(jw) including w = 0 and w = inf.
// Throws NotPositiveRealError when R1 < -pr_rel_tol*|Z(j w1)|.
RealPartMinimum find_min_real_part(const RationalFunction& z, const BruneOptions& opt = {});

std::pair<BruneStageExt, SynthesisState> extract_stage(const SynthesisState& st, const BruneOptions& opt = {});
std::pair<BruneStageExt, SynthesisState> extract_stage(const SynthesisState& st, const RealPartMinimum& mn,
                                                       const BruneOptions& opt = {});
std::pair<BruneStageExt, SynthesisState> extract_degenerate_stage(const SynthesisState& st,
                                                                  const BruneOptions& opt = {});
std::pair<BruneStageExt, SynthesisState> extract_inductive_degenerate_stage(const SynthesisState& st,
                                                                            const BruneOptions& opt = {});

struct SynthesisResult {
    BruneCircuitExt exact;
    BruneCircuit circuit;
    std::vector<ExtractionRecord> log;
    std::vector<std::string> warnings;
};

SynthesisResult synthesize(const RationalFunction& z, const BruneOptions& opt = {});
// Requires check_pr to pass (within its tolerance).
SynthesisResult synthesize(const PoleResidueModel& m, const BruneOptions& opt = {});

}  // namespace brunesynth
