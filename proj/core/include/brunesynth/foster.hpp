#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "brunesynth/ratmodel.hpp"

namespace brunesynth {

// Parallel R-L-C block; stages are connected in series.
struct FosterStage {
    double R = 0.0;       // Ohm
    double L = 0.0;       // nH
    double C = 0.0;       // nF
    double omega0 = 0.0;  // rad/ns
    double Q = 0.0;
    double a = 0.0;  // real residue part
    double b = 0.0;  // imaginary residue part, recorded but not used
    std::array<std::size_t, 2> source_pole_indices{PoleResidueModel::npos, PoleResidueModel::npos};

    double residue_ratio() const;  // |b/a|, small-loss approximation quality
};

enum class DropReason { NegativeRealResidue, DcTerm, OutOfBand, RealPole };
const char* to_string(DropReason r);

struct DroppedTerm {
    std::array<std::size_t, 2> pole_indices{PoleResidueModel::npos, PoleResidueModel::npos};
    DropReason reason;
};

struct FosterCircuit {
    std::vector<FosterStage> stages;
    std::vector<DroppedTerm> dropped;
    std::vector<std::string> warnings;
};

// Every drop rule is a knob; defaults reproduce the paper's choices for the 3-15 GHz data band.
struct FosterOptions {
    double f_lo_ghz = 3.0;
    double f_hi_ghz = 15.0;
    bool drop_negative_residue = true;
    bool drop_out_of_band = true;
    bool drop_real_poles = true;
};

// (xi, omega) pole, a + jb residue. Throws ValidationError for a <= 0 or xi >= 0.
FosterStage stage_from_pair(double xi, double omega, double a, double b = 0.0);

FosterCircuit build_foster(const PoleResidueModel& m, const FosterOptions& opt = {});

cdouble stage_impedance(const FosterStage& st, cdouble s);

// Q_p = (w_p/2) Im[Y'(w_p)] / Re[Y(w_p)], Y' by central difference in w.
// Returns +inf when Re Y(w_p) == 0 (lossless); throws NumericalError when Re Y < 0.
double q_factor(const std::function<cdouble(double omega)>& y_of_omega, double omega_p, double rel_step = 1e-6);

}  // namespace brunesynth
