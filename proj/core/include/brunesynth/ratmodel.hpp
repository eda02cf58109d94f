#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "brunesynth/extended.hpp"
#include "brunesynth/polynomial.hpp"
#include "brunesynth/roots.hpp"

namespace brunesynth {

// Z(s) = sum_k r_k/(s - p_k) + d + e*s.
// s in rad/ns, residues in Ohm*rad/ns, d in Ohm, e in nH.
struct PoleResidueModel {
    std::vector<cdouble> poles;
    std::vector<cdouble> residues;
    double d = 0.0;
    double e = 0.0;

    // Indices of a conjugate pair (second = npos for a real pole), upper-half-plane member first.
    struct Group {
        std::size_t first;
        std::size_t second;
        bool is_real() const { return second == npos; }
    };
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    // Throws ValidationError on unpaired poles/residues, e < 0, or non-finite data.
    void validate() const;
    std::vector<Group> groups() const;
};

cdouble evaluate(const PoleResidueModel& m, cdouble s);
cdouble evaluate_derivative(const PoleResidueModel& m, cdouble s);
Complex evaluate(const PoleResidueModel& m, const Complex& s);

// N(s)/D(s) in extended precision; D is monic after to_rational.
struct RationalFunction {
    Poly<Real> num{Real(0)};
    Poly<Real> den{Real(1)};

    Complex operator()(const Complex& s) const { return num.eval(s) / den.eval(s); }
    cdouble operator()(cdouble s) const { return to_double((*this)(to_ext(s))); }

    // Re Z(j w) = A(x)/B(x), x = w^2.
    std::pair<Poly<Real>, Poly<Real>> real_part_in_x() const;
    RationalFunction normalized() const;
};

RationalFunction to_rational(const PoleResidueModel& m);
// Partial fractions via polynomial roots; conjugate symmetry is imposed on the result.
PoleResidueModel to_pole_residue(const RationalFunction& z);

enum class ViolationKind { RhpPole, JaxisResidue, NegativeRealPart, NonSimplePole };
const char* to_string(ViolationKind k);

struct PrViolation {
    ViolationKind kind;
    cdouble location;
    double magnitude;
};

struct ScanOptions {
    double f_lo_ghz = 0.01;
    double f_hi_ghz = 100.0;
    std::size_t points = 20000;
    double refine_rel = 1e-12;
    // Re Z < -pr_rel_tol*|Z| counts as a violation.
    double pr_rel_tol = 1e-5;
    // |Re p| <= axis_rel_tol*|p| places a pole on the j axis.
    double axis_rel_tol = 1e-12;
    double simple_rel_tol = 1e-12;
    // Also test every real critical point of Re Z(jw), wherever it lies.
    bool critical_points = true;
    RootOptions roots{};
};

enum class MinimumLocation { Finite, Zero, Infinity };

struct RealPartMinimum {
    Real omega{0};  // rad/ns; meaningless unless where == Finite
    Real value{0};  // Ohm
    Real z_abs{0};  // |Z(j omega)| at the minimizer (scale for relative tolerances)
    MinimumLocation where = MinimumLocation::Finite;
};

// Global minimum of Re Z(jw) over w in [0, inf]. Requires no poles on the j axis.
RealPartMinimum minimize_real_part(const RationalFunction& z, const ScanOptions& opt = {});

struct PrReport {
    bool is_pr = true;
    std::vector<PrViolation> violations;
    double min_real_part = 0.0;
    double omega_at_min = 0.0;  // rad/ns, inf when the minimum is the high-frequency limit
    std::vector<std::string> notes;
};

PrReport check_pr(const PoleResidueModel& m, const ScanOptions& opt = {});
PrReport check_pr(const RationalFunction& z, const ScanOptions& opt = {});

}  // namespace brunesynth
