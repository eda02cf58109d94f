#include "brunesynth/foster.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "brunesynth/errors.hpp"

namespace brunesynth {

const char* to_string(DropReason r) {
    switch (r) {
        case DropReason::NegativeRealResidue: return "NEGATIVE_REAL_RESIDUE";
        case DropReason::DcTerm: return "DC_TERM";
        case DropReason::OutOfBand: return "OUT_OF_BAND";
        case DropReason::RealPole: return "REAL_POLE";
    }
    return "UNKNOWN";
}

double FosterStage::residue_ratio() const {
    return a != 0.0 ? std::abs(b / a) : std::numeric_limits<double>::infinity();
}

FosterStage stage_from_pair(double xi, double omega, double a, double b) {
    if (!(omega > 0)) throw ValidationError("stage_from_pair: omega must be positive");
    if (!(xi < 0)) throw ValidationError("stage_from_pair: unstable or lossless pole (xi >= 0)");
    if (!(a > 0)) throw ValidationError("stage_from_pair: NEGATIVE_REAL_RESIDUE (a <= 0)");
    FosterStage st;
    st.R = -a / xi;
    st.omega0 = omega;
    st.Q = -omega / (2.0 * xi);
    st.C = st.Q / (st.omega0 * st.R);
    st.L = 1.0 / (st.omega0 * st.omega0 * st.C);
    st.a = a;
    st.b = b;
    return st;
}

FosterCircuit build_foster(const PoleResidueModel& m, const FosterOptions& opt) {
    m.validate();
    if (!(opt.f_lo_ghz >= 0) || !(opt.f_hi_ghz > opt.f_lo_ghz)) {
        throw ValidationError("build_foster: band must satisfy 0 <= f_lo < f_hi");
    }
    const double two_pi = 2.0 * std::numbers::pi;
    const double wlo = two_pi * opt.f_lo_ghz;
    const double whi = two_pi * opt.f_hi_ghz;
    FosterCircuit out;
    for (const auto& g : m.groups()) {
        const cdouble p = m.poles[g.first];
        const cdouble r = m.residues[g.first];
        const std::array<std::size_t, 2> idx{g.first, g.second};
        if (g.is_real()) {
            if (opt.drop_real_poles) {
                out.dropped.push_back({idx, std::abs(p) < wlo ? DropReason::DcTerm : DropReason::RealPole});
                continue;
            }
            out.warnings.push_back("real pole " + std::to_string(g.first) + " has no resonant stage; dropped");
            out.dropped.push_back({idx, DropReason::RealPole});
            continue;
        }
        const double omega = p.imag();
        const bool in_band = omega >= wlo && omega <= whi;
        if (r.real() <= 0) {
            // No physical shunt RLC can carry a negative real residue; dropping is the only option.
            out.dropped.push_back({idx, DropReason::NegativeRealResidue});
            if (!opt.drop_negative_residue) {
                out.warnings.push_back("pair " + std::to_string(g.first) + "," + std::to_string(g.second) +
                                       " has a negative real residue and cannot be realized");
            }
            continue;
        }
        if (!in_band && opt.drop_out_of_band) {
            out.dropped.push_back({idx, DropReason::OutOfBand});
            continue;
        }
        if (!(p.real() < 0)) throw NumericalError("build_foster: pole pair is not strictly stable");
        FosterStage st = stage_from_pair(p.real(), omega, r.real(), r.imag());
        st.source_pole_indices = idx;
        out.stages.push_back(st);
    }
    if (out.stages.empty()) out.warnings.push_back("no pole pair retained: empty Foster circuit");
    return out;
}

cdouble stage_impedance(const FosterStage& st, cdouble s) {
    cdouble y = 1.0 / st.R + 1.0 / (s * st.L) + s * st.C;
    return 1.0 / y;
}

double q_factor(const std::function<cdouble(double)>& y_of_omega, double omega_p, double rel_step) {
    if (!(omega_p > 0)) throw ValidationError("q_factor: omega_p must be positive");
    const cdouble y = y_of_omega(omega_p);
    if (y.real() == 0.0) return std::numeric_limits<double>::infinity();
    if (y.real() < 0) throw NumericalError("q_factor: Re Y <= 0 at the mode frequency (invalid mode)");
    const double h = rel_step * omega_p;
    const cdouble dy = (y_of_omega(omega_p + h) - y_of_omega(omega_p - h)) / (2.0 * h);
    return 0.5 * omega_p * dy.imag() / y.real();
}

}  // namespace brunesynth
