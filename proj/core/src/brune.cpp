#include "brunesynth/brune.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "brunesynth/errors.hpp"
#include "brunesynth/roots.hpp"

namespace brunesynth {

namespace mp = boost::multiprecision;

const char* to_string(StageKind k) {
    switch (k) {
        case StageKind::Regular: return "regular";
        case StageKind::Degenerate: return "degenerate";
        case StageKind::InductiveDegenerate: return "inductive-degenerate";
    }
    return "unknown";
}

const char* to_string(AxisElementKind k) {
    switch (k) {
        case AxisElementKind::SeriesL: return "series_L";
        case AxisElementKind::SeriesC: return "series_C";
        case AxisElementKind::SeriesParallelLC: return "series_parallel_LC";
        case AxisElementKind::SeriesParallelRC: return "series_parallel_RC";
        case AxisElementKind::ShuntC: return "shunt_C";
        case AxisElementKind::ShuntL: return "shunt_L";
        case AxisElementKind::ShuntSeriesLC: return "shunt_series_LC";
        case AxisElementKind::ShuntSeriesRL: return "shunt_series_RL";
    }
    return "unknown";
}

bool is_series(AxisElementKind k) {
    return k == AxisElementKind::SeriesL || k == AxisElementKind::SeriesC || k == AxisElementKind::SeriesParallelLC ||
           k == AxisElementKind::SeriesParallelRC;
}

const char* to_string(TerminalKind k) {
    switch (k) {
        case TerminalKind::Resistor: return "resistor";
        case TerminalKind::Short: return "short";
        case TerminalKind::Open: return "open";
    }
    return "unknown";
}

CoupledInductors t_to_coupled(double L1, double L2, double L3) {
    return {L1 + L2, L3 + L2, L2};
}

BruneStage make_regular_stage(double R, double C, double L11, double L22) {
    if (!(L11 > 0) || !(L22 > 0) || !(C > 0)) {
        throw ValidationError("regular stage needs L11, L22, C > 0");
    }
    BruneStage s;
    s.kind = StageKind::Regular;
    s.R = R;
    s.C = C;
    s.L11 = L11;
    s.L22 = L22;
    s.M = std::sqrt(L11 * L22);
    s.t = std::sqrt(L11 / L22);
    s.L2 = s.M;
    s.L1 = L11 - s.M;
    s.L3 = L22 - s.M;
    return s;
}

BruneStage make_degenerate_stage(double R, double C) {
    if (!(C > 0)) throw ValidationError("degenerate stage needs C > 0");
    BruneStage s;
    s.kind = StageKind::Degenerate;
    s.R = R;
    s.C = C;
    return s;
}

void validate_circuit(const BruneCircuit& c) {
    for (std::size_t j = 0; j < c.stages.size(); ++j) {
        const auto& s = c.stages[j];
        const std::string where = "stage " + std::to_string(j + 1) + ": ";
        if (!std::isfinite(s.R)) throw ValidationError(where + "R must be finite");
        switch (s.kind) {
            case StageKind::Regular: {
                if (!(s.C > 0) || !(s.L11 > 0) || !(s.L22 > 0) || !(s.M > 0)) {
                    throw ValidationError(where + "C, L11, L22, M must be positive");
                }
                double tight = std::sqrt(s.L11 * s.L22);
                if (std::abs(s.M - tight) > 1e-9 * tight) {
                    throw ValidationError(where + "M must equal sqrt(L11*L22) (tight coupling)");
                }
                break;
            }
            case StageKind::Degenerate:
                if (!(s.C > 0)) throw ValidationError(where + "degenerate stage needs C > 0");
                if (s.L11 != 0 || s.L22 != 0 || s.M != 0) {
                    throw ValidationError(where + "degenerate stage carries no inductors");
                }
                break;
            case StageKind::InductiveDegenerate:
                if (!(s.L_shunt > 0)) throw ValidationError(where + "inductive-degenerate stage needs L > 0");
                break;
        }
    }
    if (c.terminal == TerminalKind::Resistor && !(c.r_terminal >= 0)) {
        throw ValidationError("terminal resistance must be >= 0");
    }
}

std::string ExtractionRecord::describe() const {
    std::ostringstream os;
    os.precision(9);
    os << "stage " << index + 1 << " " << to_string(kind);
    if (kind == StageKind::Regular) {
        os << ": f1=" << to_double(omega1) / (2 * std::numbers::pi) << " GHz R1=" << to_double(R1)
           << " L1=" << to_double(L1) << " L2=" << to_double(L2) << " C2=" << to_double(C2) << " L3=" << to_double(L3);
    } else if (kind == StageKind::Degenerate) {
        os << ": R=" << to_double(R1) << " C=" << to_double(C2);
    } else {
        os << ": R=" << to_double(R1) << " L=" << to_double(L2);
    }
    os << " Rmin/|Z|=" << to_double(min_over_abs) << " remaining degrees (" << num_degree << "," << den_degree << ")";
    return os.str();
}

namespace {

Real exact_tol() { return mp::sqrt(working_epsilon()); }

std::vector<std::string> describe_log(const std::vector<ExtractionRecord>& log) {
    std::vector<std::string> out;
    for (const auto& r : log) out.push_back(r.describe());
    return out;
}

// Geometric mean of root magnitudes: a natural radius for comparing polynomial sizes.
Real root_scale(const Poly<Real>& pin) {
    Poly<Real> p = pin.normalized();
    std::size_t lo = 0;
    while (lo < p.degree() && p[lo] == 0) ++lo;
    if (p.degree() == lo) return Real(1);
    return mp::pow(mp::abs(p[lo] / p.lead()), Real(1) / Real(static_cast<long>(p.degree() - lo)));
}

bool negligible(const Poly<Real>& p, const Poly<Real>& ref, const Real& tol) {
    if (p.is_zero()) return true;
    Real rho = root_scale(ref);
    return magnitude_on_circle(p, rho) <= tol * magnitude_on_circle(ref, rho);
}

void check_remainder(const Poly<Real>& rem, const Poly<Real>& dividend, const Real& radius, double tol,
                     const std::string& what, const std::vector<ExtractionRecord>& log) {
    Real r = radius > 0 ? radius : root_scale(dividend);
    Real num = magnitude_on_circle(rem, r);
    Real den = magnitude_on_circle(dividend, r);
    if (num > Real(tol) * den) {
        throw ConditioningError(what + ": division residual " + to_string(num / den, 6) +
                                    " exceeds the cancellation tolerance",
                                describe_log(log));
    }
}

// One side of the axis sweep: f = P/Q is Z (series elements) or Y (shunt elements).
bool sweep_side(Poly<Real>& P, Poly<Real>& Q, bool series, const BruneOptions& opt,
                std::vector<BasicAxisElement<Real>>& out) {
    bool changed = false;
    const bool forced = opt.axis_tol > 0;
    const Real tol = forced ? Real(opt.axis_tol) : exact_tol();
    const std::vector<ExtractionRecord> nolog;
    P = P.normalized();
    Q = Q.normalized();
    if (P.is_zero() || Q.is_zero()) return false;

    // Pole at infinity.
    if (P.degree() > Q.degree()) {
        if (P.degree() != Q.degree() + 1) {
            throw NotPositiveRealError("multiple pole at infinity: not positive real");
        }
        Real k = P.lead() / Q.lead();
        if (k <= 0) throw NotPositiveRealError("pole at infinity with non-positive residue");
        Poly<Real> diff = P - k * Q.shift();
        P = negligible(diff.drop_top(), P, exact_tol()) ? Poly<Real>{Real(0)} : diff.drop_top().normalized();
        BasicAxisElement<Real> e;
        e.kind = series ? AxisElementKind::SeriesL : AxisElementKind::ShuntC;
        (series ? e.L : e.C) = k;
        out.push_back(e);
        changed = true;
        if (P.is_zero()) return changed;
    }
    if (Q.degree() == 0) return changed;

    const std::vector<Complex> roots = polynomial_roots(Q, opt.scan.roots);
    Real maxr = 1;
    for (const auto& r : roots) {
        Real a = std::abs(r);
        if (a > maxr) maxr = a;
    }
    const Real zero_cut = forced ? tol * Real(opt.zero_scale > 0 ? opt.zero_scale : 1.0) : tol * maxr;

    for (const Complex& r : roots) {
        if (P.is_zero() || Q.degree() == 0) break;
        const Real mag = std::abs(r);
        const bool at_zero = mag <= zero_cut;
        const bool on_axis = !at_zero && r.imag() > 0 && mp::abs(r.real()) <= tol * r.imag();
        if (!at_zero && !on_axis) continue;

        BasicAxisElement<Real> e;
        if (at_zero) {
            const Real x0 = r.real();
            if (x0 > 0 && x0 > exact_tol() * maxr) {
                throw NotPositiveRealError("real pole in the right half-plane near s = 0");
            }
            const Poly<Real> factor{-x0, Real(1)};
            auto [Q1, rq] = divmod(Q, factor);
            check_remainder(rq, Q, mp::abs(x0), opt.cancellation_tol, "axis pole at s=0", nolog);
            const Real k = P.eval(x0) / Q1.eval(x0);
            if (k <= 0) throw NotPositiveRealError("pole at s = 0 with non-positive residue");
            Poly<Real> diff = P - k * Q1;
            if (negligible(diff, P, exact_tol())) {
                P = Poly<Real>{Real(0)};
            } else {
                auto [P1, rp] = divmod(diff, factor);
                check_remainder(rp, diff, mp::abs(x0), opt.cancellation_tol, "axis pole at s=0", nolog);
                P = P1.normalized();
            }
            Q = Q1.normalized();
            const bool lossy = forced && x0 < 0 && mp::abs(x0) > exact_tol() * maxr;
            if (series) {
                e.kind = lossy ? AxisElementKind::SeriesParallelRC : AxisElementKind::SeriesC;
                e.C = 1 / k;
                if (lossy) e.R = k / (-x0);
            } else {
                e.kind = lossy ? AxisElementKind::ShuntSeriesRL : AxisElementKind::ShuntL;
                e.L = 1 / k;
                if (lossy) e.R = -x0 / k;
            }
        } else {
            const Poly<Real> factor{std::norm(r), Real(-2) * r.real(), Real(1)};
            auto [Q1, rq] = divmod(Q, factor);
            check_remainder(rq, Q, mag, opt.cancellation_tol, "axis pole pair", nolog);
            const Complex rho = P.eval(r) / (Q1.eval(r) * (r - std::conj(r)));
            const Real alpha = 2 * rho.real();
            const Real beta = -2 * (rho * std::conj(r)).real();
            if (alpha <= 0) throw NotPositiveRealError("j-axis pole with non-positive residue");
            const bool residue_real = mp::abs(rho.imag()) <= Real(1e-8) * std::abs(rho);
            if (!forced && !residue_real) throw NotPositiveRealError("j-axis pole with a complex residue");
            Poly<Real> diff = P - Poly<Real>{beta, alpha} * Q1;
            if (negligible(diff, P, exact_tol())) {
                P = Poly<Real>{Real(0)};
            } else {
                auto [P1, rp] = divmod(diff, factor);
                check_remainder(rp, diff, mag, opt.cancellation_tol, "axis pole pair", nolog);
                P = P1.normalized();
            }
            Q = Q1.normalized();
            const Real w2 = std::norm(r);
            if (series) {
                e.kind = AxisElementKind::SeriesParallelLC;
                e.C = 1 / alpha;
                e.L = alpha / w2;
            } else {
                e.kind = AxisElementKind::ShuntSeriesLC;
                e.L = 1 / alpha;
                e.C = alpha / w2;
            }
            e.approximate = mp::abs(r.real()) > exact_tol() * mag || !residue_real;
        }
        out.push_back(e);
        changed = true;
    }
    return changed;
}

SynthesisState next_state(const SynthesisState& st, Poly<Real> num, Poly<Real> den, ExtractionRecord rec) {
    SynthesisState out;
    out.z = RationalFunction{num.normalized(), den.normalized()};
    out.log = st.log;
    rec.num_degree = out.z.num.degree();
    rec.den_degree = out.z.den.degree();
    out.log.push_back(rec);
    out.index = st.index + 1;
    return out;
}

std::size_t common_degree(const RationalFunction& z, const std::vector<ExtractionRecord>& log) {
    if (z.num.degree() != z.den.degree()) {
        throw ConditioningError("stage extraction needs equal numerator and denominator degrees (got " +
                                    std::to_string(z.num.degree()) + "/" + std::to_string(z.den.degree()) + ")",
                                log.empty() ? std::vector<std::string>{} : describe_log(log));
    }
    return z.num.degree();
}

}  // namespace

AxisRemoval remove_jaxis_poles(const RationalFunction& z, const BruneOptions& opt) {
    AxisRemoval out;
    Poly<Real> N = z.num.normalized();
    Poly<Real> D = z.den.normalized();
    for (int pass = 0; pass < 10000; ++pass) {
        if (N.is_zero()) {
            out.terminated = true;
            out.terminal = TerminalKind::Short;
            break;
        }
        if (D.is_zero()) {
            out.terminated = true;
            out.terminal = TerminalKind::Open;
            break;
        }
        bool changed = sweep_side(N, D, true, opt, out.elements);
        if (N.is_zero()) continue;
        changed = sweep_side(D, N, false, opt, out.elements) || changed;
        if (!changed) break;
    }
    out.reduced = RationalFunction{N, D};
    return out;
}

RealPartMinimum find_min_real_part(const RationalFunction& z, const BruneOptions& opt) {
    RealPartMinimum mn = minimize_real_part(z, opt.scan);
    const bool violates = mn.z_abs > 0 ? mn.value < -Real(opt.scan.pr_rel_tol) * mn.z_abs : mn.value < 0;
    if (violates) {
        std::ostringstream os;
        os.precision(8);
        os << "not positive real: min Re Z = " << to_double(mn.value) << " Ohm";
        if (mn.where == MinimumLocation::Finite) os << " at " << to_double(mn.omega) / (2 * std::numbers::pi) << " GHz";
        throw NotPositiveRealError(os.str());
    }
    return mn;
}

std::pair<BruneStageExt, SynthesisState> extract_stage(const SynthesisState& st, const BruneOptions& opt) {
    RealPartMinimum mn = find_min_real_part(st.z, opt);
    switch (mn.where) {
        case MinimumLocation::Finite: return extract_stage(st, mn, opt);
        case MinimumLocation::Infinity: return extract_degenerate_stage(st, opt);
        case MinimumLocation::Zero: return extract_inductive_degenerate_stage(st, opt);
    }
    throw NumericalError("unreachable");
}

std::pair<BruneStageExt, SynthesisState> extract_stage(const SynthesisState& st, const RealPartMinimum& mn,
                                                       const BruneOptions& opt) {
    if (mn.where != MinimumLocation::Finite || mn.omega <= 0) {
        throw ValidationError("extract_stage needs a finite, nonzero minimizing frequency");
    }
    const RationalFunction z = st.z.normalized();
    const std::size_t n = common_degree(z, st.log);
    if (n < 2) throw ConditioningError("regular stage needs degree >= 2", describe_log(st.log));
    const Poly<Real>& N = z.num;
    const Poly<Real>& D = z.den;
    const Real w1 = mn.omega;
    const Real R1 = mn.value;
    const Complex jw(Real(0), w1);
    const Poly<Real> quad{w1 * w1, Real(0), Real(1)};

    const Poly<Real> N1 = N - R1 * D;
    const Real L1 = (N1.eval(jw) / D.eval(jw)).imag() / w1;

    // Z1 - L1 s vanishes at +-j w1.
    const Poly<Real> P = N1 - L1 * D.shift();
    auto [Q, rq] = divmod(P, quad);
    check_remainder(rq, P, w1, opt.cancellation_tol, "stage " + std::to_string(st.index + 1) + " (s^2+w1^2) in Z1-L1 s",
                    st.log);

    // 1/(Z1 - L1 s) = D/((s^2+w1^2) Q) has a pole at j w1 -> shunt L2-C2 branch.
    const Real k = (D.eval(jw) / (jw * Q.eval(jw))).real();
    if (k <= 0) {
        throw ConditioningError("stage " + std::to_string(st.index + 1) + ": shunt branch residue is not positive",
                                describe_log(st.log));
    }
    const Real L2 = 1 / k;
    const Real C2 = 1 / (L2 * w1 * w1);
    const Poly<Real> Dk = D - k * Q.shift();
    auto [S, rs] = divmod(Dk, quad);
    check_remainder(rs, Dk, w1, opt.cancellation_tol, "stage " + std::to_string(st.index + 1) + " admittance remainder",
                    st.log);

    // Remaining Q/S has a pole at infinity: series L3.
    if (Q.degree() != S.degree() + 1) {
        throw ConditioningError("stage " + std::to_string(st.index + 1) + ": unexpected degree after division",
                                describe_log(st.log));
    }
    const Real L3 = Q.lead() / S.lead();
    const Poly<Real> Z2 = (Q - L3 * S.shift()).drop_top();

    const Real tight = -L1 * L2 / (L1 + L2);
    if (mp::abs(L3 - tight) > Real(1e-8) * mp::abs(L3)) {
        throw ConditioningError("stage " + std::to_string(st.index + 1) + ": L3 violates the Brune identity (" +
                                    to_string(L3, 10) + " vs " + to_string(tight, 10) + ")",
                                describe_log(st.log));
    }

    BruneStageExt s;
    s.kind = StageKind::Regular;
    s.R = R1;
    s.C = C2;
    s.L1 = L1;
    s.L2 = L2;
    s.L3 = L3;
    s.L11 = L1 + L2;
    s.L22 = L3 + L2;
    s.M = L2;
    s.t = mp::sqrt(s.L11 / s.L22);
    s.omega1 = w1;

    ExtractionRecord rec;
    rec.index = st.index;
    rec.kind = StageKind::Regular;
    rec.omega1 = w1;
    rec.R1 = R1;
    rec.L1 = L1;
    rec.L2 = L2;
    rec.C2 = C2;
    rec.L3 = L3;
    rec.min_over_abs = mn.z_abs > 0 ? R1 / mn.z_abs : Real(0);
    SynthesisState next = next_state(st, Z2, S, rec);
    if (next.z.num.degree() + 2 != n && !next.z.num.is_zero()) {
        throw ConditioningError("stage " + std::to_string(st.index + 1) + ": degree did not drop by 2",
                                describe_log(next.log));
    }
    return {s, next};
}

std::pair<BruneStageExt, SynthesisState> extract_degenerate_stage(const SynthesisState& st, const BruneOptions& opt) {
    (void)opt;
    const RationalFunction z = st.z.normalized();
    const std::size_t n = common_degree(z, st.log);
    if (n < 1) throw ConditioningError("degenerate stage needs degree >= 1", describe_log(st.log));
    const Poly<Real>& N = z.num;
    const Poly<Real>& D = z.den;
    const Real R = N.lead() / D.lead();
    const Poly<Real> N1 = (N - R * D).drop_top();
    // lim s->inf 1/(s (Z - R)) = lead(D) / lead(N1)
    if (N1.degree() + 1 != n || N1.lead() == 0) {
        throw ConditioningError("degenerate stage: Z - R has no simple zero at infinity", describe_log(st.log));
    }
    const Real C = D.lead() / N1.lead();
    if (C <= 0) {
        throw NotPositiveRealError("degenerate stage: capacitance limit is not positive");
    }
    Poly<Real> Dn = (D - C * N1.shift()).drop_top();
    if (negligible(Dn, D, exact_tol())) Dn = Poly<Real>{Real(0)};

    BruneStageExt s;
    s.kind = StageKind::Degenerate;
    s.R = R;
    s.C = C;

    ExtractionRecord rec;
    rec.index = st.index;
    rec.kind = StageKind::Degenerate;
    rec.R1 = R;
    rec.C2 = C;
    const Real zinf = mp::abs(R);
    rec.min_over_abs = zinf > 0 ? R / zinf : Real(0);
    return {s, next_state(st, N1, Dn, rec)};
}

std::pair<BruneStageExt, SynthesisState> extract_inductive_degenerate_stage(const SynthesisState& st,
                                                                            const BruneOptions& opt) {
    (void)opt;
    const RationalFunction z = st.z.normalized();
    const std::size_t n = common_degree(z, st.log);
    if (n < 1) throw ConditioningError("inductive-degenerate stage needs degree >= 1", describe_log(st.log));
    const Poly<Real>& N = z.num;
    const Poly<Real>& D = z.den;
    if (D[0] == 0) throw ConditioningError("inductive-degenerate stage: pole at s = 0", describe_log(st.log));
    const Real R = N[0] / D[0];
    const Poly<Real> N1 = (N - R * D).drop_bottom();  // (Z - R) = s N1 / D
    if (N1[0] == 0) throw ConditioningError("inductive-degenerate stage: zero of Z - R at s = 0 is not simple",
                                            describe_log(st.log));
    const Real L = N1[0] / D[0];
    if (L <= 0) throw NotPositiveRealError("inductive-degenerate stage: shunt inductance is not positive");
    // Y_rest = D/(s N1) - 1/(L s) = (L D - N1)/(L s N1)
    Poly<Real> T = (L * D - N1).drop_bottom();
    if (negligible(T, D, exact_tol())) T = Poly<Real>{Real(0)};

    BruneStageExt s;
    s.kind = StageKind::InductiveDegenerate;
    s.R = R;
    s.L_shunt = L;

    ExtractionRecord rec;
    rec.index = st.index;
    rec.kind = StageKind::InductiveDegenerate;
    rec.R1 = R;
    rec.L2 = L;
    return {s, next_state(st, L * N1, T, rec)};
}

SynthesisResult synthesize(const RationalFunction& zin, const BruneOptions& opt) {
    SynthesisResult res;
    BruneCircuitExt& c = res.exact;

    AxisRemoval pre = remove_jaxis_poles(zin, opt);
    c.preamble = pre.elements;
    for (const auto& e : pre.elements) {
        if (e.approximate) res.warnings.push_back(std::string("preamble element ") + to_string(e.kind) +
                                                  " is a forced near-axis projection (approximate)");
    }
    SynthesisState st;
    st.z = pre.reduced.normalized();
    bool done = pre.terminated;
    if (done) c.terminal = pre.terminal;

    while (!done) {
        const Poly<Real>& N = st.z.num;
        const Poly<Real>& D = st.z.den;
        if (N.is_zero()) {
            c.terminal = TerminalKind::Short;
            break;
        }
        if (D.is_zero()) {
            c.terminal = TerminalKind::Open;
            break;
        }
        if (N.degree() == 0 && D.degree() == 0) {
            c.r_terminal = N[0] / D[0];
            c.terminal = TerminalKind::Resistor;
            if (c.r_terminal < 0) {
                throw ConditioningError("terminal resistance is negative: " + to_string(c.r_terminal, 10),
                                        describe_log(st.log));
            }
            break;
        }
        if (c.stages.size() >= opt.max_stages) {
            throw ConvergenceError("Brune synthesis exceeded " + std::to_string(opt.max_stages) + " stages",
                                   describe_log(st.log));
        }

        RealPartMinimum mn;
        try {
            mn = find_min_real_part(st.z, opt);
        } catch (const NotPositiveRealError& e) {
            if (c.stages.empty()) throw;
            throw ConditioningError(std::string("remainder after stage ") + std::to_string(c.stages.size()) +
                                        " failed the PR screen: " + e.what(),
                                    describe_log(st.log));
        }

        std::pair<BruneStageExt, SynthesisState> step;
        switch (mn.where) {
            case MinimumLocation::Finite: step = extract_stage(st, mn, opt); break;
            case MinimumLocation::Infinity: step = extract_degenerate_stage(st, opt); break;
            case MinimumLocation::Zero:
                step = extract_inductive_degenerate_stage(st, opt);
                res.warnings.push_back("stage " + std::to_string(c.stages.size() + 1) +
                                       " is inductive-degenerate (minimum of Re Z at w = 0)");
                break;
        }
        if (step.first.R < 0) {
            std::ostringstream os;
            os.precision(6);
            os << "stage " << c.stages.size() + 1 << ": R = " << to_double(step.first.R)
               << " Ohm is negative (within the PR tolerance); kept so the circuit stays exactly equivalent";
            res.warnings.push_back(os.str());
        }
        c.stages.push_back(step.first);
        st = step.second;

        AxisRemoval ax = remove_jaxis_poles(st.z, opt);
        if (!ax.elements.empty()) {
            c.stages.back().tail = ax.elements;
            res.warnings.push_back("stage " + std::to_string(c.stages.size()) + ": j-axis elements removed from remainder");
        }
        st.z = ax.reduced.normalized();
        if (ax.terminated) {
            c.terminal = ax.terminal;
            done = true;
        }
    }
    if (c.terminal == TerminalKind::Short) res.warnings.push_back("terminal is a short circuit");
    if (c.terminal == TerminalKind::Open) res.warnings.push_back("terminal is an open circuit");
    res.log = st.log;
    res.circuit = to_double(c);
    return res;
}

SynthesisResult synthesize(const PoleResidueModel& m, const BruneOptions& opt) {
    const PrReport rep = check_pr(m, opt.scan);
    if (!rep.is_pr) {
        std::ostringstream os;
        os << "model is not positive real:";
        for (const auto& v : rep.violations) os << " " << to_string(v.kind);
        throw NotPositiveRealError(os.str());
    }
    SynthesisResult res = synthesize(to_rational(m), opt);
    res.warnings.insert(res.warnings.begin(), rep.notes.begin(), rep.notes.end());
    return res;
}

}  // namespace brunesynth
