#include "brunesynth/response.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "brunesynth/errors.hpp"

namespace brunesynth {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool finite(cdouble z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

std::string fmt_s(cdouble s) {
    std::ostringstream os;
    os.precision(12);
    os << "(" << s.real() << ", " << s.imag() << ")";
    return os.str();
}

}  // namespace

cdouble ladder_impedance(const BruneCircuit& c, cdouble s, LadderForm form) {
    cdouble z = brune_ladder(c, s, form);
    if (!finite(z)) throw DomainError("ladder_impedance: s is a pole of the network", 0);
    return z;
}

Complex ladder_impedance(const BruneCircuitExt& c, const Complex& s, LadderForm form) {
    Complex z = brune_ladder(c, s, form);
    if (!boost::multiprecision::isfinite(z.real()) || !boost::multiprecision::isfinite(z.imag())) {
        throw DomainError("ladder_impedance: s is a pole of the network", 0);
    }
    return z;
}

cdouble ladder_impedance(const FosterCircuit& c, cdouble s) {
    cdouble z = 0.0;
    for (std::size_t k = 0; k < c.stages.size(); ++k) {
        cdouble zk = stage_impedance(c.stages[k], s);
        if (!finite(zk)) throw DomainError("ladder_impedance: s is a pole of Foster stage " + std::to_string(k), k);
        z += zk;
    }
    return z;
}

Impedance make_impedance(const PoleResidueModel& m, std::string label) {
    m.validate();
    return {std::move(label), [m](cdouble s) { return evaluate(m, s); },
            [m](cdouble s) { return evaluate_derivative(m, s); }};
}

Impedance make_impedance(const BruneCircuit& c, std::string label) {
    return {std::move(label), [c](cdouble s) { return ladder_impedance(c, s); },
            [c](cdouble s) {
                auto r = brune_ladder(c, Dual<cdouble>::variable(s));
                return r.d;
            }};
}

Impedance make_impedance(const FosterCircuit& c, std::string label) {
    return {std::move(label), [c](cdouble s) { return ladder_impedance(c, s); },
            [c](cdouble s) {
                cdouble dz = 0.0;
                for (const auto& st : c.stages) {
                    cdouble zk = stage_impedance(st, s);
                    cdouble dy = -1.0 / (s * s * st.L) + st.C;
                    dz += -zk * zk * dy;
                }
                return dz;
            }};
}

cdouble shunted_response(const Impedance& z, double L_J, cdouble s, double C_J) {
    if (!(L_J > 0)) throw ValidationError("shunted_response: L_J must be positive");
    return 1.0 / (s * L_J) + s * C_J + 1.0 / z.z(s);
}

cdouble shunted_response_derivative(const Impedance& z, double L_J, cdouble s, double C_J) {
    const cdouble zv = z.z(s);
    return -1.0 / (s * s * L_J) + C_J - z.dz(s) / (zv * zv);
}

QubitPole QubitPole::from_s(cdouble s) {
    QubitPole p;
    p.s_qb = s;
    p.xi_qb = s.real();
    p.omega_qb = s.imag();
    p.f_qb = s.imag() / kTwoPi;
    const double loss = std::abs(s.real());
    p.Q_qb = loss > 0 ? std::abs(s.imag()) / loss : std::numeric_limits<double>::infinity();
    p.T1 = loss > 0 ? 1.0 / loss : std::numeric_limits<double>::infinity();
    return p;
}

namespace {

// Muller's method on F from three starting points; used when Newton stalls.
cdouble muller(const std::function<cdouble(cdouble)>& F, cdouble x0, cdouble x1, cdouble x2, double tol, int maxit,
               int& iterations) {
    cdouble f0 = F(x0), f1 = F(x1), f2 = F(x2);
    for (int it = 0; it < maxit; ++it) {
        ++iterations;
        cdouble h1 = x1 - x0, h2 = x2 - x1;
        cdouble d1 = (f1 - f0) / h1, d2 = (f2 - f1) / h2;
        cdouble a = (d2 - d1) / (h2 + h1);
        cdouble b = a * h2 + d2;
        cdouble disc = std::sqrt(b * b - 4.0 * f2 * a);
        cdouble den = std::abs(b + disc) > std::abs(b - disc) ? b + disc : b - disc;
        cdouble dx = den == 0.0 ? cdouble(tol * std::abs(x2) + 1e-12) : -2.0 * f2 / den;
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
        x2 = x2 + dx;
        f2 = F(x2);
        if (std::abs(dx) < tol * std::abs(x2)) return x2;
    }
    throw ConvergenceError("Muller iteration did not converge");
}

}  // namespace

PoleSearchResult find_qubit_pole_from(const Impedance& z, double L_J, cdouble s0, const PoleSearchOptions& opt) {
    if (!(L_J > 0)) throw ValidationError("find_qubit_pole: L_J must be positive");
    auto F = [&](cdouble s) { return shunted_response(z, L_J, s, opt.C_J); };
    auto dF = [&](cdouble s) { return shunted_response_derivative(z, L_J, s, opt.C_J); };

    PoleSearchResult res;
    std::vector<std::string> trajectory;
    cdouble s = s0;
    cdouble prev = s0;
    cdouble f = F(s);
    bool converged = false;
    int stalls = 0;
    for (int it = 0; it < opt.max_iterations; ++it) {
        res.iterations = it + 1;
        trajectory.push_back(fmt_s(s));
        cdouble step = f / dF(s);
        if (!finite(step)) break;
        cdouble cand = s - step;
        cdouble fc = F(cand);
        int halvings = 0;
        while ((!finite(fc) || std::abs(fc) > std::abs(f)) && halvings < 8) {
            step *= 0.5;
            cand = s - step;
            fc = F(cand);
            ++halvings;
        }
        if (halvings == 8) ++stalls;
        prev = s;
        s = cand;
        f = fc;
        if (std::abs(step) < opt.tol * std::abs(s)) {
            converged = true;
            break;
        }
        if (stalls >= 2) break;
    }
    if (!converged) {
        res.used_muller = true;
        try {
            cdouble x0 = prev, x1 = 0.5 * (prev + s), x2 = s;
            if (x0 == x2) {
                x0 = s * (1.0 - 1e-6);
                x1 = s * (1.0 + 1e-6);
            }
            s = muller(F, x0, x1, x2, opt.tol, opt.max_iterations, res.iterations);
            converged = true;
        } catch (const ConvergenceError&) {
            trajectory.push_back(fmt_s(s));
            throw ConvergenceError("qubit pole search did not converge from " + fmt_s(s0), trajectory);
        }
    }
    res.pole = QubitPole::from_s(s);
    if (std::abs(std::abs(res.pole.f_qb) - opt.cavity_f_ghz) < opt.cavity_window_ghz) {
        res.cavity_warning = true;
        std::ostringstream os;
        os.precision(7);
        os << "pole at " << res.pole.f_qb << " GHz lies within " << opt.cavity_window_ghz * 1e3
           << " MHz of the cavity mode at " << opt.cavity_f_ghz << " GHz; it may be the cavity pole";
        res.warnings.push_back(os.str());
    }
    if (res.pole.xi_qb > 0) res.warnings.push_back("pole lies in the right half-plane (active network)");
    return res;
}

PoleSearchResult find_qubit_pole(const Impedance& z, double L_J, double f_guess_ghz, const PoleSearchOptions& opt) {
    return find_qubit_pole_from(z, L_J, cdouble(0.0, kTwoPi * f_guess_ghz), opt);
}

std::vector<double> default_lj_grid() {
    std::vector<double> g;
    for (int i = 0; i <= 25; ++i) g.push_back(4.0 + 0.1 * i);
    return g;
}

std::vector<SweepRow> sweep_LJ(const Impedance& z, const std::vector<double>& lj, const SweepOptions& opt) {
    if (lj.empty()) throw ValidationError("sweep_LJ: empty L_J list");
    for (std::size_t i = 0; i < lj.size(); ++i) {
        if (!(lj[i] > 0)) throw ValidationError("sweep_LJ: L_J values must be positive");
        if (i > 0 && !(lj[i] > lj[i - 1])) throw ValidationError("sweep_LJ: L_J list must be strictly increasing");
    }
    if (opt.substeps < 1) throw ValidationError("sweep_LJ: substeps must be >= 1");

    std::size_t anchor = 0;
    if (opt.anchor_LJ) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < lj.size(); ++i) {
            if (std::abs(lj[i] - *opt.anchor_LJ) < best) {
                best = std::abs(lj[i] - *opt.anchor_LJ);
                anchor = i;
            }
        }
    }

    std::vector<SweepRow> rows(lj.size());
    auto record = [&](std::size_t i, const PoleSearchResult& r) {
        rows[i].L_J = lj[i];
        rows[i].pole = r.pole;
        rows[i].cavity_warning = r.cavity_warning;
    };

    // Anchor solve; when the anchor is off the grid, walk from it to the nearest grid point.
    PoleSearchResult ar;
    if (opt.anchor_LJ && *opt.anchor_LJ != lj[anchor]) {
        PoleSearchResult first = find_qubit_pole(z, *opt.anchor_LJ, opt.f_seed_ghz, opt.search);
        ar = find_qubit_pole_from(z, lj[anchor], first.pole.s_qb, opt.search);
    } else {
        ar = find_qubit_pole(z, lj[anchor], opt.f_seed_ghz, opt.search);
    }
    record(anchor, ar);

    // Secant-predicted continuation with substeps between grid points.
    auto walk = [&](std::size_t from, std::size_t to) {
        double l_prev = lj[from];
        cdouble s_prev = rows[from].pole.s_qb;
        double l_prev2 = l_prev;
        cdouble s_prev2 = s_prev;
        bool have_two = false;
        PoleSearchResult r;
        for (int k = 1; k <= opt.substeps; ++k) {
            double l = lj[from] + (lj[to] - lj[from]) * static_cast<double>(k) / opt.substeps;
            cdouble guess = s_prev;
            if (have_two) guess = s_prev + (s_prev - s_prev2) * ((l - l_prev) / (l_prev - l_prev2));
            r = find_qubit_pole_from(z, l, guess, opt.search);
            l_prev2 = l_prev;
            s_prev2 = s_prev;
            l_prev = l;
            s_prev = r.pole.s_qb;
            have_two = true;
        }
        record(to, r);
        rows[to].branch_jump = std::abs(rows[to].pole.f_qb - rows[from].pole.f_qb) > opt.branch_jump_ghz;
    };
    for (std::size_t i = anchor + 1; i < lj.size(); ++i) walk(i - 1, i);
    for (std::size_t i = anchor; i-- > 0;) walk(i + 1, i);
    return rows;
}

}  // namespace brunesynth
