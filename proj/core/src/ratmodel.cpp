#include "brunesynth/ratmodel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include "brunesynth/errors.hpp"
#include "brunesynth/roots.hpp"

namespace brunesynth {

namespace {

constexpr double kPairTol = 1e-12;

bool close_rel(cdouble a, cdouble b, double tol) {
    double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) <= tol * scale;
}

std::string fmt(cdouble z) {
    std::ostringstream os;
    os.precision(17);
    os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "j";
    return os.str();
}

}  // namespace

void PoleResidueModel::validate() const {
    if (poles.size() != residues.size()) {
        throw ValidationError("model: " + std::to_string(poles.size()) + " poles but " +
                              std::to_string(residues.size()) + " residues");
    }
    if (!std::isfinite(d) || !std::isfinite(e)) throw ValidationError("model: d and e must be finite");
    if (e < 0) throw ValidationError("model: e must be >= 0");
    for (std::size_t k = 0; k < poles.size(); ++k) {
        if (!std::isfinite(poles[k].real()) || !std::isfinite(poles[k].imag()) ||
            !std::isfinite(residues[k].real()) || !std::isfinite(residues[k].imag())) {
            throw ValidationError("model: non-finite pole or residue at index " + std::to_string(k));
        }
    }
    (void)groups();
}

std::vector<PoleResidueModel::Group> PoleResidueModel::groups() const {
    std::vector<Group> out;
    std::vector<bool> used(poles.size(), false);
    for (std::size_t i = 0; i < poles.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        const cdouble p = poles[i];
        const cdouble r = residues[i];
        if (p.imag() == 0.0) {
            if (std::abs(r.imag()) > kPairTol * std::abs(r)) {
                throw ValidationError("model: real pole at index " + std::to_string(i) +
                                      " has a complex residue " + fmt(r));
            }
            out.push_back({i, npos});
            continue;
        }
        std::size_t partner = npos;
        for (std::size_t j = i + 1; j < poles.size(); ++j) {
            if (!used[j] && close_rel(poles[j], std::conj(p), kPairTol)) {
                partner = j;
                break;
            }
        }
        if (partner == npos) {
            throw ValidationError("model: complex pole " + fmt(p) + " at index " + std::to_string(i) +
                                  " has no conjugate partner");
        }
        if (!close_rel(residues[partner], std::conj(r), kPairTol)) {
            throw ValidationError("model: residues at indices " + std::to_string(i) + " and " +
                                  std::to_string(partner) + " are not conjugates");
        }
        used[partner] = true;
        if (p.imag() > 0) out.push_back({i, partner});
        else out.push_back({partner, i});
    }
    return out;
}

cdouble evaluate(const PoleResidueModel& m, cdouble s) {
    cdouble z(m.d + m.e * s.real(), m.e * s.imag());
    for (std::size_t k = 0; k < m.poles.size(); ++k) {
        cdouble diff = s - m.poles[k];
        if (std::abs(diff) <= 1e-15 * std::max(1.0, std::abs(m.poles[k]))) {
            throw DomainError("evaluate: s coincides with pole " + std::to_string(k), k);
        }
        z += m.residues[k] / diff;
    }
    return z;
}

cdouble evaluate_derivative(const PoleResidueModel& m, cdouble s) {
    cdouble dz(m.e, 0.0);
    for (std::size_t k = 0; k < m.poles.size(); ++k) {
        cdouble diff = s - m.poles[k];
        if (std::abs(diff) <= 1e-15 * std::max(1.0, std::abs(m.poles[k]))) {
            throw DomainError("evaluate_derivative: s coincides with pole " + std::to_string(k), k);
        }
        dz -= m.residues[k] / (diff * diff);
    }
    return dz;
}

Complex evaluate(const PoleResidueModel& m, const Complex& s) {
    Complex z = Complex(Real(m.d), Real(0)) + Real(m.e) * s;
    for (std::size_t k = 0; k < m.poles.size(); ++k) {
        Complex diff = s - to_ext(m.poles[k]);
        if (diff == Complex(Real(0), Real(0))) {
            throw DomainError("evaluate: s coincides with pole " + std::to_string(k), k);
        }
        z += to_ext(m.residues[k]) / diff;
    }
    return z;
}

std::pair<Poly<Real>, Poly<Real>> RationalFunction::real_part_in_x() const {
    auto split = [](const Poly<Real>& p) {
        std::vector<Real> ev((p.degree() / 2) + 1, Real(0));
        std::vector<Real> od((p.degree() / 2) + 1, Real(0));
        for (std::size_t k = 0; k <= p.degree(); ++k) {
            std::size_t i = k / 2;
            Real c = (i % 2 == 0) ? p[k] : Real(-p[k]);
            if (k % 2 == 0) ev[i] += c;
            else od[i] += c;
        }
        return std::pair{Poly<Real>(ev), Poly<Real>(od)};
    };
    auto [en, on] = split(num);
    auto [ed, od] = split(den);
    Poly<Real> a = en * ed + (on * od).shift();
    Poly<Real> b = ed * ed + (od * od).shift();
    return {a.normalized(), b.normalized()};
}

RationalFunction RationalFunction::normalized() const {
    return {num.normalized(), den.normalized()};
}

RationalFunction to_rational(const PoleResidueModel& m) {
    m.validate();
    Poly<Real> n{Real(m.d), Real(m.e)};
    if (m.e == 0.0) n = Poly<Real>{Real(m.d)};
    Poly<Real> d{Real(1)};
    for (const auto& g : m.groups()) {
        const Complex p = to_ext(m.poles[g.first]);
        const Complex r = to_ext(m.residues[g.first]);
        Poly<Real> factor, term;
        if (g.is_real()) {
            factor = Poly<Real>{-p.real(), Real(1)};
            term = Poly<Real>{r.real()};
        } else {
            // r/(s-p) + conj(r)/(s-conj p) = (2 Re r s - 2 Re(r conj p)) / (s^2 - 2 Re p s + |p|^2)
            factor = Poly<Real>{std::norm(p), Real(-2) * p.real(), Real(1)};
            term = Poly<Real>{Real(-2) * (r * std::conj(p)).real(), Real(2) * r.real()};
        }
        n = n * factor + term * d;
        d = d * factor;
    }
    return {n, d};
}

PoleResidueModel to_pole_residue(const RationalFunction& zin) {
    RationalFunction z = zin.normalized();
    if (z.den.is_zero()) throw ValidationError("to_pole_residue: zero denominator");
    PoleResidueModel m;
    if (z.num.degree() >= z.den.degree() && !z.num.is_zero()) {
        auto [q, rem] = divmod(z.num, z.den);
        q = q.normalized();
        if (q.degree() > 1) {
            throw ValidationError("to_pole_residue: numerator degree exceeds denominator degree + 1");
        }
        m.d = to_double(q[0]);
        m.e = q.degree() == 1 ? to_double(q[1]) : 0.0;
    }
    if (z.den.degree() == 0) return m;

    const std::vector<Complex> roots = polynomial_roots(z.den);
    const Poly<Real> dden = z.den.derivative();
    const Real real_tol = boost::multiprecision::sqrt(working_epsilon());

    std::vector<Complex> res(roots.size());
    for (std::size_t i = 0; i < roots.size(); ++i) res[i] = z.num.eval(roots[i]) / dden.eval(roots[i]);

    std::vector<bool> used(roots.size(), false);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        const Complex& p = roots[i];
        if (boost::multiprecision::abs(p.imag()) <= real_tol * std::abs(p)) {
            m.poles.emplace_back(to_double(p.real()), 0.0);
            m.residues.emplace_back(to_double(res[i].real()), 0.0);
            continue;
        }
        std::size_t best = roots.size();
        Real best_dist = 0;
        for (std::size_t j = 0; j < roots.size(); ++j) {
            if (used[j]) continue;
            Real dist = std::abs(roots[j] - std::conj(p));
            if (best == roots.size() || dist < best_dist) {
                best = j;
                best_dist = dist;
            }
        }
        if (best == roots.size()) throw NumericalError("to_pole_residue: unpaired complex root");
        used[best] = true;
        const std::size_t iu = p.imag() > 0 ? i : best;
        const std::size_t il = p.imag() > 0 ? best : i;
        const Complex pu = (roots[iu] + std::conj(roots[il])) * Real(0.5);
        const Complex ru = (res[iu] + std::conj(res[il])) * Real(0.5);
        m.poles.push_back(to_double(pu));
        m.residues.push_back(to_double(ru));
        m.poles.push_back(std::conj(to_double(pu)));
        m.residues.push_back(std::conj(to_double(ru)));
    }
    return m;
}

const char* to_string(ViolationKind k) {
    switch (k) {
        case ViolationKind::RhpPole: return "RHP_POLE";
        case ViolationKind::JaxisResidue: return "JAXIS_RESIDUE";
        case ViolationKind::NegativeRealPart: return "NEGATIVE_REAL_PART";
        case ViolationKind::NonSimplePole: return "NON_SIMPLE_POLE";
    }
    return "UNKNOWN";
}

namespace {

struct Candidate {
    MinimumLocation where;
    Real omega;
    Real value;
};

Real golden_minimize(const std::function<Real(const Real&)>& f, Real a, Real b, double rel) {
    const Real invphi = (boost::multiprecision::sqrt(Real(5)) - 1) / 2;
    Real c = b - invphi * (b - a);
    Real d = a + invphi * (b - a);
    Real fc = f(c), fd = f(d);
    for (int it = 0; it < 400 && (b - a) > Real(rel) * boost::multiprecision::abs(b + a) / 2; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    return (a + b) / 2;
}

}  // namespace

RealPartMinimum minimize_real_part(const RationalFunction& zin, const ScanOptions& opt) {
    if (opt.points < 2) throw ValidationError("scan grid needs at least 2 points");
    if (!(opt.f_lo_ghz > 0) || !(opt.f_hi_ghz > opt.f_lo_ghz)) {
        throw ValidationError("scan band must satisfy 0 < f_lo < f_hi");
    }
    const RationalFunction z = zin.normalized();
    if (z.den.is_zero()) throw ValidationError("minimize_real_part: zero denominator");
    auto [A, B] = z.real_part_in_x();

    auto re_at_x = [&](const Real& x) { return A.eval(x) / B.eval(x); };
    auto re_at_w = [&](const Real& w) { return re_at_x(w * w); };
    auto zabs_at_w = [&](const Real& w) { return std::abs(z(Complex(Real(0), w))); };

    std::vector<Candidate> cands;

    // High-frequency limit.
    if (A.is_zero()) {
        cands.push_back({MinimumLocation::Infinity, Real(0), Real(0)});
    } else if (A.degree() < B.degree()) {
        cands.push_back({MinimumLocation::Infinity, Real(0), Real(0)});
    } else if (A.degree() == B.degree()) {
        cands.push_back({MinimumLocation::Infinity, Real(0), A.lead() / B.lead()});
    } else {
        Real inf = std::numeric_limits<double>::infinity();
        cands.push_back({MinimumLocation::Infinity, Real(0), (A.lead() / B.lead()) > 0 ? inf : Real(-inf)});
    }

    // DC limit.
    if (B[0] == 0) throw DomainError("minimize_real_part: pole on the j axis at s = 0", 0);
    cands.push_back({MinimumLocation::Zero, Real(0), A[0] / B[0]});

    // Real critical points of A/B in x.
    if (opt.critical_points && !A.is_zero()) {
        Poly<Real> g = (A.derivative() * B - A * B.derivative()).normalized();
        if (!g.is_zero() && g.degree() >= 1) {
            const Real imag_tol = boost::multiprecision::pow(working_epsilon(), Real(0.25));
            for (const Complex& r : polynomial_roots(g, opt.roots)) {
                if (r.real() <= 0) continue;
                if (boost::multiprecision::abs(r.imag()) > imag_tol * std::abs(r)) continue;
                Real x = r.real();
                Real bx = B.eval(x);
                if (bx == 0) continue;
                cands.push_back({MinimumLocation::Finite, boost::multiprecision::sqrt(x), A.eval(x) / bx});
            }
        }
    }

    // Log grid over the band, then golden-section on each interior local minimum.
    {
        const double two_pi = 2.0 * std::numbers::pi;
        const double wlo = two_pi * opt.f_lo_ghz;
        const double whi = two_pi * opt.f_hi_ghz;
        const std::size_t n = opt.points;
        std::vector<Real> w(n), v(n);
        for (std::size_t i = 0; i < n; ++i) {
            double t = static_cast<double>(i) / static_cast<double>(n - 1);
            w[i] = Real(wlo * std::pow(whi / wlo, t));
            v[i] = re_at_w(w[i]);
        }
        for (std::size_t i = 0; i < n; ++i) {
            bool left = (i == 0) || v[i] <= v[i - 1];
            bool right = (i + 1 == n) || v[i] <= v[i + 1];
            if (!(left && right)) continue;
            if (i == 0 || i + 1 == n) {
                cands.push_back({MinimumLocation::Finite, w[i], v[i]});
                continue;
            }
            Real wm = golden_minimize(re_at_w, w[i - 1], w[i + 1], opt.refine_rel);
            cands.push_back({MinimumLocation::Finite, wm, re_at_w(wm)});
        }
    }

    const Candidate* best = &cands.front();
    for (const auto& c : cands) {
        if (c.value < best->value) best = &c;
    }

    RealPartMinimum out;
    out.where = best->where;
    out.value = best->value;
    out.omega = best->omega;
    switch (best->where) {
        case MinimumLocation::Finite: out.z_abs = zabs_at_w(best->omega); break;
        case MinimumLocation::Zero: out.z_abs = boost::multiprecision::abs(z.num[0] / z.den[0]); break;
        case MinimumLocation::Infinity:
            out.z_abs = (z.num.degree() == z.den.degree()) ? boost::multiprecision::abs(z.num.lead() / z.den.lead())
                                                           : Real(0);
            break;
    }
    return out;
}

PrReport check_pr(const PoleResidueModel& m, const ScanOptions& opt) {
    if (opt.points == 0) throw ValidationError("check_pr: empty scan grid");
    m.validate();
    PrReport rep;

    for (std::size_t i = 0; i < m.poles.size(); ++i) {
        for (std::size_t j = i + 1; j < m.poles.size(); ++j) {
            if (close_rel(m.poles[i], m.poles[j], opt.simple_rel_tol)) {
                rep.violations.push_back({ViolationKind::NonSimplePole, m.poles[i], std::abs(m.poles[i] - m.poles[j])});
            }
        }
    }

    PoleResidueModel lossy;
    lossy.d = m.d;
    lossy.e = 0.0;  // e*s is purely reactive on the axis
    for (std::size_t k = 0; k < m.poles.size(); ++k) {
        const cdouble p = m.poles[k];
        const cdouble r = m.residues[k];
        const bool on_axis = std::abs(p.real()) <= opt.axis_rel_tol * std::abs(p);
        if (on_axis) {
            const bool ok = r.real() > 0 && std::abs(r.imag()) <= std::max(opt.axis_rel_tol, 1e-12) * std::abs(r);
            if (!ok) rep.violations.push_back({ViolationKind::JaxisResidue, p, std::abs(r)});
            continue;
        }
        if (p.real() > 0) rep.violations.push_back({ViolationKind::RhpPole, p, p.real()});
        lossy.poles.push_back(p);
        lossy.residues.push_back(r);
    }

    const RealPartMinimum mn = minimize_real_part(to_rational(lossy), opt);
    rep.min_real_part = to_double(mn.value);
    rep.omega_at_min = mn.where == MinimumLocation::Infinity ? std::numeric_limits<double>::infinity()
                                                              : to_double(mn.omega);
    const double zabs = to_double(mn.z_abs);
    if (rep.min_real_part < -opt.pr_rel_tol * zabs || (rep.min_real_part < 0 && zabs == 0.0)) {
        rep.violations.push_back({ViolationKind::NegativeRealPart, cdouble(0.0, rep.omega_at_min), -rep.min_real_part});
    } else if (rep.min_real_part < 0) {
        std::ostringstream os;
        os.precision(6);
        os << "min Re Z = " << rep.min_real_part << " Ohm at " << rep.omega_at_min / (2 * std::numbers::pi)
           << " GHz is negative but within the relative tolerance " << opt.pr_rel_tol << " of |Z| = " << zabs;
        rep.notes.push_back(os.str());
    }
    rep.is_pr = rep.violations.empty();
    return rep;
}

PrReport check_pr(const RationalFunction& z, const ScanOptions& opt) {
    return check_pr(to_pole_residue(z), opt);
}

}  // namespace brunesynth
