#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "equilibrium.hpp"
#include "model.hpp"
#include "ode.hpp"
#include "parallel.hpp"

namespace sfcinv {

using CVec = Eigen::VectorXcd;
using PlanarField = std::function<Vec(const Vec&)>;

// ============================================================================
// Jacobians
// ============================================================================

/// Central differences with per-component step scale*max(1,|x_j|).
inline Mat jacobian_fd(const PlanarField& F, const Vec& x, double scale = 1e-6) {
    const Eigen::Index n = x.size();
    Mat J;
    for (Eigen::Index j = 0; j < n; ++j) {
        const double h = scale * std::max(1.0, std::abs(x[j]));
        Vec xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        const Vec fp = F(xp), fm = F(xm);
        if (!fp.allFinite() || !fm.allFinite()) throw NonFiniteError("jacobian_fd: non-finite field in stencil");
        if (j == 0) J.resize(fp.size(), n);
        J.col(j) = (fp - fm) / (2.0 * h);
    }
    return J;
}

inline Mat jacobian_fd(ModelVariant v, const ModelParams& p, const Vec& x, double scale = 1e-6) {
    return jacobian_fd([&](const Vec& y) { return core_field(v, p, y); }, x, scale);
}

/// Printed keeps the (3,3) entry exactly as typeset, where the d*kappa'/nu term lacks the
/// factor r that differentiation of pi_e = 1 - omega - r d produces.
enum class JacobianConvention { Derived, Printed };

struct LongRunJacobianEntries {
    double J11, J12, J13, J21, J22, J23, J31, J32, J33;
};

inline LongRunJacobianEntries longrun_monetary_entries(const ModelParams& p, const StateKeen& s,
                                                       JacobianConvention conv = JacobianConvention::Derived) {
    const auto& c = p.consumption;
    const double pi = 1.0 - s.omega - p.r * s.d;
    const double k = p.kappa(p.u0, pi);
    const double kp = p.kappa.derivative(pi);
    const double delta = p.depreciation(p.u0);
    const double i = longrun_inflation(p, s.omega, s.d);
    const double di_domega = p.eta_p * p.markup + p.eta_q * (c.c1 - kp / p.u0);
    const double di_dd = p.eta_q * (c.c2 - p.r * kp / p.u0);
    LongRunJacobianEntries e{};
    e.J11 = p.phillips(s.lambda) - p.alpha - (1.0 - p.gamma) * i - (1.0 - p.gamma) * s.omega * di_domega;
    e.J12 = s.omega * p.phillips.derivative(s.lambda);
    e.J13 = -(1.0 - p.gamma) * s.omega * di_dd;
    e.J21 = -s.lambda / p.nu * kp;
    e.J22 = k / p.nu - p.alpha - p.beta - delta;
    e.J23 = -p.r * s.lambda / p.nu * kp;
    e.J31 = s.d * (kp / p.nu - di_domega) + (1.0 - c.c1);
    e.J32 = 0.0;
    const double kterm = conv == JacobianConvention::Derived ? p.r * kp / p.nu : kp / p.nu;
    e.J33 = (p.r - c.c2 - k / p.nu + delta - i) + s.d * (kterm - di_dd);
    return e;
}

inline Mat jacobian_longrun_monetary(const ModelParams& p, const StateKeen& s,
                                     JacobianConvention conv = JacobianConvention::Derived) {
    const auto e = longrun_monetary_entries(p, s, conv);
    Mat J(3, 3);
    J << e.J11, e.J12, e.J13, e.J21, e.J22, e.J23, e.J31, e.J32, e.J33;
    return J;
}

/// Analytic Jacobians of the planar short-run systems at any point.
inline Mat shortrun_jacobian(const ModelParams& p, ModelVariant v, const StateShortRun& s) {
    const double e0 = p.eta0();
    Mat J(2, 2);
    J(1, 0) = p.eta_e - s.y_e * (e0 + p.eta_d);
    J(1, 1) = p.eta_d - p.eta_e + 2.0 * e0 * s.y_e - (e0 + p.eta_d) * s.y_d;
    if (v == ModelVariant::ShortRunA) {
        const double a = (1.0 - p.gamma) * p.eta_q;
        J(0, 0) = -a * (2.0 * s.y_d - s.y_e);
        J(0, 1) = a * s.y_d;
    } else if (v == ModelVariant::ShortRunB) {
        if (p.eta_d == 0.0) throw DomainError("short-run system B divides by eta_d");
        const double b = (1.0 - p.gamma) * p.eta_q / p.eta_d;
        J(0, 0) = -b * (1.0 - s.y_e);
        J(0, 1) = b * s.y_d;
    } else {
        throw PreconditionError("shortrun_jacobian: variant must be shortrun_a or shortrun_b");
    }
    return J;
}

// ============================================================================
// Classification and Routh-Hurwitz
// ============================================================================

enum class Classification { Attracting, Repelling, Saddle, CenterCandidate, NonHyperbolic };

inline std::string classification_name(Classification c) {
    switch (c) {
    case Classification::Attracting: return "attracting";
    case Classification::Repelling: return "repelling";
    case Classification::Saddle: return "saddle";
    case Classification::CenterCandidate: return "center-candidate";
    case Classification::NonHyperbolic: return "non-hyperbolic";
    }
    return "?";
}

inline CVec eigenvalues(const Mat& J) {
    Eigen::EigenSolver<Mat> es(J, false);
    CVec ev = es.eigenvalues();
    std::vector<std::complex<double>> v(ev.data(), ev.data() + ev.size());
    std::sort(v.begin(), v.end(), [](auto a, auto b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
    for (std::size_t k = 0; k < v.size(); ++k) ev[static_cast<Eigen::Index>(k)] = v[k];
    return ev;
}

inline Classification classify(const CVec& ev, double tol = 1e-10) {
    int neg = 0, pos = 0, zero = 0;
    bool zero_pair_imag = true;
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
        const double re = ev[k].real();
        if (re < -tol) ++neg;
        else if (re > tol) ++pos;
        else {
            ++zero;
            if (std::abs(ev[k].imag()) <= tol) zero_pair_imag = false;
        }
    }
    if (zero > 0) return (zero == 2 && zero_pair_imag && zero == ev.size()) ? Classification::CenterCandidate
                                                                            : Classification::NonHyperbolic;
    if (pos == 0) return Classification::Attracting;
    if (neg == 0) return Classification::Repelling;
    return Classification::Saddle;
}

/// Monic cubic X^3 + a2 X^2 + a1 X + a0.
struct Cubic {
    double a2 = 0.0, a1 = 0.0, a0 = 0.0;
};

inline Cubic characteristic_cubic(const Mat& J) {
    if (J.rows() != 3 || J.cols() != 3) throw PreconditionError("characteristic_cubic: need a 3x3 matrix");
    const double tr = J.trace();
    const double m2 = J(0, 0) * J(1, 1) - J(0, 1) * J(1, 0) + J(0, 0) * J(2, 2) - J(0, 2) * J(2, 0) + J(1, 1) * J(2, 2) -
                      J(1, 2) * J(2, 1);
    return {-tr, m2, -J.determinant()};
}

struct RouthHurwitzVerdict {
    bool stable = false;
    double margin_a2 = kNaN;  ///< a2
    double margin_a0 = kNaN;  ///< a0
    double margin_cross = kNaN; ///< a2 a1 - a0
    double min_margin() const { return std::min({margin_a2, margin_a0, margin_cross}); }
};

inline RouthHurwitzVerdict routh_hurwitz_cubic(const Cubic& p) {
    RouthHurwitzVerdict v;
    v.margin_a2 = p.a2;
    v.margin_a0 = p.a0;
    v.margin_cross = p.a2 * p.a1 - p.a0;
    v.stable = v.margin_a2 > 0.0 && v.margin_a0 > 0.0 && v.margin_cross > 0.0;
    return v;
}

inline CVec cubic_roots(const Cubic& p) {
    Mat C = Mat::Zero(3, 3);
    C(0, 0) = -p.a2;
    C(0, 1) = -p.a1;
    C(0, 2) = -p.a0;
    C(1, 0) = 1.0;
    C(2, 1) = 1.0;
    return eigenvalues(C);
}

/// The two printed sign conditions at a steady-growth point, evaluated with the matrix shape
/// used for them (J13 and J22 set to zero).
struct PrintedRouthHurwitz {
    bool condition1 = false;
    bool condition2 = false;
    double margin1 = kNaN; ///< min{-J11, -lk'wPhi'/(nu J11), r J31} - J33
    double margin2 = kNaN; ///< lhs of the second inequality + 1
    double J11 = kNaN, J13 = kNaN, J31 = kNaN, J33 = kNaN;
    bool j11_negative = false; ///< the printed pair equals Routh-Hurwitz only when J11 < 0
    bool both() const { return condition1 && condition2; }
};

inline PrintedRouthHurwitz routh_hurwitz_printed_conditions(const ModelParams& p, const StateKeen& eq,
                                                        JacobianConvention conv = JacobianConvention::Derived) {
    const auto e = longrun_monetary_entries(p, eq, conv);
    const double pi = 1.0 - eq.omega - p.r * eq.d;
    const double prod = eq.lambda * p.kappa.derivative(pi) * eq.omega * p.phillips.derivative(eq.lambda);
    PrintedRouthHurwitz out;
    out.J11 = e.J11;
    out.J13 = e.J13;
    out.J31 = e.J31;
    out.J33 = e.J33;
    out.j11_negative = e.J11 < 0.0;
    const double bound = std::min({-e.J11, -prod / (p.nu * e.J11), p.r * e.J31});
    out.margin1 = bound - e.J33;
    out.condition1 = out.margin1 > 0.0;
    const double lhs = (p.r * e.J31 - e.J33) / (e.J11 + e.J33) + p.nu * e.J33 * e.J11 / prod;
    out.margin2 = lhs + 1.0;
    out.condition2 = out.margin2 > 0.0;
    return out;
}

/// Matrix the printed conditions refer to: J13 = J22 = 0.
inline Mat reduced_equilibrium_matrix(const ModelParams& p, const StateKeen& eq,
                                    JacobianConvention conv = JacobianConvention::Derived) {
    auto e = longrun_monetary_entries(p, eq, conv);
    Mat J(3, 3);
    J << e.J11, e.J12, 0.0, e.J21, 0.0, e.J23, e.J31, 0.0, e.J33;
    return J;
}

// ============================================================================
// Stability reports
// ============================================================================

struct StabilityReport {
    std::string equilibrium_label;
    EquilibriumKind kind = EquilibriumKind::Interior;
    Vec coords;
    Mat jacobian;
    std::string jacobian_source; ///< analytic | finite-difference
    CVec eigenvalues;
    Classification classification = Classification::NonHyperbolic;
    std::optional<RouthHurwitzVerdict> routh_hurwitz;
    std::optional<PrintedRouthHurwitz> printed_conditions;
    std::vector<std::string> notes;
};

inline StabilityReport stability_of(const EquilibriumReport& eq, const ModelParams& p) {
    if (eq.marker) throw PreconditionError("stability_of: asymptotic marker has no Jacobian");
    StabilityReport out;
    out.equilibrium_label = eq.label;
    out.kind = eq.kind;
    const auto core_dim = static_cast<Eigen::Index>(state_names(eq.variant).size());
    out.coords = eq.coords.head(core_dim);
    ModelParams q = p;
    if (eq.variant == ModelVariant::LongRunReal3D) q.eta_p = q.eta_q = q.gamma = 0.0;
    switch (eq.variant) {
    case ModelVariant::LongRunMonetary3D:
    case ModelVariant::LongRunReal3D:
        out.jacobian = jacobian_longrun_monetary(q, StateKeen::from(out.coords));
        out.jacobian_source = "analytic";
        break;
    case ModelVariant::ShortRunA:
    case ModelVariant::ShortRunB:
        out.jacobian = shortrun_jacobian(p, eq.variant, StateShortRun::from(out.coords));
        out.jacobian_source = "analytic";
        break;
    default:
        out.jacobian = jacobian_fd(eq.variant, p, out.coords);
        out.jacobian_source = "finite-difference";
    }
    out.eigenvalues = eigenvalues(out.jacobian);
    out.classification = classify(out.eigenvalues);
    if (out.jacobian.rows() == 3) out.routh_hurwitz = routh_hurwitz_cubic(characteristic_cubic(out.jacobian));
    if ((eq.variant == ModelVariant::LongRunMonetary3D || eq.variant == ModelVariant::LongRunReal3D) &&
        eq.kind == EquilibriumKind::Interior) {
        out.printed_conditions = routh_hurwitz_printed_conditions(q, StateKeen::from(out.coords));
        if (!out.printed_conditions->j11_negative)
            out.notes.push_back("J11 >= 0: printed conditions are not equivalent to Routh-Hurwitz here");
    }
    if (has_aux_inventory(eq.variant)) out.notes.push_back("inventory ratio excluded; it decouples with rate -g_e");
    return out;
}

// ============================================================================
// Hopf threshold, scan, first Lyapunov coefficient
// ============================================================================

inline double gamma0(const ModelParams& p) {
    if (p.eta_q == 0.0) throw DomainError("gamma0 undefined for eta_q = 0");
    return 1.0 - p.eta_e * p.eta_d * p.f_d / p.eta_q;
}

inline double max_real_part_at_balance(ModelParams p, double gamma) {
    p.gamma = gamma;
    return eigenvalues(shortrun_jacobian(p, ModelVariant::ShortRunA, {1.0, 1.0})).real().maxCoeff();
}

struct HopfRecord {
    bool found = false;
    double gamma_critical = kNaN;
    double gamma0_closed_form = kNaN;
    double frequency = kNaN; ///< imaginary part at the crossing
    int iterations = 0;
    std::vector<std::pair<double, double>> sweep; ///< (gamma, max Re eigenvalue)
    std::string note;
};

/// Bisection on the largest real part of the eigenvalues at (1,1) of short-run system A.
inline HopfRecord hopf_scan(const ModelParams& p, double lo = 0.0, double hi = 1.0, int sweep_points = 101,
                            double tol = 1e-13) {
    HopfRecord out;
    try {
        out.gamma0_closed_form = gamma0(p);
    } catch (const DomainError&) {
    }
    for (int k = 0; k < sweep_points; ++k) {
        const double g = lo + (hi - lo) * k / std::max(1, sweep_points - 1);
        out.sweep.emplace_back(g, max_real_part_at_balance(p, g));
    }
    double a = lo, b = hi;
    double fa = max_real_part_at_balance(p, a), fb = max_real_part_at_balance(p, b);
    if (std::abs(fb) < 1e-14) {
        out.found = true;
        out.gamma_critical = b;
        out.note = "crossing at the upper end of the bracket";
    } else if (std::abs(fa) < 1e-14) {
        out.found = true;
        out.gamma_critical = a;
        out.note = "crossing at the lower end of the bracket";
    } else if ((fa < 0.0) == (fb < 0.0)) {
        out.note = "no eigenvalue crossing in bracket";
        return out;
    } else {
        while (b - a > tol && out.iterations < 200) {
            const double m = 0.5 * (a + b);
            const double fm = max_real_part_at_balance(p, m);
            ++out.iterations;
            if ((fm < 0.0) == (fa < 0.0)) {
                a = m;
                fa = fm;
            } else {
                b = m;
                fb = fm;
            }
        }
        out.found = true;
        out.gamma_critical = 0.5 * (a + b);
    }
    ModelParams q = p;
    q.gamma = out.gamma_critical;
    out.frequency = eigenvalues(shortrun_jacobian(q, ModelVariant::ShortRunA, {1.0, 1.0})).imag().cwiseAbs().maxCoeff();
    return out;
}

struct LyapunovResult {
    double l1 = kNaN;        ///< Guckenheimer-Holmes coefficient a
    double frequency = kNaN;
    std::string regime;      ///< subcritical | supercritical | degenerate
};

/// First Lyapunov coefficient of a planar field at a point with purely imaginary eigenvalues,
/// computed in the real Jordan basis with finite-difference partial derivatives.
inline LyapunovResult lyapunov_first_coefficient(const PlanarField& F, const Vec& x0, double step = 1e-3,
                                                 double imag_tol = 1e-8) {
    const Mat J = jacobian_fd(F, x0, 1e-6);
    if (J.rows() != 2) throw PreconditionError("first Lyapunov coefficient needs a planar field");
    Eigen::EigenSolver<Mat> es(J);
    const auto ev = es.eigenvalues();
    int k = ev[0].imag() > 0.0 ? 0 : 1;
    const double w = ev[k].imag();
    if (!(w > 0.0) || std::abs(ev[k].real()) > imag_tol * std::max(1.0, w))
        throw PreconditionError("first Lyapunov coefficient needs a purely imaginary eigenpair");
    const Eigen::VectorXcd q = es.eigenvectors().col(k);
    Mat P(2, 2);
    P.col(0) = q.real();
    P.col(1) = -q.imag();
    const Mat Pinv = P.inverse();
    auto G = [&](double a, double b) -> Vec {
        Vec xi(2);
        xi << a, b;
        return Pinv * F(x0 + P * xi);
    };
    const double h = step * std::max(1.0, x0.lpNorm<Eigen::Infinity>());
    const Vec g00 = G(0, 0);
    const Vec gp0 = G(h, 0), gm0 = G(-h, 0), g0p = G(0, h), g0m = G(0, -h);
    const Vec gpp = G(h, h), gpm = G(h, -h), gmp = G(-h, h), gmm = G(-h, -h);
    const Vec g2p0 = G(2 * h, 0), g2m0 = G(-2 * h, 0), g02p = G(0, 2 * h), g02m = G(0, -2 * h);
    const Vec Fxx = (gp0 - 2.0 * g00 + gm0) / (h * h);
    const Vec Fyy = (g0p - 2.0 * g00 + g0m) / (h * h);
    const Vec Fxy = (gpp - gpm - gmp + gmm) / (4.0 * h * h);
    const Vec Fxxx = (g2p0 - 2.0 * gp0 + 2.0 * gm0 - g2m0) / (2.0 * h * h * h);
    const Vec Fyyy = (g02p - 2.0 * g0p + 2.0 * g0m - g02m) / (2.0 * h * h * h);
    const Vec Fxyy = (gpp - 2.0 * gp0 + gpm - gmp + 2.0 * gm0 - gmm) / (2.0 * h * h * h);
    const Vec Fxxy = (gpp - 2.0 * g0p + gmp - gpm + 2.0 * g0m - gmm) / (2.0 * h * h * h);
    // f = first component, g = second component of the transformed nonlinearity.
    const double a = (Fxxx[0] + Fxyy[0] + Fxxy[1] + Fyyy[1]) / 16.0 +
                     (Fxy[0] * (Fxx[0] + Fyy[0]) - Fxy[1] * (Fxx[1] + Fyy[1]) - Fxx[0] * Fxx[1] + Fyy[0] * Fyy[1]) /
                         (16.0 * w);
    LyapunovResult out;
    out.l1 = a;
    out.frequency = w;
    out.regime = a > 0.0 ? "subcritical" : (a < 0.0 ? "supercritical" : "degenerate");
    return out;
}

/// l1 of short-run system A at (1,1) with gamma set to gamma0.
inline LyapunovResult lyapunov_at_gamma0(ModelParams p) {
    p.gamma = gamma0(p);
    Vec x0(2);
    x0 << 1.0, 1.0;
    return lyapunov_first_coefficient([p](const Vec& y) { return vf_shortrunA(p, StateShortRun::from(y)).to_vector(); }, x0);
}

// ============================================================================
// Return-map shooting around (1,1)
// ============================================================================

struct ReturnDisplacement {
    double rho = kNaN;
    double displacement = kNaN; ///< next return minus start along the ray; +inf when no return
    bool returned = false;
    double period = kNaN;
};

/// Start at (1+rho, 1) on the half-line {y_e = 1, y_d > 1} and follow the flow to its next
/// falling crossing of y_e = 1.
inline ReturnDisplacement return_displacement(ModelVariant v, const ModelParams& p, double rho, double t_max = 5000.0,
                                              SolverOptions opt = {}) {
    opt.rtol = std::min(opt.rtol, 1e-11);
    opt.atol = std::min(opt.atol, 1e-13);
    EventSpec sec{"section", [](double, const Vec& y) { return y[1] - 1.0; }, Direction::Falling, true};
    const auto tr = integrate(make_core_field(v, p), StateShortRun{1.0 + rho, 1.0}.to_vector(), 0.0, t_max, opt, {sec});
    ReturnDisplacement out;
    out.rho = rho;
    if (tr.termination == Termination::Event) {
        out.returned = true;
        out.displacement = tr.events.back().y[0] - 1.0 - rho;
        out.period = tr.events.back().t;
    } else {
        out.displacement = kInf;
    }
    return out;
}

struct CycleSearch {
    bool found = false;
    double rho = kNaN;         ///< radius of the cycle along the ray
    double rho_inside = kNaN;  ///< largest tested start that returned closer
    double rho_outside = kNaN; ///< smallest tested start that returned farther (or escaped)
    double period = kNaN;
    std::string stability; ///< unstable | stable | semi-stable
    std::vector<ReturnDisplacement> scan;
};

/// Scans rho on (rho_min, rho_max) for a sign change of the return displacement and bisects it.
inline CycleSearch radial_shooting(ModelVariant v, const ModelParams& p, double rho_min = 1e-3, double rho_max = 1.0,
                                   int n_scan = 40, double tol = 1e-9) {
    CycleSearch out;
    const auto rhos = geometric_grid(rho_min, rho_max, n_scan);
    out.scan.resize(rhos.size());
    parallel_for(rhos.size(), [&](std::size_t k) { out.scan[k] = return_displacement(v, p, rhos[k]); });
    for (std::size_t k = 0; k + 1 < out.scan.size(); ++k) {
        const double d0 = out.scan[k].displacement, d1 = out.scan[k + 1].displacement;
        if (!((d0 < 0.0) != (d1 < 0.0))) continue;
        double a = out.scan[k].rho, b = out.scan[k + 1].rho;
        const bool inner_negative = d0 < 0.0;
        while (b - a > tol * std::max(1.0, b)) {
            const double m = 0.5 * (a + b);
            const auto r = return_displacement(v, p, m);
            if ((r.displacement < 0.0) == inner_negative) a = m;
            else b = m;
        }
        out.found = true;
        out.rho_inside = a;
        out.rho_outside = b;
        out.rho = 0.5 * (a + b);
        out.period = return_displacement(v, p, out.rho).period;
        out.stability = inner_negative ? "unstable" : "stable";
        break;
    }
    return out;
}

// ============================================================================
// Phase-plane geometry of system A
// ============================================================================

struct PhaseGeometry {
    double eta0 = kNaN;
    double ye_minus = kNaN, ye_plus = kNaN;
    double yd_minus = kNaN, yd_plus = kNaN;
    double slope_n_minus_printed = kNaN; ///< as typeset
    double slope_n_minus = kNaN;         ///< derivative of n_- at 0 obtained by differentiating n_-
    double asymptote_slope = kNaN;
    bool slope_singular = false;
    double eta_d = kNaN;

    double discriminant(double yd) const {
        const double B = eta_d + eta0;
        const double s = B * yd + eta0 * ye_minus;
        return s * s - 4.0 * eta0 * ye_plus * B * yd;
    }
    /// NaN where the discriminant is negative.
    double n_minus(double yd) const { return branch(yd, -1.0); }
    double n_plus(double yd) const { return branch(yd, +1.0); }

private:
    double branch(double yd, double sign) const {
        const double D = discriminant(yd);
        if (D < 0.0) return kNaN;
        return ((eta_d + eta0) * yd + eta0 * ye_minus + sign * std::sqrt(D)) / (2.0 * eta0);
    }
};

inline PhaseGeometry phase_geometry(const ModelParams& p) {
    if (!(p.eta_e > 0.0) || !(p.eta_d > 0.0)) throw DomainError("phase_geometry needs eta_e, eta_d > 0");
    PhaseGeometry g;
    g.eta_d = p.eta_d;
    g.eta0 = p.eta0();
    const double B = p.eta_d + g.eta0;
    g.ye_minus = (p.eta_e - p.eta_d) / g.eta0;
    g.ye_plus = p.eta_e / B;
    const double root = std::sqrt(g.ye_plus * (g.ye_plus - g.ye_minus));
    g.yd_minus = g.eta0 / B * (2.0 * g.ye_plus - g.ye_minus - 2.0 * root);
    g.yd_plus = g.eta0 / B * (2.0 * g.ye_plus - g.ye_minus + 2.0 * root);
    g.asymptote_slope = B / g.eta0;
    if (p.eta_e == p.eta_d) {
        g.slope_singular = true;
    } else {
        g.slope_n_minus_printed =
            B / g.eta0 * (1.5 + 2.0 * p.eta_d * (p.eta_d + g.eta0 - p.eta_e) / (B * (p.eta_e - p.eta_d)));
        g.slope_n_minus = p.eta_e / (p.eta_e - p.eta_d);
    }
    return g;
}

// ============================================================================
// Finite-time blow-up exponent
// ============================================================================

struct ExponentFit {
    double exponent = kNaN;
    double prefactor = kNaN;
    double t_star = kNaN;
    double r_squared = kNaN;
    double tau_lo = kNaN, tau_hi = kNaN;
    int samples = 0;
    bool low_confidence = true;
    std::string note;
};

/// Least squares of log h against log(t* - t).
inline ExponentFit fit_power_law(const std::vector<double>& t, const std::vector<double>& h, double t_star) {
    ExponentFit out;
    out.t_star = t_star;
    std::vector<double> X, Y;
    for (std::size_t k = 0; k < t.size(); ++k) {
        const double tau = t_star - t[k];
        if (tau > 0.0 && h[k] > 0.0) {
            X.push_back(std::log(tau));
            Y.push_back(std::log(h[k]));
        }
    }
    out.samples = static_cast<int>(X.size());
    if (X.size() < 3) {
        out.note = "fewer than three usable samples";
        return out;
    }
    const double n = static_cast<double>(X.size());
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < X.size(); ++k) {
        mx += X[k];
        my += Y[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t k = 0; k < X.size(); ++k) {
        sxx += (X[k] - mx) * (X[k] - mx);
        sxy += (X[k] - mx) * (Y[k] - my);
        syy += (Y[k] - my) * (Y[k] - my);
    }
    out.exponent = sxy / sxx;
    out.prefactor = std::exp(my - out.exponent * mx);
    out.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
    out.tau_lo = std::exp(*std::min_element(X.begin(), X.end()));
    out.tau_hi = std::exp(*std::max_element(X.begin(), X.end()));
    out.low_confidence = out.samples < 8;
    return out;
}

struct BlowupFitOptions {
    double guard_decades = 1.0; ///< skip the decade of tau closest to t*
    double fit_decades = 1.0;
    int samples = 60;
    int tstar_window = 8;
};

/// Exponent of h = 1/y_d along a short-run trajectory that ended in blow-up. The blow-up time
/// is extrapolated from 1/y_e = h x, which vanishes linearly; h is then fitted over one decade
/// of t* - t above a guard decade.
inline ExponentFit blowup_exponent_fit(const Trajectory& tr, const BlowupFitOptions& opt = {}) {
    ExponentFit out;
    if (!tr.ended_in_blowup()) {
        out.note = "trajectory did not blow up";
        return out;
    }
    const std::size_t n = tr.t.size();
    const std::size_t m = std::min<std::size_t>(static_cast<std::size_t>(opt.tstar_window), n);
    if (m < 3) {
        out.note = "too few samples near the singularity";
        return out;
    }
    double tb = 0, zb = 0;
    for (std::size_t k = n - m; k < n; ++k) {
        tb += tr.t[k];
        zb += 1.0 / tr.y[k][1];
    }
    tb /= double(m);
    zb /= double(m);
    double stt = 0, stz = 0;
    for (std::size_t k = n - m; k < n; ++k) {
        stt += (tr.t[k] - tb) * (tr.t[k] - tb);
        stz += (tr.t[k] - tb) * (1.0 / tr.y[k][1] - zb);
    }
    if (!(stz < 0.0)) {
        out.note = "1/y_e not decreasing at the end of the trajectory";
        return out;
    }
    const double t_star = tb - zb * stt / stz;
    const double tau_min = std::max(t_star - tr.t.back(), 1e-300);
    const double tau_lo = tau_min * std::pow(10.0, opt.guard_decades);
    const double tau_hi = tau_lo * std::pow(10.0, opt.fit_decades);
    if (t_star - tau_hi < tr.t.front()) {
        out = fit_power_law({}, {}, t_star);
        out.note = "trajectory too short for the requested window";
        return out;
    }
    std::vector<double> ts, hs;
    for (int k = 0; k < opt.samples; ++k) {
        const double tau = tau_lo * std::pow(tau_hi / tau_lo, double(k) / (opt.samples - 1));
        const double tq = t_star - tau;
        const Vec y = tr.interpolate(tq);
        ts.push_back(tq);
        hs.push_back(1.0 / y[0]);
    }
    out = fit_power_law(ts, hs, t_star);
    if (out.r_squared < 0.999) {
        out.low_confidence = true;
        out.note = "poor log-log linearity";
    }
    return out;
}

inline double blowup_exponent_closed_form(const ModelParams& p) { return (1.0 - p.gamma) * p.eta_q / p.eta0(); }

// ============================================================================
// Basins
// ============================================================================

enum class BasinLabel { ToBalanced, ToCollapse, BlowUp, Undecided };

inline std::string basin_label_name(BasinLabel b) {
    switch (b) {
    case BasinLabel::ToBalanced: return "to-(1,1)";
    case BasinLabel::ToCollapse: return "to-(0,0)";
    case BasinLabel::BlowUp: return "blow-up";
    case BasinLabel::Undecided: return "undecided";
    }
    return "?";
}

struct BasinGrid {
    double lo = 0.0, hi = 2.0;
    int n = 50; ///< cells per axis; cell centres are sampled
    double centre(int k) const { return lo + (hi - lo) * (k + 0.5) / n; }
};

struct BasinBudget {
    double t_max = 2000.0;
    double ball = 1e-3;
    SolverOptions solver{};
};

struct BasinMap {
    BasinGrid grid;
    std::vector<BasinLabel> labels; ///< row-major, index = i_yd * n + i_ye
    std::vector<double> end_times;
    BasinBudget budget;

    BasinLabel at(int i_yd, int i_ye) const { return labels[static_cast<std::size_t>(i_yd * grid.n + i_ye)]; }
    std::size_t count(BasinLabel b) const { return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), b)); }
};

inline BasinLabel classify_start(ModelVariant v, const ModelParams& p, const StateShortRun& s, const BasinBudget& b,
                                 double* t_end = nullptr) {
    const double ball = b.ball;
    std::vector<EventSpec> ev{
        {"to-(1,1)", [ball](double, const Vec& y) { return std::hypot(y[0] - 1.0, y[1] - 1.0) - ball; }, Direction::Falling, true},
        {"to-(0,0)", [ball](double, const Vec& y) { return std::hypot(y[0], y[1]) - ball; }, Direction::Falling, true}};
    BasinLabel label = BasinLabel::Undecided;
    if (std::hypot(s.y_d - 1.0, s.y_e - 1.0) < ball) label = BasinLabel::ToBalanced;
    else if (std::hypot(s.y_d, s.y_e) < ball) label = BasinLabel::ToCollapse;
    if (label != BasinLabel::Undecided) {
        if (t_end) *t_end = 0.0;
        return label;
    }
    SolverOptions opt = b.solver;
    opt.store_samples = false;
    const auto tr = integrate(make_core_field(v, p), s.to_vector(), 0.0, b.t_max, opt, ev);
    if (t_end) *t_end = tr.t.back();
    if (tr.termination == Termination::Event)
        return tr.termination_event == "to-(1,1)" ? BasinLabel::ToBalanced : BasinLabel::ToCollapse;
    if (tr.ended_in_blowup()) return BasinLabel::BlowUp;
    return BasinLabel::Undecided;
}

inline BasinMap basin_classify(const ModelParams& p, ModelVariant v, const BasinGrid& grid = {}, const BasinBudget& budget = {},
                               unsigned threads = 0) {
    if (v != ModelVariant::ShortRunA && v != ModelVariant::ShortRunB)
        throw PreconditionError("basin_classify: variant must be shortrun_a or shortrun_b");
    BasinMap out;
    out.grid = grid;
    out.budget = budget;
    const std::size_t N = static_cast<std::size_t>(grid.n) * static_cast<std::size_t>(grid.n);
    out.labels.assign(N, BasinLabel::Undecided);
    out.end_times.assign(N, kNaN);
    parallel_for(
        N,
        [&](std::size_t idx) {
            const int i = static_cast<int>(idx) / grid.n, j = static_cast<int>(idx) % grid.n;
            out.labels[idx] = classify_start(v, p, {grid.centre(i), grid.centre(j)}, budget, &out.end_times[idx]);
        },
        threads);
    return out;
}

} // namespace sfcinv
