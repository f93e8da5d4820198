#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "model.hpp"
#include "parallel.hpp"

namespace sfcinv {

// ============================================================================
// Damped Newton with multi-start
// ============================================================================

using ResidualFn = std::function<Vec(const Vec&)>;

struct NewtonOptions {
    double target = 1e-14;  ///< stop iterating below this sup-norm
    double accept = 1e-10;  ///< converged if final residual is below this
    int max_iter = 80;
    double fd_rel = 1e-6;
};

struct NewtonResult {
    Vec x;
    double residual = kInf;
    int iterations = 0;
    bool converged = false;
    Vec seed;
};

namespace detail {

inline bool try_eval(const ResidualFn& F, const Vec& x, Vec& out) {
    try {
        out = F(x);
    } catch (const DomainError&) {
        return false;
    } catch (const NoSolutionError&) {
        return false;
    }
    return out.allFinite();
}

inline bool fd_jacobian(const ResidualFn& F, const Vec& x, double rel, Mat& J) {
    const Eigen::Index n = x.size();
    Vec fp, fm;
    for (Eigen::Index j = 0; j < n; ++j) {
        const double h = rel * std::max(1.0, std::abs(x[j]));
        Vec xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        if (!try_eval(F, xp, fp) || !try_eval(F, xm, fm)) return false;
        if (j == 0) J.resize(fp.size(), n);
        J.col(j) = (fp - fm) / (2.0 * h);
    }
    return true;
}

} // namespace detail

/// Newton iteration with a finite-difference Jacobian and Armijo backtracking on |F|^2/2.
inline NewtonResult damped_newton(const ResidualFn& F, const Vec& x0, const NewtonOptions& opt = {}) {
    NewtonResult out;
    out.seed = x0;
    out.x = x0;
    Vec f;
    if (!detail::try_eval(F, x0, f)) return out;
    double res = f.lpNorm<Eigen::Infinity>();
    Mat J;
    for (int it = 0; it < opt.max_iter && res > opt.target; ++it) {
        out.iterations = it + 1;
        if (!detail::fd_jacobian(F, out.x, opt.fd_rel, J)) break;
        const Vec dx = J.fullPivLu().solve(-f);
        if (!dx.allFinite()) break;
        const double merit = 0.5 * f.squaredNorm();
        double t = 1.0;
        bool accepted = false;
        Vec xn, fn;
        while (t > 1e-12) {
            xn = out.x + t * dx;
            if (detail::try_eval(F, xn, fn) && 0.5 * fn.squaredNorm() <= merit * (1.0 - 2e-4 * t)) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) break;
        const double step = (xn - out.x).lpNorm<Eigen::Infinity>();
        out.x = xn;
        f = fn;
        res = f.lpNorm<Eigen::Infinity>();
        if (step <= 1e-16 * (1.0 + out.x.lpNorm<Eigen::Infinity>())) break;
    }
    out.residual = res;
    out.converged = res < opt.accept;
    return out;
}

/// Converged roots from all seeds, duplicates within merge_tol merged, sorted by coordinates.
inline std::vector<NewtonResult> multistart(const ResidualFn& F, const std::vector<Vec>& seeds, double merge_tol = 1e-6,
                                            const NewtonOptions& opt = {}) {
    std::vector<NewtonResult> all(seeds.size());
    parallel_for(seeds.size(), [&](std::size_t k) { all[k] = damped_newton(F, seeds[k], opt); });
    std::vector<NewtonResult> roots;
    for (auto& r : all) {
        if (!r.converged) continue;
        bool merged = false;
        for (auto& q : roots) {
            if ((q.x - r.x).lpNorm<Eigen::Infinity>() < merge_tol) {
                if (r.residual < q.residual) q = r;
                merged = true;
                break;
            }
        }
        if (!merged) roots.push_back(r);
    }
    std::sort(roots.begin(), roots.end(), [](const NewtonResult& a, const NewtonResult& b) {
        return std::lexicographical_compare(a.x.data(), a.x.data() + a.x.size(), b.x.data(), b.x.data() + b.x.size());
    });
    return roots;
}

/// Search region for (omega, d) seeds; roots outside it are reported but not certified.
struct SearchBox {
    double omega_max = 1.5;
    double d_max = 20.0;
    int n = 20;

    bool contains(double omega, double d) const {
        return omega > 0.0 && omega <= omega_max + 1e-12 && d >= -1e-12 && d <= d_max + 1e-12;
    }
};

inline std::vector<double> geometric_grid(double lo, double hi, int n) {
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) g[static_cast<std::size_t>(k)] = n == 1 ? hi : lo * std::pow(hi / lo, double(k) / (n - 1));
    return g;
}

inline std::vector<double> wage_seeds(const SearchBox& box) { return geometric_grid(1e-3, box.omega_max, box.n); }

inline std::vector<double> debt_seeds(const SearchBox& box) {
    std::vector<double> g{0.0};
    const auto rest = geometric_grid(1e-3, box.d_max, box.n - 1);
    g.insert(g.end(), rest.begin(), rest.end());
    return g;
}

/// Real roots of a x^2 + b x + c in increasing order, computed without cancellation.
inline std::vector<double> quadratic_roots(double a, double b, double c) {
    if (a == 0.0) {
        if (b == 0.0) return {};
        return {-c / b};
    }
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return {};
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    std::vector<double> r;
    if (q != 0.0) r = {q / a, c / q};
    else r = {0.0, 0.0};
    std::sort(r.begin(), r.end());
    return r;
}

// ============================================================================
// Reports
// ============================================================================

enum class EquilibriumKind { Interior, Trivial, DebtCrisis, Deflationary, MarketCollapse, BlowUp };

inline std::string kind_name(EquilibriumKind k) {
    switch (k) {
    case EquilibriumKind::Interior: return "interior";
    case EquilibriumKind::Trivial: return "trivial";
    case EquilibriumKind::DebtCrisis: return "debt-crisis";
    case EquilibriumKind::Deflationary: return "deflationary";
    case EquilibriumKind::MarketCollapse: return "market-collapse";
    case EquilibriumKind::BlowUp: return "blow-up";
    }
    return "unknown";
}

struct EquilibriumReport {
    ModelVariant variant = ModelVariant::Full5D;
    EquilibriumKind kind = EquilibriumKind::Interior;
    std::string label;
    std::vector<std::string> names;
    Vec coords;
    double residual = kNaN;
    bool certified = false;
    bool marker = false; ///< asymptotic state with infinite coordinates, no residual
    bool in_box = true;
    int iterations = 0;
    std::string seed;
    std::vector<std::string> notes;
    std::vector<std::pair<std::string, double>> values;

    double value(const std::string& key) const {
        for (const auto& [k, v] : values)
            if (k == key) return v;
        return kNaN;
    }
    bool has_note(const std::string& n) const { return std::find(notes.begin(), notes.end(), n) != notes.end(); }
};

inline constexpr double kCertifyTol = 1e-9;

/// Fills residual/certified from the variant's integrated field.
inline void certify(EquilibriumReport& rep, const ModelParams& p) {
    rep.names = integrated_names(rep.variant);
    if (rep.marker || !rep.coords.allFinite()) {
        rep.marker = true;
        rep.residual = kNaN;
        rep.certified = false;
        return;
    }
    try {
        rep.residual = integrated_field(rep.variant, p, rep.coords).lpNorm<Eigen::Infinity>();
    } catch (const DomainError& e) {
        rep.residual = kNaN;
        rep.notes.push_back(std::string("field undefined: ") + e.what());
    }
    rep.certified = std::isfinite(rep.residual) && rep.residual < kCertifyTol && rep.in_box;
    if (!rep.in_box && !rep.has_note("outside search box")) rep.notes.push_back("outside search box");
}

inline std::string seed_label(const Vec& s) {
    std::string out;
    char buf[40];
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%s%.6g", k ? "," : "", s[k]);
        out += buf;
    }
    return out;
}

/// Printed-versus-direct bookkeeping for the steady-growth debt ratio of the long-run monetary model.
struct QuadraticLedger {
    double pi_bar = kNaN;
    double A1 = kNaN, A2 = kNaN, A3 = kNaN, discriminant = kNaN;
    std::vector<double> printed_roots;
    double B1 = kNaN, B2 = kNaN, B3 = kNaN; ///< coefficients re-derived from the field
    std::vector<double> derived_roots;
    std::vector<double> direct_roots;
    std::vector<std::string> status; ///< per direct root: consistent | divergent
    std::vector<double> printed_residual; ///< |d-dot| of the field at each printed root
};

struct EquilibriumSet {
    std::vector<EquilibriumReport> reports;
    std::vector<std::string> diagnostics;
    std::optional<QuadraticLedger> quadratic;

    std::size_t count(EquilibriumKind k) const {
        return static_cast<std::size_t>(std::count_if(reports.begin(), reports.end(),
                                                      [k](const EquilibriumReport& r) { return r.kind == k; }));
    }
};

namespace detail {

inline EquilibriumReport make_report(ModelVariant v, EquilibriumKind k, std::string label, Vec coords) {
    EquilibriumReport r;
    r.variant = v;
    r.kind = k;
    r.label = std::move(label);
    r.coords = std::move(coords);
    return r;
}

inline Vec vec(std::initializer_list<double> xs) {
    Vec v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index k = 0;
    for (double x : xs) v[k++] = x;
    return v;
}

/// lambda with Phi(lambda) = target; nullopt (and a diagnostic) when no such lambda exists.
inline std::optional<double> employment_for(const ModelParams& p, double target, std::vector<std::string>& diag,
                                            const std::string& who) {
    try {
        return p.phillips.inverse(target);
    } catch (const NoSolutionError&) {
        diag.push_back(who + ": Phillips target " + std::to_string(target) + " below the range of Phi; no employment rate");
        return std::nullopt;
    }
}

inline double natural_output_ratio(const ModelParams& p) { return 1.0 / (1.0 + (p.alpha + p.beta) * p.f_d); }

} // namespace detail

// ============================================================================
// Full model
// ============================================================================

inline EquilibriumSet interior_full5d(const ModelParams& p, const SearchBox& box = {}) {
    EquilibriumSet set;
    if (p.growth.form == GrowthForm::Zero && p.alpha + p.beta != 0.0)
        throw NoSolutionError("no interior equilibrium: zero expected growth with alpha + beta != 0");
    const double Y0 = detail::natural_output_ratio(p);
    const double n = p.alpha + p.beta;
    auto F = [&](const Vec& x) {
        const double omega = x[0], d = x[1], u = x[2];
        if (!(u > 0.0)) throw DomainError("u <= 0");
        const double pi = Y0 * (1.0 - omega) - p.r * d;
        const double k = p.kappa(u, pi);
        const double theta = p.consumption(omega, d);
        const double i = p.markup_inflation(omega);
        return detail::vec({d * (n + i - p.r) - (omega - theta), k - p.nu * (n + p.depreciation(u)), theta + k / u - Y0});
    };
    std::vector<Vec> seeds;
    for (double w : wage_seeds(box))
        for (double d : debt_seeds(box)) {
            const double theta = p.consumption(w, d);
            const double gap = Y0 - theta;
            const double u = gap > 1e-3 ? p.nu * (n + p.depreciation(1.0)) / gap : 1.0;
            seeds.push_back(detail::vec({w, d, u}));
        }
    const auto roots = multistart(F, seeds);
    if (roots.empty()) throw NoSolutionError("no interior equilibrium found from any seed");
    for (const auto& r : roots) {
        const double omega = r.x[0], d = r.x[1], u = r.x[2];
        const double i = p.markup_inflation(omega);
        const auto lam = detail::employment_for(p, p.alpha + (1.0 - p.gamma) * i, set.diagnostics,
                                                "interior root omega=" + std::to_string(omega));
        if (!lam) continue;
        auto rep = detail::make_report(ModelVariant::Full5D, EquilibriumKind::Interior, "interior",
                                       detail::vec({omega, *lam, d, Y0, u}));
        rep.iterations = r.iterations;
        rep.seed = seed_label(r.seed);
        rep.in_box = box.contains(omega, d);
        const auto q = derived(p, StateFull5::from(rep.coords));
        rep.values = {{"y_d", q.y_d}, {"y_e", Y0}, {"v", q.v}, {"g", q.growth}, {"g_e", q.g_e},
                      {"pi_e", q.pi_e}, {"i", q.inflation}, {"kappa", q.kappa}};
        if (*lam >= 1.0) rep.notes.push_back("lambda >= 1");
        certify(rep, p);
        set.reports.push_back(std::move(rep));
    }
    return set;
}

// ============================================================================
// Goodwin, Keen, monetary Keen
// ============================================================================

inline EquilibriumSet equilibria_goodwin(const ModelParams& p) {
    EquilibriumSet set;
    const double delta = p.depreciation(1.0);
    const double omega = 1.0 - p.nu * (p.alpha + p.beta + delta);
    if (auto lam = detail::employment_for(p, p.alpha, set.diagnostics, "goodwin interior")) {
        auto rep = detail::make_report(ModelVariant::Goodwin, EquilibriumKind::Interior, "interior", detail::vec({omega, *lam}));
        rep.notes.push_back("non-hyperbolic centre surrounded by closed orbits");
        certify(rep, p);
        set.reports.push_back(std::move(rep));
    }
    auto zero = detail::make_report(ModelVariant::Goodwin, EquilibriumKind::Trivial, "trivial", detail::vec({0.0, 0.0}));
    certify(zero, p);
    set.reports.push_back(std::move(zero));
    return set;
}

namespace detail {

/// Keen-family interior points: kappa(pi) = nu(alpha+beta+delta), then the d-quadratic
/// eta_p m r d^2 - (alpha+beta+eta_p(m W0 - 1)) d + (K - pi) = 0 with W0 = 1 - pi.
inline void keen_interior(const ModelParams& p, ModelVariant v, EquilibriumSet& set) {
    const bool monetary = v == ModelVariant::MonetaryKeen;
    const double eta_p = monetary ? p.eta_p : 0.0;
    const double gamma = monetary ? p.gamma : 0.0;
    const double delta = p.depreciation(1.0);
    const double n = p.alpha + p.beta;
    const double K = p.nu * (n + delta);
    double pi;
    try {
        pi = p.kappa.inverse(K);
    } catch (const NoSolutionError& e) {
        set.diagnostics.push_back(std::string("interior: ") + e.what());
        return;
    }
    const double W0 = 1.0 - pi;
    const auto roots = quadratic_roots(eta_p * p.markup * p.r, -(n + eta_p * (p.markup * W0 - 1.0)), K - pi);
    if (roots.empty()) set.diagnostics.push_back("interior: debt quadratic has no real root");
    for (double d : roots) {
        const double omega = W0 - p.r * d;
        const double i = eta_p * (p.markup * omega - 1.0);
        const auto lam = employment_for(p, p.alpha + (1.0 - gamma) * i, set.diagnostics, "interior d=" + std::to_string(d));
        if (!lam) continue;
        auto rep = make_report(v, EquilibriumKind::Interior, "interior", vec({omega, *lam, d}));
        rep.values = {{"pi", pi}, {"i", i}};
        if (omega <= 0.0) rep.notes.push_back("omega <= 0");
        certify(rep, p);
        set.reports.push_back(std::move(rep));
    }
}

inline void keen_infinite_debt(const ModelParams& p, ModelVariant v, EquilibriumSet& set) {
    auto rep = make_report(v, EquilibriumKind::DebtCrisis, "(0,0,+inf)", vec({0.0, 0.0, kInf}));
    rep.marker = true;
    const double delta = p.depreciation(1.0);
    const double lim = p.kappa.lower_limit();
    const bool stable = lim < p.nu * (p.r + delta);
    rep.values = {{"kappa_lower_limit", lim}, {"nu_r_plus_delta", p.nu * (p.r + delta)}, {"potentially_stable", stable ? 1.0 : 0.0}};
    rep.notes.push_back(stable ? "lim kappa < nu(r+delta): locally stable" : "lim kappa >= nu(r+delta): not stable");
    certify(rep, p);
    set.reports.push_back(std::move(rep));
}

} // namespace detail

inline EquilibriumSet equilibria_keen(const ModelParams& p) {
    EquilibriumSet set;
    detail::keen_interior(p, ModelVariant::Keen, set);
    detail::keen_infinite_debt(p, ModelVariant::Keen, set);
    return set;
}

inline EquilibriumSet equilibria_monetary_keen(const ModelParams& p, const SearchBox& box = {}) {
    EquilibriumSet set;
    detail::keen_interior(p, ModelVariant::MonetaryKeen, set);
    detail::keen_infinite_debt(p, ModelVariant::MonetaryKeen, set);
    if (p.eta_p == 0.0 || p.gamma == 1.0) {
        set.diagnostics.push_back("deflationary family needs eta_p != 0 and gamma != 1");
        return set;
    }
    const double phi0 = p.phillips(0.0);
    const double omega3 = 1.0 / p.markup + (phi0 - p.alpha) / (p.markup * p.eta_p * (1.0 - p.gamma));
    const double i3 = p.markup_inflation(omega3);
    const double delta = p.depreciation(1.0);
    std::vector<Vec> seeds;
    for (double d : debt_seeds(box)) seeds.push_back(detail::vec({d}));
    const auto roots = multistart(
        [&](const Vec& x) {
            const double d = x[0];
            const double k = p.kappa(1.0 - omega3 - p.r * d);
            return detail::vec({d * (p.r - k / p.nu + delta - i3) + omega3 - 1.0 + k});
        },
        seeds);
    for (const auto& r : roots) {
        auto rep = detail::make_report(ModelVariant::MonetaryKeen, EquilibriumKind::Deflationary, "(omega3,0,d3)",
                                       detail::vec({omega3, 0.0, r.x[0]}));
        rep.iterations = r.iterations;
        rep.seed = seed_label(r.seed);
        rep.in_box = box.contains(omega3, r.x[0]);
        rep.values = {{"i", i3}};
        certify(rep, p);
        set.reports.push_back(std::move(rep));
    }
    auto inf = detail::make_report(ModelVariant::MonetaryKeen, EquilibriumKind::Deflationary, "(omega3,0,+inf)",
                                   detail::vec({omega3, 0.0, kInf}));
    inf.marker = true;
    inf.values = {{"i", i3}};
    certify(inf, p);
    set.reports.push_back(std::move(inf));
    return set;
}

// ============================================================================
// Long-run fixed-utilization systems
// ============================================================================

namespace detail {

inline double printed_A1(const ModelParams& p) { return p.eta_p * p.r * p.markup; }

inline double printed_A2(const ModelParams& p, double pi, double delta) {
    const auto& c = p.consumption;
    return p.eta_p * (1.0 - p.markup * (1.0 - pi)) - p.eta_q * p.nu * (p.alpha + p.beta + delta) +
           (p.eta_q - 1.0) * (c.c1 * p.r - c.c2);
}

inline double printed_A3(const ModelParams& p, double pi) { return (1.0 - pi) * (1.0 - p.consumption.c1 * (p.eta_q + 1.0)); }

/// Inventory ratio at a stationary point of the fixed-utilization systems.
inline double stationary_inventory(const ModelParams& p, double omega, double d, std::vector<std::string>& notes) {
    const double pi = 1.0 - omega - p.r * d;
    const double ge = longrun_growth_expectation(p, p.u0, pi);
    const double yd = longrun_demand(p, omega, d);
    if (ge == 0.0) {
        notes.push_back("g_e = 0: inventory ratio not stationary");
        return kNaN;
    }
    return (1.0 - yd) / ge;
}

inline double longrun_d_residual(const ModelParams& p, double omega, double d) {
    return vf_longrun_monetary3d(p, {omega, 0.0, d}).d;
}

} // namespace detail

/// Steady-growth, debt-crisis, deflationary and trivial points of the fixed-utilization model.
/// The real variant is the same computation with eta_p = eta_q = gamma = 0.
inline EquilibriumSet longrun_monetary_equilibria(const ModelParams& p_in, ModelVariant v = ModelVariant::LongRunMonetary3D,
                                                  const SearchBox& box = {}) {
    ModelParams p = p_in;
    if (v == ModelVariant::LongRunReal3D) p.eta_p = p.eta_q = p.gamma = 0.0;
    EquilibriumSet set;
    const double delta = p.depreciation(p.u0);
    const double n = p.alpha + p.beta;
    const double K = p.nu * (n + delta);
    const auto& c = p.consumption;

    auto add = [&](EquilibriumKind kind, const std::string& label, double omega, double lam, double d, const NewtonResult* r) {
        EquilibriumReport rep;
        rep.variant = v;
        rep.kind = kind;
        rep.label = label;
        std::vector<std::string> notes;
        const double vbar = detail::stationary_inventory(p, omega, d, notes);
        rep.coords = detail::vec({omega, lam, d, vbar});
        rep.notes = notes;
        if (r) {
            rep.iterations = r->iterations;
            rep.seed = seed_label(r->seed);
        }
        rep.in_box = kind == EquilibriumKind::Trivial || box.contains(std::max(omega, 1e-300), d);
        rep.values = {{"i", longrun_inflation(p, omega, d)}, {"y_d", longrun_demand(p, omega, d)}};
        return rep;
    };

    // (a) steady growth
    QuadraticLedger led;
    try {
        led.pi_bar = p.kappa.inverse(K);
    } catch (const NoSolutionError& e) {
        set.diagnostics.push_back(std::string("steady growth: ") + e.what());
    }
    if (std::isfinite(led.pi_bar)) {
        const double pi = led.pi_bar;
        const double W0 = 1.0 - pi;
        led.A1 = detail::printed_A1(p);
        led.A2 = detail::printed_A2(p, pi, delta);
        led.A3 = detail::printed_A3(p, pi);
        led.discriminant = led.A2 * led.A2 - 4.0 * led.A1 * led.A3;
        if (led.A1 == 0.0) set.diagnostics.push_back("printed quadratic: A1 = 0, root formula undefined");
        else if (led.discriminant < 0.0) set.diagnostics.push_back("printed quadratic: negative discriminant, no real root");
        else {
            const double s = std::sqrt(led.discriminant);
            led.printed_roots = {(-led.A2 - s) / (2.0 * led.A1), (-led.A2 + s) / (2.0 * led.A1)};
        }
        for (double d : led.printed_roots) led.printed_residual.push_back(std::abs(detail::longrun_d_residual(p, W0 - p.r * d, d)));
        led.B1 = p.eta_p * p.markup * p.r + p.eta_q * (c.c1 * p.r - c.c2);
        led.B2 = c.c1 * p.r - c.c2 - n - p.eta_p * (p.markup * W0 - 1.0) - p.eta_q * (c.c1 * W0 + K / p.u0 - 1.0);
        led.B3 = (1.0 - c.c1) * W0;
        led.derived_roots = quadratic_roots(led.B1, led.B2, led.B3);

        std::vector<Vec> seeds;
        for (double d : debt_seeds(box)) seeds.push_back(detail::vec({d}));
        const auto roots = multistart([&](const Vec& x) { return detail::vec({detail::longrun_d_residual(p, W0 - p.r * x[0], x[0])}); },
                                      seeds, 1e-8);
        for (const auto& r : roots) {
            const double d = r.x[0];
            const double omega = W0 - p.r * d;
            led.direct_roots.push_back(d);
            bool agree = false;
            for (double q : led.printed_roots) agree = agree || std::abs(q - d) <= 1e-8 * std::max(1.0, std::abs(d));
            led.status.push_back(agree ? "consistent" : "divergent");
            const double i = longrun_inflation(p, omega, d);
            const auto lam = detail::employment_for(p, p.alpha + (1.0 - p.gamma) * i, set.diagnostics,
                                                    "steady growth d=" + std::to_string(d));
            if (!lam) continue;
            auto rep = add(EquilibriumKind::Interior, "steady-growth", omega, *lam, d, &r);
            const double yd = longrun_demand(p, omega, d);
            rep.values.push_back({"pi", pi});
            rep.values.push_back({"v_bar_formula", (1.0 - c.c1 * omega - c.c2 * d - K / p.u0) / n});
            const double denom = 1.0 - c.c1 * omega - c.c2 * d;
            rep.values.push_back({"u0_lower_bound", denom > 0.0 ? K / denom : kInf});
            rep.values.push_back({"printed_quadratic_agrees", agree ? 1.0 : 0.0});
            if (!(omega > 0.0)) rep.notes.push_back("omega <= 0: d above (1-pi)/r");
            if (yd > 1.0) rep.notes.push_back("y_d > 1: not economically meaningful");
            if (i <= 0.0) rep.notes.push_back("i <= 0");
            certify(rep, p);
            set.reports.push_back(std::move(rep));
        }
    }
    set.quadratic = led;

    // (b) debt crisis (0,0,d2)
    {
        std::vector<Vec> seeds;
        for (double d : debt_seeds(box))
            if (d > 0.0) seeds.push_back(detail::vec({d}));
        auto F = [&](const Vec& x) {
            const double d = x[0];
            const double k = p.kappa(p.u0, 1.0 - p.r * d);
            return detail::vec({p.r - c.c2 - k / p.nu + delta - longrun_inflation(p, 0.0, d)});
        };
        for (const auto& r : multistart(F, seeds, 1e-8)) {
            auto rep = add(EquilibriumKind::DebtCrisis, "(0,0,d2)", 0.0, 0.0, r.x[0], &r);
            rep.in_box = r.x[0] >= 0.0 && r.x[0] <= box.d_max + 1e-12;
            certify(rep, p);
            set.reports.push_back(std::move(rep));
        }
    }
    if (v == ModelVariant::LongRunReal3D) {
        EquilibriumReport rep;
        rep.variant = v;
        rep.kind = EquilibriumKind::DebtCrisis;
        rep.label = "(0,0,+inf)";
        rep.coords = detail::vec({0.0, 0.0, kInf, c.c2 > 0.0 ? -kInf : kNaN});
        rep.marker = true;
        if (c.c2 > 0.0) rep.notes.push_back("c2 > 0: y_d -> +inf and v -> -inf, not economically meaningful");
        certify(rep, p);
        set.reports.push_back(std::move(rep));
    } else if (c.c2 == 0.0) {
        set.diagnostics.push_back("c2 = 0: no wealth effect, an infinite-debt state is not excluded");
    }

    // (c) deflationary (omega3, 0, d3)
    if (p.gamma != 1.0 && (p.eta_p != 0.0 || p.eta_q != 0.0)) {
        const double target = (p.phillips(0.0) - p.alpha) / (1.0 - p.gamma);
        auto F = [&](const Vec& x) {
            return detail::vec({longrun_inflation(p, x[0], x[1]) - target, detail::longrun_d_residual(p, x[0], x[1])});
        };
        std::vector<Vec> seeds;
        for (double w : wage_seeds(box))
            for (double d : debt_seeds(box)) seeds.push_back(detail::vec({w, d}));
        for (const auto& r : multistart(F, seeds)) {
            if (r.x[1] == 0.0 && r.x[0] == 0.0) continue;
            auto rep = add(EquilibriumKind::Deflationary, "(omega3,0,d3)", r.x[0], 0.0, r.x[1], &r);
            certify(rep, p);
            set.reports.push_back(std::move(rep));
        }
    }

    // (d) trivial
    {
        auto rep = add(EquilibriumKind::Trivial, "(0,0,0)", 0.0, 0.0, 0.0, nullptr);
        rep.values.push_back({"g_e_at_pi_1", longrun_growth_expectation(p, p.u0, 1.0)});
        certify(rep, p);
        set.reports.push_back(std::move(rep));
    }
    return set;
}

/// Four-dimensional long-run system. With natural expected growth lambda-dot vanishes identically
/// and stationarity of inventories pins y_d = 1; with capital-growth expectations u is frozen and
/// the fixed-utilization points are returned at u = u0.
inline EquilibriumSet longrun4d_equilibria(const ModelParams& p, const SearchBox& box = {}) {
    EquilibriumSet set;
    if (p.growth.form == GrowthForm::CapitalGrowth) {
        const auto three = longrun_monetary_equilibria(p, ModelVariant::LongRunMonetary3D, box);
        set.diagnostics = three.diagnostics;
        set.quadratic = three.quadratic;
        for (const auto& r3 : three.reports) {
            EquilibriumReport r = r3;
            r.variant = ModelVariant::LongRun4D;
            r.coords = detail::vec({r3.coords[0], r3.coords[1], r3.coords[2], p.u0, r3.coords[3]});
            r.notes.push_back("u frozen at u0");
            certify(r, p);
            set.reports.push_back(std::move(r));
        }
        return set;
    }
    if (p.growth.form == GrowthForm::Zero) throw PreconditionError("long-run 4D equilibria need a non-zero growth expectation");
    const double n = p.alpha + p.beta;
    auto F = [&](const Vec& x) {
        const double omega = x[0], d = x[1], u = x[2];
        if (!(u > 0.0)) throw DomainError("u <= 0");
        const double pi = 1.0 - omega - p.r * d;
        const double k = p.kappa(u, pi);
        const double i = p.markup_inflation(omega);
        const double theta = p.consumption(omega, d);
        return detail::vec({d * (p.r - n - i) + omega - theta, k - p.nu * (n + p.depreciation(u)), theta + k / u - 1.0});
    };
    std::vector<Vec> seeds;
    for (double w : wage_seeds(box))
        for (double d : debt_seeds(box)) {
            const double gap = 1.0 - p.consumption(w, d);
            seeds.push_back(detail::vec({w, d, gap > 1e-3 ? p.nu * (n + p.depreciation(1.0)) / gap : 1.0}));
        }
    for (const auto& r : multistart(F, seeds)) {
        const double omega = r.x[0], d = r.x[1], u = r.x[2];
        const auto lam = detail::employment_for(p, p.alpha + (1.0 - p.gamma) * p.markup_inflation(omega), set.diagnostics,
                                                "long-run 4D omega=" + std::to_string(omega));
        if (!lam) continue;
        auto rep = detail::make_report(ModelVariant::LongRun4D, EquilibriumKind::Interior, "steady-growth",
                                       detail::vec({omega, *lam, d, u, 0.0}));
        rep.iterations = r.iterations;
        rep.seed = seed_label(r.seed);
        rep.in_box = box.contains(omega, d);
        rep.notes.push_back("lambda-dot vanishes identically; lambda pinned by the wage equation");
        certify(rep, p);
        set.reports.push_back(std::move(rep));
    }
    return set;
}

// ============================================================================
// Inventory reduction and short-run systems
// ============================================================================

inline EquilibriumSet franke2d_equilibria(const ModelParams& p) {
    EquilibriumSet set;
    const double Y0 = detail::natural_output_ratio(p);
    const double ub = p.franke.u_bar;
    auto rep = detail::make_report(ModelVariant::Franke2D, EquilibriumKind::Interior, "interior",
                                   detail::vec({p.f_d * Y0 * ub, Y0 * ub}));
    rep.values = {{"u", ub}, {"y_e", Y0}};
    certify(rep, p);
    set.reports.push_back(std::move(rep));
    auto zero = detail::make_report(ModelVariant::Franke2D, EquilibriumKind::Trivial, "trivial", detail::vec({0.0, 0.0}));
    certify(zero, p);
    set.reports.push_back(std::move(zero));
    return set;
}

inline EquilibriumSet shortrun_equilibria(const ModelParams& p, ModelVariant v = ModelVariant::ShortRunA) {
    EquilibriumSet set;
    if (v == ModelVariant::ShortRunInverse) {
        auto one = detail::make_report(v, EquilibriumKind::Interior, "balanced", detail::vec({1.0, 1.0}));
        certify(one, p);
        set.reports.push_back(std::move(one));
        auto up = detail::make_report(v, EquilibriumKind::BlowUp, "h -> 0", detail::vec({0.0, kNaN}));
        up.marker = true;
        up.notes.push_back("finite-time blow-up of (y_d, y_e) corresponds to h reaching zero");
        certify(up, p);
        set.reports.push_back(std::move(up));
        return set;
    }
    auto one = detail::make_report(v, EquilibriumKind::Interior, "balanced", detail::vec({1.0, 1.0}));
    one.values = {{"inflation", 0.0}, {"growth", 0.0}, {"v", p.f_d}};
    certify(one, p);
    set.reports.push_back(std::move(one));
    auto zero = detail::make_report(v, EquilibriumKind::MarketCollapse, "collapse", detail::vec({0.0, 0.0}));
    certify(zero, p);
    set.reports.push_back(std::move(zero));
    auto up = detail::make_report(v, EquilibriumKind::BlowUp, "(+inf,+inf)", detail::vec({kInf, kInf}));
    up.marker = true;
    up.notes.push_back("finite-time blow-up; asymptotic state, not a coordinate equilibrium");
    certify(up, p);
    set.reports.push_back(std::move(up));
    return set;
}

/// Zero-growth five-dimensional economy: stationary points form a one-parameter family in u;
/// the member at u = u0 is returned.
inline EquilibriumSet shortrun5d_equilibria(const ModelParams& p, const SearchBox& box = {}) {
    EquilibriumSet set;
    const double u = p.u0;
    const double replacement = p.nu * p.depreciation(u) / u;
    auto F = [&](const Vec& x) {
        const double omega = x[0], d = x[1];
        const double theta = p.consumption(omega, d);
        return detail::vec({theta + replacement - 1.0, d * (p.r - p.markup_inflation(omega)) + omega - theta});
    };
    std::vector<Vec> seeds;
    for (double w : wage_seeds(box))
        for (double d : debt_seeds(box)) seeds.push_back(detail::vec({w, d}));
    for (const auto& r : multistart(F, seeds)) {
        const double omega = r.x[0], d = r.x[1];
        const auto lam = detail::employment_for(p, (1.0 - p.gamma) * p.markup_inflation(omega), set.diagnostics,
                                                "zero-growth omega=" + std::to_string(omega));
        if (!lam) continue;
        auto rep = detail::make_report(ModelVariant::ShortRun5D, EquilibriumKind::Interior, "balanced",
                                       detail::vec({omega, *lam, d, 1.0, u}));
        rep.iterations = r.iterations;
        rep.seed = seed_label(r.seed);
        rep.in_box = box.contains(omega, d);
        rep.notes.push_back("member of a one-parameter family, taken at u = u0");
        certify(rep, p);
        set.reports.push_back(std::move(rep));
    }
    if (set.reports.empty()) set.diagnostics.push_back("no stationary point at u = u0");
    return set;
}

inline EquilibriumSet find_equilibria(ModelVariant v, const ModelParams& p, const SearchBox& box = {}) {
    switch (v) {
    case ModelVariant::Full5D: return interior_full5d(p, box);
    case ModelVariant::Goodwin: return equilibria_goodwin(p);
    case ModelVariant::Keen: return equilibria_keen(p);
    case ModelVariant::MonetaryKeen: return equilibria_monetary_keen(p, box);
    case ModelVariant::Franke2D: return franke2d_equilibria(p);
    case ModelVariant::LongRun4D: return longrun4d_equilibria(p, box);
    case ModelVariant::LongRunReal3D:
    case ModelVariant::LongRunMonetary3D: return longrun_monetary_equilibria(p, v, box);
    case ModelVariant::ShortRun5D: return shortrun5d_equilibria(p, box);
    case ModelVariant::ShortRunA:
    case ModelVariant::ShortRunB:
    case ModelVariant::ShortRunInverse: return shortrun_equilibria(p, v);
    }
    return {};
}

} // namespace sfcinv
