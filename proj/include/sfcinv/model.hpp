#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "behavior.hpp"
#include "errors.hpp"

namespace sfcinv {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Autonomous fields are wrapped with an ignored t argument.
using VectorField = std::function<Vec(double, const Vec&)>;

// ============================================================================
// Variants and states
// ============================================================================

enum class ModelVariant {
    Full5D,
    Goodwin,
    Keen,
    MonetaryKeen,
    Franke2D,
    LongRun4D,
    LongRunReal3D,
    LongRunMonetary3D,
    ShortRun5D,
    ShortRunA,
    ShortRunB,
    ShortRunInverse
};

inline constexpr std::array<ModelVariant, 12> kAllVariants = {
    ModelVariant::Full5D,        ModelVariant::Goodwin,       ModelVariant::Keen,
    ModelVariant::MonetaryKeen,  ModelVariant::Franke2D,      ModelVariant::LongRun4D,
    ModelVariant::LongRunReal3D, ModelVariant::LongRunMonetary3D, ModelVariant::ShortRun5D,
    ModelVariant::ShortRunA,     ModelVariant::ShortRunB,     ModelVariant::ShortRunInverse};

inline std::string_view variant_name(ModelVariant v) {
    switch (v) {
    case ModelVariant::Full5D: return "full5d";
    case ModelVariant::Goodwin: return "goodwin";
    case ModelVariant::Keen: return "keen";
    case ModelVariant::MonetaryKeen: return "monetary_keen";
    case ModelVariant::Franke2D: return "franke2d";
    case ModelVariant::LongRun4D: return "longrun4d";
    case ModelVariant::LongRunReal3D: return "longrun_real3d";
    case ModelVariant::LongRunMonetary3D: return "longrun_monetary3d";
    case ModelVariant::ShortRun5D: return "shortrun5d";
    case ModelVariant::ShortRunA: return "shortrun_a";
    case ModelVariant::ShortRunB: return "shortrun_b";
    case ModelVariant::ShortRunInverse: return "shortrun_inverse";
    }
    return "?";
}

inline ModelVariant parse_variant(std::string_view name) {
    for (auto v : kAllVariants)
        if (variant_name(v) == name) return v;
    throw ParseError("model.variant", "unknown variant '" + std::string(name) + "'");
}

/// Names of the core state components (the coordinates equilibria live in).
inline std::vector<std::string> state_names(ModelVariant v) {
    switch (v) {
    case ModelVariant::Full5D:
    case ModelVariant::ShortRun5D: return {"omega", "lambda", "d", "y_e", "u"};
    case ModelVariant::Goodwin: return {"omega", "lambda"};
    case ModelVariant::Keen:
    case ModelVariant::MonetaryKeen:
    case ModelVariant::LongRunReal3D:
    case ModelVariant::LongRunMonetary3D: return {"omega", "lambda", "d"};
    case ModelVariant::Franke2D: return {"v_F", "z_F"};
    case ModelVariant::LongRun4D: return {"omega", "lambda", "d", "u"};
    case ModelVariant::ShortRunA:
    case ModelVariant::ShortRunB: return {"y_d", "y_e"};
    case ModelVariant::ShortRunInverse: return {"h", "x"};
    }
    return {};
}

/// Long-run variants carry the inventory ratio as an extra integrated state.
inline bool has_aux_inventory(ModelVariant v) {
    return v == ModelVariant::LongRun4D || v == ModelVariant::LongRunReal3D || v == ModelVariant::LongRunMonetary3D;
}

/// Names of the integrated components (core plus auxiliary inventory ratio).
inline std::vector<std::string> integrated_names(ModelVariant v) {
    auto names = state_names(v);
    if (has_aux_inventory(v)) names.push_back("v");
    return names;
}

struct StateFull5 {
    double omega = 0, lambda = 0, d = 0, y_e = 0, u = 0;
    Vec to_vector() const { return (Vec(5) << omega, lambda, d, y_e, u).finished(); }
    static StateFull5 from(const Vec& y) { return {y[0], y[1], y[2], y[3], y[4]}; }
};

struct StateGoodwin {
    double omega = 0, lambda = 0;
    Vec to_vector() const { return (Vec(2) << omega, lambda).finished(); }
    static StateGoodwin from(const Vec& y) { return {y[0], y[1]}; }
};

/// (omega, lambda, d): Keen, monetary Keen and both long-run 3D variants.
struct StateKeen {
    double omega = 0, lambda = 0, d = 0;
    Vec to_vector() const { return (Vec(3) << omega, lambda, d).finished(); }
    static StateKeen from(const Vec& y) { return {y[0], y[1], y[2]}; }
};

struct StateLongRun4 {
    double omega = 0, lambda = 0, d = 0, u = 0;
    Vec to_vector() const { return (Vec(4) << omega, lambda, d, u).finished(); }
    static StateLongRun4 from(const Vec& y) { return {y[0], y[1], y[2], y[3]}; }
};

/// Capital-normalized inventory and expected sales of the 2D reduction.
struct StateFranke {
    double v = 0, z = 0;
    Vec to_vector() const { return (Vec(2) << v, z).finished(); }
    static StateFranke from(const Vec& y) { return {y[0], y[1]}; }
};

struct StateShortRun {
    double y_d = 0, y_e = 0;
    Vec to_vector() const { return (Vec(2) << y_d, y_e).finished(); }
    static StateShortRun from(const Vec& y) { return {y[0], y[1]}; }
};

/// (h, x) = (1/y_d, y_d/y_e).
struct StateInverse {
    double h = 0, x = 0;
    Vec to_vector() const { return (Vec(2) << h, x).finished(); }
    static StateInverse from(const Vec& y) { return {y[0], y[1]}; }
};

struct DerivedQuantities {
    double pi_e = kNaN;
    double y_d = kNaN;
    double inflation = kNaN;
    double growth = kNaN;
    double v = kNaN; ///< NaN when eta_d = 0
    double y_n_ratio = kNaN;
    double g_e = kNaN;
    double kappa = kNaN;
    double theta = kNaN;
    double delta = kNaN;
};

// ============================================================================
// Full model
// ============================================================================

namespace detail {

struct FullRates {
    DerivedQuantities q;
    StateFull5 dot;
};

/// Shared right-hand side of the five-dimensional system. kappa_fn(u, pi) supplies
/// the investment share so the zero-growth variant can substitute nu*delta(u).
template <class KappaFn>
FullRates full_rates(const ModelParams& p, const StateFull5& s, KappaFn&& kappa_fn) {
    if (!(s.u > 0.0)) throw DomainError("utilization must be positive, got " + std::to_string(s.u));
    FullRates out;
    auto& q = out.q;
    q.pi_e = s.y_e * (1.0 - s.omega) - p.r * s.d;
    q.kappa = kappa_fn(s.u, q.pi_e);
    q.delta = p.depreciation(s.u);
    q.theta = p.consumption(s.omega, s.d);
    q.y_d = q.theta + q.kappa / s.u;
    q.inflation = p.markup_inflation(s.omega) + p.eta_q * (q.y_d - s.y_e);
    q.g_e = p.growth(p.alpha, p.beta, p.nu, q.kappa, q.delta);
    const double A = p.f_d * (q.g_e + p.eta_d) + 1.0;
    q.growth = A * (s.y_e * q.g_e + p.eta_e * (q.y_d - s.y_e)) + p.eta_d * (q.y_d - 1.0);
    q.v = p.eta_d != 0.0 ? (A * s.y_e - 1.0) / p.eta_d : kNaN;
    q.y_n_ratio = (1.0 - s.omega) * q.y_d + s.omega;

    auto& f = out.dot;
    f.omega = s.omega * (p.phillips(s.lambda) - p.alpha - (1.0 - p.gamma) * q.inflation);
    f.lambda = s.lambda * (q.growth - (p.alpha + p.beta));
    f.d = s.d * (p.r - q.growth - q.inflation) + s.omega - q.theta;
    f.y_e = s.y_e * (q.g_e - q.growth) + p.eta_e * (q.y_d - s.y_e);
    f.u = s.u * (q.growth - q.kappa / p.nu + q.delta);
    return out;
}

inline ModelParams shortrun_params(const ModelParams& p) {
    ModelParams z = p;
    z.alpha = 0.0;
    z.beta = 0.0;
    z.growth.form = GrowthForm::Zero;
    return z;
}

} // namespace detail

inline DerivedQuantities derived(const ModelParams& p, const StateFull5& s) {
    return detail::full_rates(p, s, [&](double u, double pi) { return p.kappa(u, pi); }).q;
}

inline StateFull5 vf_full5d(const ModelParams& p, const StateFull5& s) {
    return detail::full_rates(p, s, [&](double u, double pi) { return p.kappa(u, pi); }).dot;
}

/// Zero-growth economy: alpha = beta = 0, g_e = 0 and replacement investment kappa = nu*delta(u).
inline StateFull5 vf_shortrun5d(const ModelParams& p, const StateFull5& s) {
    const ModelParams z = detail::shortrun_params(p);
    return detail::full_rates(z, s, [&](double u, double) { return z.nu * z.depreciation(u); }).dot;
}

inline DerivedQuantities derived_shortrun5d(const ModelParams& p, const StateFull5& s) {
    const ModelParams z = detail::shortrun_params(p);
    return detail::full_rates(z, s, [&](double u, double) { return z.nu * z.depreciation(u); }).q;
}

// ============================================================================
// Goodwin and Keen families (y_e = 1, u = 1)
// ============================================================================

inline StateGoodwin vf_goodwin(const ModelParams& p, const StateGoodwin& s) {
    const double delta = p.depreciation(1.0);
    return {s.omega * (p.phillips(s.lambda) - p.alpha),
            s.lambda * ((1.0 - s.omega) / p.nu - p.alpha - p.beta - delta)};
}

/// H = F(lambda) - G(omega), constant along Goodwin orbits.
inline double goodwin_first_integral(const ModelParams& p, const StateGoodwin& s) {
    if (!(s.omega > 0.0)) throw DomainError("first integral needs omega > 0");
    const double delta = p.depreciation(1.0);
    const double G = (1.0 / p.nu - p.alpha - p.beta - delta) * std::log(s.omega) - s.omega / p.nu;
    return p.phillips.integral_over_lambda(s.lambda, p.alpha) - G;
}

inline StateKeen vf_monetary_keen(const ModelParams& p, const StateKeen& s) {
    const double delta = p.depreciation(1.0);
    const double pi = 1.0 - s.omega - p.r * s.d;
    const double k = p.kappa(1.0, pi);
    const double i = p.markup_inflation(s.omega);
    return {s.omega * (p.phillips(s.lambda) - p.alpha - (1.0 - p.gamma) * i),
            s.lambda * (k / p.nu - p.alpha - p.beta - delta),
            s.d * (p.r - k / p.nu + delta - i) + s.omega - 1.0 + k};
}

inline StateKeen vf_keen(const ModelParams& p, const StateKeen& s) {
    ModelParams real = p;
    real.eta_p = 0.0;
    real.gamma = 0.0;
    return vf_monetary_keen(real, s);
}

/// Debt ratio of the interior Keen point expressed through its wage share.
inline double keen_equilibrium_debt(const ModelParams& p, double omega_bar) {
    const double delta = p.depreciation(1.0);
    return (omega_bar - 1.0 + p.nu * (p.alpha + p.beta + delta)) / (p.alpha + p.beta - p.r);
}

// ============================================================================
// Two-dimensional inventory reduction (capital-normalized)
// ============================================================================

/// Calibrated affine behaviour functions (h0, e0 filled in when NaN).
inline FrankeForms franke_forms(const ModelParams& p) {
    FrankeForms f = p.franke;
    const double delta = p.depreciation(1.0);
    const double ybar = 1.0 / (1.0 + (p.alpha + p.beta) * p.f_d);
    if (std::isnan(f.h0)) f.h0 = p.alpha + p.beta + delta - f.h1 * f.u_bar;
    if (std::isnan(f.e0)) f.e0 = ybar - 1.0 + f.e1 * f.u_bar;
    return f;
}

inline double franke_utilization(const ModelParams& p, const StateFranke& s) {
    return (1.0 + p.f_d * (p.alpha + p.beta + p.eta_d)) * s.z - p.eta_d * s.v;
}

inline StateFranke vf_franke2d(const ModelParams& p, const StateFranke& s) {
    const FrankeForms f = franke_forms(p);
    const double delta = p.depreciation(1.0);
    const double uF = franke_utilization(p, s);
    const double h = f.h0 + f.h1 * uF;
    const double e = f.e0 - f.e1 * uF;
    return {-e * uF - s.v * (h - delta),
            s.z * (p.alpha + p.beta - h + delta) + p.eta_e * ((e + 1.0) * uF - s.z)};
}

// ============================================================================
// Long-run systems (y_e = 1, eta_e = eta_d = f_d = 0)
// ============================================================================

inline double longrun_growth_expectation(const ModelParams& p, double u, double pi) {
    return p.growth(p.alpha, p.beta, p.nu, p.kappa(u, pi), p.depreciation(u));
}

inline StateLongRun4 vf_longrun4d(const ModelParams& p, const StateLongRun4& s) {
    if (!(s.u > 0.0)) throw DomainError("utilization must be positive");
    const double pi = 1.0 - s.omega - p.r * s.d;
    const double k = p.kappa(s.u, pi);
    const double delta = p.depreciation(s.u);
    const double ge = p.growth(p.alpha, p.beta, p.nu, k, delta);
    const double theta = p.consumption(s.omega, s.d);
    const double yd = theta + k / s.u;
    const double i = p.markup_inflation(s.omega) + p.eta_q * (yd - 1.0);
    return {s.omega * (p.phillips(s.lambda) - p.alpha - (1.0 - p.gamma) * i),
            s.lambda * (ge - (p.alpha + p.beta)),
            s.d * (p.r - ge - i) + s.omega - theta,
            s.u * (ge - (k / p.nu - delta))};
}

inline double longrun4d_demand(const ModelParams& p, const StateLongRun4& s) {
    const double pi = 1.0 - s.omega - p.r * s.d;
    return p.consumption(s.omega, s.d) + p.kappa(s.u, pi) / s.u;
}

/// Inventory-to-output ratio dynamics when it can no longer be read off algebraically.
inline double aux_v_ode(const ModelParams& p, const StateLongRun4& s, double v) {
    const double pi = 1.0 - s.omega - p.r * s.d;
    return (1.0 - longrun4d_demand(p, s)) - longrun_growth_expectation(p, s.u, pi) * v;
}

/// Effective demand at fixed utilization u0.
inline double longrun_demand(const ModelParams& p, double omega, double d) {
    const double pi = 1.0 - omega - p.r * d;
    return p.consumption(omega, d) + p.kappa(p.u0, pi) / p.u0;
}

/// i(omega, d) = eta_p (m omega - 1) + eta_q (y_d - 1) at fixed utilization.
inline double longrun_inflation(const ModelParams& p, double omega, double d) {
    return p.markup_inflation(omega) + p.eta_q * (longrun_demand(p, omega, d) - 1.0);
}

inline StateKeen vf_longrun_monetary3d(const ModelParams& p, const StateKeen& s) {
    const double pi = 1.0 - s.omega - p.r * s.d;
    const double k = p.kappa(p.u0, pi);
    const double delta = p.depreciation(p.u0);
    const double i = longrun_inflation(p, s.omega, s.d);
    return {s.omega * (p.phillips(s.lambda) - p.alpha - (1.0 - p.gamma) * i),
            s.lambda * (k / p.nu - delta - p.alpha - p.beta),
            s.d * (p.r - k / p.nu + delta - i) + (1.0 - p.consumption.c1) * s.omega - p.consumption.c2 * s.d};
}

inline StateKeen vf_longrun_real3d(const ModelParams& p, const StateKeen& s) {
    ModelParams real = p;
    real.eta_p = 0.0;
    real.eta_q = 0.0;
    real.gamma = 0.0;
    return vf_longrun_monetary3d(real, s);
}

/// Inventory ratio dynamics of the fixed-utilization systems.
inline double aux_v_ode_3d(const ModelParams& p, const StateKeen& s, double v) {
    const double pi = 1.0 - s.omega - p.r * s.d;
    return (1.0 - longrun_demand(p, s.omega, s.d)) - longrun_growth_expectation(p, p.u0, pi) * v;
}

// ============================================================================
// Short-run tatonnement systems
// ============================================================================

/// g = eta0 (y_d - y_e) + eta_d (y_d - 1) of the zero-growth economy.
inline double shortrun_growth(const ModelParams& p, double y_d, double y_e) {
    return p.eta0() * (y_d - y_e) + p.eta_d * (y_d - 1.0);
}

inline StateShortRun vf_shortrunA(const ModelParams& p, const StateShortRun& s) {
    const double g = shortrun_growth(p, s.y_d, s.y_e);
    return {-(1.0 - p.gamma) * s.y_d * p.eta_q * (s.y_d - s.y_e), p.eta_e * (s.y_d - s.y_e) - s.y_e * g};
}

inline StateShortRun vf_shortrunB(const ModelParams& p, const StateShortRun& s) {
    if (p.eta_d == 0.0) throw DomainError("short-run system B divides by eta_d");
    const double g = shortrun_growth(p, s.y_d, s.y_e);
    return {-(1.0 - p.gamma) * s.y_d * (p.eta_q / p.eta_d) * (1.0 - s.y_e), p.eta_e * (s.y_d - s.y_e) - s.y_e * g};
}

/// Inflation rate seen by the short-run systems.
inline double shortrun_inflation(const ModelParams& p, ModelVariant v, const StateShortRun& s) {
    if (v == ModelVariant::ShortRunB) return p.eta_q * (1.0 - s.y_e) / p.eta_d;
    return p.eta_q * (s.y_d - s.y_e);
}

inline StateInverse to_inverse(const StateShortRun& s) {
    if (s.y_d == 0.0 || s.y_e == 0.0) throw DomainError("inverse coordinates need y_d, y_e nonzero");
    return {1.0 / s.y_d, s.y_d / s.y_e};
}

inline StateShortRun from_inverse(const StateInverse& s) {
    if (s.h == 0.0 || s.x == 0.0) throw DomainError("inverse coordinates need h, x nonzero");
    return {1.0 / s.h, 1.0 / (s.h * s.x)};
}

/// Short-run system A written in (h, x); obtained by the chain rule from vf_shortrunA.
inline StateInverse vf_inverse(const ModelParams& p, const StateInverse& s) {
    if (s.h == 0.0 || s.x == 0.0) throw DomainError("inverse coordinates need h, x nonzero");
    const double a = (1.0 - p.gamma) * p.eta_q;
    const double e0 = p.eta0();
    return {a * (1.0 - 1.0 / s.x),
            (e0 + p.eta_d - a) * s.x / s.h - (e0 - a) / s.h - (p.eta_d - p.eta_e) * s.x - p.eta_e * s.x * s.x};
}

// ============================================================================
// Type-erased access
// ============================================================================

/// Core vector field of a variant on its state_names() coordinates.
inline Vec core_field(ModelVariant v, const ModelParams& p, const Vec& y) {
    switch (v) {
    case ModelVariant::Full5D: return vf_full5d(p, StateFull5::from(y)).to_vector();
    case ModelVariant::ShortRun5D: return vf_shortrun5d(p, StateFull5::from(y)).to_vector();
    case ModelVariant::Goodwin: return vf_goodwin(p, StateGoodwin::from(y)).to_vector();
    case ModelVariant::Keen: return vf_keen(p, StateKeen::from(y)).to_vector();
    case ModelVariant::MonetaryKeen: return vf_monetary_keen(p, StateKeen::from(y)).to_vector();
    case ModelVariant::Franke2D: return vf_franke2d(p, StateFranke::from(y)).to_vector();
    case ModelVariant::LongRun4D: return vf_longrun4d(p, StateLongRun4::from(y)).to_vector();
    case ModelVariant::LongRunReal3D: return vf_longrun_real3d(p, StateKeen::from(y)).to_vector();
    case ModelVariant::LongRunMonetary3D: return vf_longrun_monetary3d(p, StateKeen::from(y)).to_vector();
    case ModelVariant::ShortRunA: return vf_shortrunA(p, StateShortRun::from(y)).to_vector();
    case ModelVariant::ShortRunB: return vf_shortrunB(p, StateShortRun::from(y)).to_vector();
    case ModelVariant::ShortRunInverse: return vf_inverse(p, StateInverse::from(y)).to_vector();
    }
    return {};
}

/// Field on the integrated coordinates (core plus auxiliary inventory ratio where present).
inline Vec integrated_field(ModelVariant v, const ModelParams& p, const Vec& y) {
    if (!has_aux_inventory(v)) return core_field(v, p, y);
    const Eigen::Index n = y.size() - 1;
    Vec out(y.size());
    out.head(n) = core_field(v, p, y.head(n));
    if (v == ModelVariant::LongRun4D)
        out[n] = aux_v_ode(p, StateLongRun4::from(y), y[n]);
    else if (v == ModelVariant::LongRunReal3D) {
        ModelParams real = p;
        real.eta_p = real.eta_q = real.gamma = 0.0;
        out[n] = aux_v_ode_3d(real, StateKeen::from(y), y[n]);
    } else
        out[n] = aux_v_ode_3d(p, StateKeen::from(y), y[n]);
    return out;
}

inline VectorField make_vector_field(ModelVariant v, const ModelParams& p) {
    return [v, p](double, const Vec& y) { return integrated_field(v, p, y); };
}

inline VectorField make_core_field(ModelVariant v, const ModelParams& p) {
    return [v, p](double, const Vec& y) { return core_field(v, p, y); };
}

/// Derived columns reported with trajectories: y_d, pi_e, i, g, v (NaN where undefined).
inline std::array<double, 5> derived_columns(ModelVariant v, const ModelParams& p, const Vec& y) {
    switch (v) {
    case ModelVariant::Full5D:
    case ModelVariant::ShortRun5D: {
        const auto q = v == ModelVariant::Full5D ? derived(p, StateFull5::from(y)) : derived_shortrun5d(p, StateFull5::from(y));
        return {q.y_d, q.pi_e, q.inflation, q.growth, q.v};
    }
    case ModelVariant::Goodwin: return {1.0, 1.0 - y[0], 0.0, (1.0 - y[0]) / p.nu - p.depreciation(1.0), kNaN};
    case ModelVariant::Keen:
    case ModelVariant::MonetaryKeen: {
        const double pi = 1.0 - y[0] - p.r * y[2];
        const double i = v == ModelVariant::Keen ? 0.0 : p.markup_inflation(y[0]);
        return {1.0, pi, i, p.kappa(1.0, pi) / p.nu - p.depreciation(1.0), kNaN};
    }
    case ModelVariant::Franke2D: {
        const StateFranke s = StateFranke::from(y);
        const FrankeForms f = franke_forms(p);
        const double uF = franke_utilization(p, s);
        const double yd = f.e0 - f.e1 * uF + 1.0;
        const double g = f.h0 + f.h1 * uF - p.depreciation(1.0);
        return {yd, kNaN, 0.0, g, uF != 0.0 ? s.v / uF : kNaN};
    }
    case ModelVariant::LongRun4D: {
        const StateLongRun4 s = StateLongRun4::from(y);
        const double pi = 1.0 - s.omega - p.r * s.d;
        const double yd = longrun4d_demand(p, s);
        const double i = p.markup_inflation(s.omega) + p.eta_q * (yd - 1.0);
        return {yd, pi, i, longrun_growth_expectation(p, s.u, pi), y.size() > 4 ? y[4] : kNaN};
    }
    case ModelVariant::LongRunReal3D:
    case ModelVariant::LongRunMonetary3D: {
        ModelParams q = p;
        if (v == ModelVariant::LongRunReal3D) q.eta_p = q.eta_q = q.gamma = 0.0;
        const double pi = 1.0 - y[0] - q.r * y[2];
        return {longrun_demand(q, y[0], y[2]), pi, longrun_inflation(q, y[0], y[2]),
                q.kappa(q.u0, pi) / q.nu - q.depreciation(q.u0), y.size() > 3 ? y[3] : kNaN};
    }
    case ModelVariant::ShortRunA:
    case ModelVariant::ShortRunB: {
        const StateShortRun s = StateShortRun::from(y);
        const double vv = p.eta_d != 0.0 ? ((1.0 + p.f_d * p.eta_d) * s.y_e - 1.0) / p.eta_d : kNaN;
        return {s.y_d, kNaN, shortrun_inflation(p, v, s), shortrun_growth(p, s.y_d, s.y_e), vv};
    }
    case ModelVariant::ShortRunInverse: {
        const StateShortRun s = from_inverse(StateInverse::from(y));
        const double vv = p.eta_d != 0.0 ? ((1.0 + p.f_d * p.eta_d) * s.y_e - 1.0) / p.eta_d : kNaN;
        return {s.y_d, kNaN, shortrun_inflation(p, ModelVariant::ShortRunA, s), shortrun_growth(p, s.y_d, s.y_e), vv};
    }
    }
    return {kNaN, kNaN, kNaN, kNaN, kNaN};
}

} // namespace sfcinv
