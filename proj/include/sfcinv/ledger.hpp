#pragma once

#include <algorithm>
#include <functional>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "model.hpp"
#include "ode.hpp"

namespace sfcinv {

// ============================================================================
// Intensive snapshot shared by every variant the ledger supports
// ============================================================================

struct IntensiveSnapshot {
    double omega = kNaN, lambda = kNaN, d = kNaN, y_e = kNaN, u = kNaN;
    double y_d = kNaN, theta = kNaN, kappa = kNaN, delta = kNaN, inflation = kNaN;
    double v = kNaN; ///< algebraic inventory ratio where the variant defines one
};

inline bool ledger_supports(ModelVariant v) {
    switch (v) {
    case ModelVariant::Full5D:
    case ModelVariant::Goodwin:
    case ModelVariant::Keen:
    case ModelVariant::MonetaryKeen:
    case ModelVariant::LongRunMonetary3D:
    case ModelVariant::LongRunReal3D: return true;
    default: return false;
    }
}

inline IntensiveSnapshot intensive_snapshot(ModelVariant v, const ModelParams& p, const Vec& y) {
    IntensiveSnapshot s;
    switch (v) {
    case ModelVariant::Full5D: {
        const auto st = StateFull5::from(y);
        const auto q = derived(p, st);
        s = {st.omega, st.lambda, st.d, st.y_e, st.u, q.y_d, q.theta, q.kappa, q.delta, q.inflation, q.v};
        break;
    }
    case ModelVariant::Goodwin: {
        // All profits invested, everything sold, no debt.
        s.omega = y[0];
        s.lambda = y[1];
        s.d = 0.0;
        s.y_e = s.y_d = s.u = 1.0;
        s.kappa = 1.0 - s.omega;
        s.theta = s.omega;
        s.delta = p.depreciation(1.0);
        s.inflation = 0.0;
        s.v = kNaN;
        break;
    }
    case ModelVariant::Keen:
    case ModelVariant::MonetaryKeen: {
        const auto st = StateKeen::from(y);
        s.omega = st.omega;
        s.lambda = st.lambda;
        s.d = st.d;
        s.y_e = s.y_d = s.u = 1.0;
        s.kappa = p.kappa(1.0, 1.0 - st.omega - p.r * st.d);
        s.theta = 1.0 - s.kappa;
        s.delta = p.depreciation(1.0);
        s.inflation = v == ModelVariant::Keen ? 0.0 : p.markup_inflation(st.omega);
        break;
    }
    case ModelVariant::LongRunMonetary3D:
    case ModelVariant::LongRunReal3D: {
        ModelParams q = p;
        if (v == ModelVariant::LongRunReal3D) q.eta_p = q.eta_q = q.gamma = 0.0;
        const auto st = StateKeen::from(y);
        s.omega = st.omega;
        s.lambda = st.lambda;
        s.d = st.d;
        s.y_e = 1.0;
        s.u = q.u0;
        s.kappa = q.kappa(q.u0, 1.0 - st.omega - q.r * st.d);
        s.theta = q.consumption(st.omega, st.d);
        s.y_d = s.theta + s.kappa / q.u0;
        s.delta = q.depreciation(q.u0);
        s.inflation = longrun_inflation(q, st.omega, st.d);
        break;
    }
    default: throw PreconditionError("ledger reconstruction not available for " + std::string(variant_name(v)));
    }
    return s;
}

// ============================================================================
// Levels
// ============================================================================

/// Deposits: Pooled follows D = M with r_m = r and no bank consumption; Separate tracks
/// M through dM/dt = S_h with propensities c_i = c1, c_w = c2 - c1 r shared by both sectors.
enum class DepositMode { Pooled, Separate };

/// NaN entries are implied by the initial intensive state.
struct InitialLevels {
    double K0 = 300.0;
    double p0 = 1.0;
    double a0 = 1.0;
    double N0 = kNaN;
    double w0 = kNaN;
    double V0 = kNaN;
    double D0 = kNaN;
    double M0 = kNaN;
};

struct LedgerState {
    double t = 0;
    double omega = 0, lambda = 0, d = 0, y_e = 0, y_d = 0, u = 0;
    double K = 0, Y = 0, Y_e = 0, Y_d = 0, V = 0, D = 0, M = 0;
    double p = 0, w = 0, a = 0, N = 0, ell = 0, W = 0, c = 0;
    double C = 0, C_h = 0, C_b = 0, I_k = 0, I_p = 0, deltaK = 0;
    double Pi = 0, Pi_p = 0, Y_n = 0;
    double X_h = 0, X_f = 0, X_b = 0, S_h = 0, S_f = 0, S_b = 0;
    double Vdot = 0, Ddot = 0, Mdot = 0, pdot = 0, cdot = 0, Xh_dot = 0, Xf_dot = 0, Xb_dot = 0;
};

using LedgerField = std::pair<const char*, double LedgerState::*>;

inline const std::vector<LedgerField>& ledger_fields() {
    static const std::vector<LedgerField> f{
        {"t", &LedgerState::t},         {"omega", &LedgerState::omega},   {"lambda", &LedgerState::lambda},
        {"d", &LedgerState::d},         {"y_e", &LedgerState::y_e},       {"y_d", &LedgerState::y_d},
        {"u", &LedgerState::u},         {"K", &LedgerState::K},           {"Y", &LedgerState::Y},
        {"Y_e", &LedgerState::Y_e},     {"Y_d", &LedgerState::Y_d},       {"V", &LedgerState::V},
        {"D", &LedgerState::D},         {"M", &LedgerState::M},           {"p", &LedgerState::p},
        {"w", &LedgerState::w},         {"a", &LedgerState::a},           {"N", &LedgerState::N},
        {"ell", &LedgerState::ell},     {"W", &LedgerState::W},           {"c", &LedgerState::c},
        {"C", &LedgerState::C},         {"C_h", &LedgerState::C_h},       {"C_b", &LedgerState::C_b},
        {"I_k", &LedgerState::I_k},     {"I_p", &LedgerState::I_p},       {"deltaK", &LedgerState::deltaK},
        {"Pi", &LedgerState::Pi},       {"Pi_p", &LedgerState::Pi_p},     {"Y_n", &LedgerState::Y_n},
        {"X_h", &LedgerState::X_h},     {"X_f", &LedgerState::X_f},       {"X_b", &LedgerState::X_b},
        {"S_h", &LedgerState::S_h},     {"S_f", &LedgerState::S_f},       {"S_b", &LedgerState::S_b},
        {"Vdot", &LedgerState::Vdot},   {"Ddot", &LedgerState::Ddot},     {"Mdot", &LedgerState::Mdot},
        {"pdot", &LedgerState::pdot},   {"cdot", &LedgerState::cdot},     {"Xh_dot", &LedgerState::Xh_dot},
        {"Xf_dot", &LedgerState::Xf_dot}, {"Xb_dot", &LedgerState::Xb_dot}};
    return f;
}

struct LedgerSeries {
    ModelVariant variant = ModelVariant::Full5D;
    DepositMode mode = DepositMode::Pooled;
    double r = 0.0, r_m = 0.0;
    std::vector<LedgerState> rows;
    std::vector<std::pair<std::string, double>> cross_checks; ///< max relative mismatch per check
};

struct ReconstructOptions {
    DepositMode mode = DepositMode::Pooled;
    double rtol = 1e-12;
    double atol = 1e-12;
    double cross_check_tol = 1e-6;
};

namespace detail {

struct Extras {
    // Offsets into the augmented state after the intensive block.
    static constexpr int lnK = 0, lnp = 1, lnw = 2, D = 3, V = 4, M = 5, size = 6;
};

struct LedgerContext {
    ModelVariant variant;
    ModelParams params;
    DepositMode mode;
    double a0, N0;
    double c_i, c_w, r_m;
    Eigen::Index n; ///< intensive dimension
};

inline double rel_gap(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

/// Level state at time t from the augmented vector; derivative entries are filled from the
/// augmented right-hand side.
inline LedgerState levels_at(const LedgerContext& ctx, double t, const Vec& z, Vec* rhs = nullptr) {
    const auto& p = ctx.params;
    const auto s = intensive_snapshot(ctx.variant, p, z.head(ctx.n));
    const Eigen::Index o = ctx.n;
    LedgerState L;
    L.t = t;
    L.omega = s.omega;
    L.lambda = s.lambda;
    L.d = s.d;
    L.y_e = s.y_e;
    L.y_d = s.y_d;
    L.u = s.u;
    L.a = ctx.a0 * std::exp(p.alpha * t);
    L.N = ctx.N0 * std::exp(p.beta * t);
    L.ell = s.lambda * L.N;
    L.Y = L.a * L.ell;
    L.K = std::exp(z[o + Extras::lnK]);
    L.p = std::exp(z[o + Extras::lnp]);
    L.w = std::exp(z[o + Extras::lnw]);
    L.D = z[o + Extras::D];
    L.V = z[o + Extras::V];
    L.M = ctx.mode == DepositMode::Pooled ? L.D : z[o + Extras::M];
    L.Y_e = s.y_e * L.Y;
    L.Y_d = s.y_d * L.Y;
    L.I_p = L.Y - L.Y_e;
    L.I_k = s.kappa * L.K / p.nu;
    L.deltaK = s.delta * L.K;
    L.C = s.theta * L.Y;
    L.W = L.w * L.ell;
    L.c = L.w / L.a;
    if (ctx.mode == DepositMode::Pooled) {
        L.C_h = L.C;
        L.C_b = 0.0;
    } else {
        L.C_h = (ctx.c_i * (L.W + ctx.r_m * L.M) + ctx.c_w * L.M) / L.p;
        L.C_b = (ctx.c_i * (p.r * L.D - ctx.r_m * L.M) + ctx.c_w * (L.D - L.M)) / L.p;
    }
    const double r_m = ctx.mode == DepositMode::Pooled ? p.r : ctx.r_m;

    // Stock derivatives from their own laws of motion.
    const double dlnK = s.kappa / p.nu - s.delta;
    const double dlnp = s.inflation;
    const double dlnw = p.phillips(s.lambda) + p.gamma * s.inflation;
    L.Vdot = L.Y - L.Y_d;
    L.Ddot = L.W + p.r * L.D - L.p * L.C;
    L.Mdot = ctx.mode == DepositMode::Pooled ? L.Ddot : L.W + r_m * L.M - L.p * L.C_h;
    L.pdot = L.p * dlnp;
    L.cdot = L.c * (dlnw - p.alpha);

    L.Y_n = L.p * L.Y_d + L.c * L.Vdot;
    L.Pi_p = L.Y_n - L.W - p.r * L.D;
    L.Pi = L.Pi_p - L.p * L.deltaK;
    L.S_f = L.Pi;
    L.S_h = L.W + r_m * L.M - L.p * L.C_h;
    L.S_b = p.r * L.D - r_m * L.M - L.p * L.C_b;
    L.X_h = L.M;
    L.X_f = L.p * L.K + L.c * L.V - L.D;
    L.X_b = L.D - L.M;
    L.Xh_dot = L.Mdot;
    L.Xf_dot = L.pdot * L.K + L.p * dlnK * L.K + L.cdot * L.V + L.c * L.Vdot - L.Ddot;
    L.Xb_dot = L.Ddot - L.Mdot;

    if (rhs) {
        Vec f(z.size());
        f.head(ctx.n) = core_field(ctx.variant, p, z.head(ctx.n));
        f[o + Extras::lnK] = dlnK;
        f[o + Extras::lnp] = dlnp;
        f[o + Extras::lnw] = dlnw;
        f[o + Extras::D] = L.Ddot;
        f[o + Extras::V] = L.Vdot;
        f[o + Extras::M] = ctx.mode == DepositMode::Pooled ? 0.0 : L.Mdot;
        *rhs = f;
    }
    return L;
}

} // namespace detail

/// Rebuilds extensive variables along an intensive trajectory by integrating capital, prices,
/// wages, debt, inventories and deposits next to the intensive state, sampled at the
/// trajectory's own time nodes. The result is cross-checked against the trajectory.
inline LedgerSeries reconstruct(const ModelParams& p, ModelVariant v, const Trajectory& tr, const InitialLevels& lv = {},
                                const ReconstructOptions& opt = {}) {
    if (!ledger_supports(v)) throw PreconditionError("ledger reconstruction not available for " + std::string(variant_name(v)));
    if (tr.t.empty()) throw PreconditionError("empty trajectory");
    if (!(lv.K0 > 0.0 && lv.p0 > 0.0 && lv.a0 > 0.0)) throw PreconditionError("initial levels must be positive");

    detail::LedgerContext ctx{v, p, opt.mode, lv.a0, kNaN, p.consumption.c1, p.consumption.c2 - p.consumption.c1 * p.r,
                              p.deposit_rate(), static_cast<Eigen::Index>(state_names(v).size())};
    const Vec x0 = tr.y.front().head(ctx.n);
    const auto s0 = intensive_snapshot(v, p, x0);
    const double t0 = tr.t.front();
    const double Y0 = s0.u * lv.K0 / p.nu;
    const double a_t0 = lv.a0 * std::exp(p.alpha * t0);
    ctx.a0 = lv.a0;
    ctx.N0 = std::isnan(lv.N0) ? Y0 / (a_t0 * s0.lambda) / std::exp(p.beta * t0) : lv.N0;
    const double w0 = std::isnan(lv.w0) ? s0.omega * lv.p0 * a_t0 : lv.w0;
    const double D0 = std::isnan(lv.D0) ? s0.d * lv.p0 * Y0 : lv.D0;
    double V0 = lv.V0;
    const bool aux = has_aux_inventory(v) && tr.y.front().size() > ctx.n;
    auto inventory_ratio = [&](const Vec& y, const IntensiveSnapshot& s) { return aux ? y[ctx.n] : s.v; };
    if (std::isnan(V0)) {
        const double v0 = inventory_ratio(tr.y.front(), s0);
        V0 = std::isfinite(v0) ? v0 * Y0 : 0.0;
    }
    const double M0 = std::isnan(lv.M0) ? D0 : lv.M0;

    Vec z(ctx.n + detail::Extras::size);
    z.head(ctx.n) = x0;
    z[ctx.n + detail::Extras::lnK] = std::log(lv.K0);
    z[ctx.n + detail::Extras::lnp] = std::log(lv.p0);
    z[ctx.n + detail::Extras::lnw] = std::log(w0);
    z[ctx.n + detail::Extras::D] = D0;
    z[ctx.n + detail::Extras::V] = V0;
    z[ctx.n + detail::Extras::M] = M0;

    const VectorField F = [&ctx](double t, const Vec& y) {
        Vec f;
        detail::levels_at(ctx, t, y, &f);
        return f;
    };
    SolverOptions so;
    so.rtol = opt.rtol;
    so.atol = opt.atol;
    so.store_samples = false;
    so.blowup_norm = kInf;

    LedgerSeries out;
    out.variant = v;
    out.mode = opt.mode;
    out.r = p.r;
    out.r_m = opt.mode == DepositMode::Pooled ? p.r : p.deposit_rate();
    out.rows.reserve(tr.t.size());
    double worst_omega = 0, worst_d = 0, worst_u = 0, worst_v = 0, worst_state = 0;
    for (std::size_t k = 0; k < tr.t.size(); ++k) {
        if (k > 0 && tr.t[k] > tr.t[k - 1]) {
            const auto seg = integrate(F, z, tr.t[k - 1], tr.t[k], so);
            if (seg.termination != Termination::ReachedEnd)
                throw NonFiniteError("ledger integration stopped: " + seg.termination_label());
            z = seg.back();
        }
        const auto L = detail::levels_at(ctx, tr.t[k], z);
        const Vec& yk = tr.y[k];
        for (Eigen::Index j = 0; j < ctx.n; ++j)
            worst_state = std::max(worst_state, std::abs(z[j] - yk[j]) / std::max(1.0, std::abs(yk[j])));
        worst_omega = std::max(worst_omega, detail::rel_gap(yk[0], L.w / (L.p * L.a)));
        worst_d = std::max(worst_d, std::abs(L.d - L.D / (L.p * L.Y)) / std::max(1.0, std::abs(L.d)));
        worst_u = std::max(worst_u, detail::rel_gap(L.u, p.nu * L.Y / L.K));
        const auto s = intensive_snapshot(v, p, yk.head(ctx.n));
        const double vk = inventory_ratio(yk, s);
        if (std::isfinite(vk)) worst_v = std::max(worst_v, std::abs(vk - L.V / L.Y) / std::max(1.0, std::abs(vk)));
        out.rows.push_back(L);
    }
    out.cross_checks = {{"intensive state", worst_state},
                        {"omega = w/(p a)", worst_omega},
                        {"d = D/(p Y)", worst_d},
                        {"u = nu Y/K", worst_u},
                        {aux ? "v = V/Y (auxiliary, not enforced)" : "v = V/Y", worst_v}};
    // The auxiliary inventory ODE discounts with expected rather than realized growth, so
    // off equilibrium it drifts from V/Y; only the enforced checks can throw.
    const auto enforced = aux ? out.cross_checks.end() - 1 : out.cross_checks.end();
    auto worst = std::max_element(out.cross_checks.begin(), enforced,
                                  [](const auto& a, const auto& b) { return a.second < b.second; });
    if (worst->second > opt.cross_check_tol)
        throw InconsistencyError(worst->first, worst->second);
    return out;
}

// ============================================================================
// Identity audit
// ============================================================================

struct IdentityResult {
    std::string name;
    double max_violation = 0.0; ///< max over samples of |residual| / scale
    double at_t = kNaN;
    bool flagged = false;
};

struct AuditReport {
    double tolerance = 1e-8;
    std::vector<IdentityResult> identities;
    std::size_t samples = 0;

    std::size_t flagged_count() const {
        return static_cast<std::size_t>(std::count_if(identities.begin(), identities.end(), [](const auto& r) { return r.flagged; }));
    }
    bool all_pass() const { return flagged_count() == 0; }
    const IdentityResult& get(const std::string& n) const {
        for (const auto& r : identities)
            if (r.name == n) return r;
        throw PreconditionError("no identity named " + n);
    }
};

struct Identity {
    std::string name;
    /// Returns the terms whose signed sum must vanish.
    std::function<std::vector<double>(const LedgerState&, const LedgerSeries&)> terms;
    bool ratio = false; ///< dimensionless; no level-based scale floor
};

inline const std::vector<Identity>& ledger_identities() {
    using T = std::vector<double>;
    static const std::vector<Identity> ids{
        // Balance sheet
        {"bs.households", [](const LedgerState& s, const LedgerSeries&) { return T{s.X_h, -s.M}; }},
        {"bs.firms", [](const LedgerState& s, const LedgerSeries&) { return T{s.X_f, -s.p * s.K, -s.c * s.V, s.D}; }},
        {"bs.banks", [](const LedgerState& s, const LedgerSeries&) { return T{s.X_b, -s.D, s.M}; }},
        {"bs.sum", [](const LedgerState& s, const LedgerSeries&) { return T{s.X_h, s.X_f, s.X_b, -s.p * s.K, -s.c * s.V}; }},
        // Transactions
        {"tx.consumption", [](const LedgerState& s, const LedgerSeries&) { return T{s.p * s.C, -s.p * s.C_h, -s.p * s.C_b}; }},
        {"tx.gdp_memo", [](const LedgerState& s, const LedgerSeries&) { return T{s.Y_n, -s.p * s.C, -s.p * s.I_k, -s.c * s.Vdot}; }},
        {"tx.firms_current",
         [](const LedgerState& s, const LedgerSeries& L) {
             return T{s.p * s.C, s.p * s.I_k, s.c * s.Vdot, -s.W, -s.p * s.deltaK, -L.r * s.D, -s.Pi};
         }},
        // Financial balances
        {"fb.households", [](const LedgerState& s, const LedgerSeries& L) { return T{s.S_h, -s.W, -L.r_m * s.M, s.p * s.C_h}; }},
        {"fb.firms_capital", [](const LedgerState& s, const LedgerSeries&) { return T{s.S_f, -s.Pi}; }},
        {"fb.banks", [](const LedgerState& s, const LedgerSeries& L) { return T{s.S_b, -L.r * s.D, L.r_m * s.M, s.p * s.C_b}; }},
        {"fb.savings_investment",
         [](const LedgerState& s, const LedgerSeries&) {
             return T{s.S_h, s.S_f, s.S_b, -s.p * s.I_k, s.p * s.deltaK, -s.c * s.Vdot};
         }},
        // Flow of funds
        {"ff.households", [](const LedgerState& s, const LedgerSeries&) { return T{s.S_h, -s.Mdot}; }},
        {"ff.firms",
         [](const LedgerState& s, const LedgerSeries&) { return T{s.S_f, -s.p * s.I_k, s.p * s.deltaK, -s.c * s.Vdot, s.Ddot}; }},
        {"ff.banks", [](const LedgerState& s, const LedgerSeries&) { return T{s.S_b, -s.Ddot, s.Mdot}; }},
        // Change in net worth
        {"nw.households", [](const LedgerState& s, const LedgerSeries&) { return T{s.Xh_dot, -s.S_h}; }},
        {"nw.firms", [](const LedgerState& s, const LedgerSeries&) { return T{s.Xf_dot, -s.S_f, -s.pdot * s.K, -s.cdot * s.V}; }},
        {"nw.banks", [](const LedgerState& s, const LedgerSeries&) { return T{s.Xb_dot, -s.S_b}; }},
        // Accounting definitions
        {"supply", [](const LedgerState& s, const LedgerSeries&) { return T{s.Y, -s.Y_e, -s.I_p}; }},
        {"inventory", [](const LedgerState& s, const LedgerSeries&) { return T{s.Vdot, -s.Y, s.Y_d}; }},
        {"demand", [](const LedgerState& s, const LedgerSeries&) { return T{s.Y_d, -s.C, -s.I_k}; }},
        {"nominal", [](const LedgerState& s, const LedgerSeries&) { return T{s.Y_n, -s.p * s.Y_d, -s.c * s.Vdot}; }},
        {"gross_profit", [](const LedgerState& s, const LedgerSeries&) { return T{s.Y_n, -s.W, -(s.p - s.c) * s.Y_d}; }},
        {"pre_depreciation_profit", [](const LedgerState& s, const LedgerSeries& L) { return T{s.Pi_p, -s.Y_n, s.W, L.r * s.D}; }},
        {"debt", [](const LedgerState& s, const LedgerSeries&) { return T{s.Ddot, -s.p * s.I_k, -s.c * s.Vdot, s.Pi_p}; }},
        {"nominal_ratio",
         [](const LedgerState& s, const LedgerSeries&) {
             return T{s.Y_n / (s.p * s.Y), -(1.0 - s.omega) * s.y_d, -s.omega};
         },
         true},
        {"wage_share_proxy",
         [](const LedgerState& s, const LedgerSeries&) {
             return T{s.W / s.Y_n, -s.omega / ((1.0 - s.omega) * s.y_d + s.omega)};
         },
         true},
    };
    return ids;
}

/// Level identities are measured against the larger of their biggest term and the nominal
/// output proxy pY, so sectors whose flows all vanish are not judged on round-off.
/// Per-identity maximum of that relative violation across the series.
inline AuditReport identity_audit(const LedgerSeries& series, double tol = 1e-8) {
    AuditReport rep;
    rep.tolerance = tol;
    rep.samples = series.rows.size();
    for (const auto& id : ledger_identities()) {
        IdentityResult r;
        r.name = id.name;
        for (const auto& s : series.rows) {
            const auto terms = id.terms(s, series);
            double sum = 0.0, scale = 0.0;
            for (double x : terms) {
                sum += x;
                scale = std::max(scale, std::abs(x));
            }
            if (!id.ratio) scale = std::max(scale, std::abs(s.p * s.Y));
            const double rel = scale > 0.0 ? std::abs(sum) / scale : std::abs(sum);
            if (!(rel <= r.max_violation)) {
                r.max_violation = std::isnan(rel) ? kInf : rel;
                r.at_t = s.t;
            }
        }
        r.flagged = !(r.max_violation < tol);
        rep.identities.push_back(std::move(r));
    }
    return rep;
}

/// Adds `relative` times its magnitude (or `relative` when zero) to one field at one row.
inline void inject_fault(LedgerSeries& series, const std::string& field, std::size_t row, double relative = 1e-3) {
    if (row >= series.rows.size()) throw PreconditionError("inject_fault: row out of range");
    for (const auto& [name, ptr] : ledger_fields()) {
        if (field != name) continue;
        double& x = series.rows[row].*ptr;
        x += relative * (x != 0.0 ? std::abs(x) : 1.0);
        return;
    }
    throw PreconditionError("inject_fault: unknown field " + field);
}

} // namespace sfcinv
