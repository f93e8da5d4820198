#include <gtest/gtest.h>

#include <cmath>

#include "sfcinv/equilibrium.hpp"
#include "sfcinv/ledger.hpp"

using namespace sfcinv;

namespace {

ModelParams full_params() {
    ModelParams p;
    p.eta_p = 0.2;
    p.eta_q = 0.1;
    p.gamma = 0.5;
    p.eta_e = 1.0;
    p.eta_d = 0.5;
    p.f_d = 0.1;
    return p;
}

SolverOptions tight() {
    SolverOptions o;
    o.rtol = 1e-10;
    o.atol = 1e-12;
    return o;
}

Trajectory full_run(const ModelParams& p, double t_end = 100.0) {
    return integrate(make_vector_field(ModelVariant::Full5D, p), StateFull5{0.7, 0.9, 2.0, 0.99, 1.1}.to_vector(), 0.0, t_end,
                     tight());
}

} // namespace

TEST(Ledger, FullTrajectoryPassesAudit) {
    const auto p = full_params();
    const auto tr = full_run(p);
    ASSERT_EQ(tr.termination, Termination::ReachedEnd);
    const auto L = reconstruct(p, ModelVariant::Full5D, tr);
    for (const auto& [name, gap] : L.cross_checks) EXPECT_LT(gap, 1e-6) << name;
    const auto a = identity_audit(L);
    for (const auto& r : a.identities) EXPECT_LT(r.max_violation, 1e-8) << r.name;
    EXPECT_LT(a.get("fb.savings_investment").max_violation, 1e-10);
    EXPECT_LT(a.get("wage_share_proxy").max_violation, 1e-12);
}

TEST(Ledger, DebtChangeMatchesFiniteDifference) {
    const auto p = full_params();
    const auto tr = full_run(p, 60.0);
    const double h = 1e-4;
    Trajectory probe;
    for (double tk : {5.0, 12.5, 20.0, 33.3, 47.0, 55.0}) {
        for (double t : {tk - h, tk, tk + h}) {
            probe.t.push_back(t);
            probe.y.push_back(tr.interpolate(t));
            probe.f.push_back(tr.interpolate_derivative(t));
        }
    }
    const auto L = reconstruct(p, ModelVariant::Full5D, probe, {}, {DepositMode::Pooled, 1e-13, 1e-13, 1e-6});
    for (std::size_t k = 0; k + 2 < L.rows.size(); k += 3) {
        const auto& s = L.rows[k + 1];
        const double fd = (L.rows[k + 2].D - L.rows[k].D) / (2.0 * h);
        const double rhs = s.p * s.I_k + s.c * s.Vdot - s.Pi_p;
        EXPECT_LT(std::abs(fd - rhs) / std::max(1.0, std::abs(fd)), 1e-8) << "t=" << s.t;
    }
}

TEST(Ledger, StationaryPointKeepsLevelsConstant) {
    auto p = full_params();
    p.alpha = 0.0;
    p.beta = 0.0;
    p.eta_p = 0.0;
    EquilibriumSet set;
    try {
        set = interior_full5d(p);
    } catch (const NoSolutionError&) {
        GTEST_SKIP() << "no interior point for this calibration";
    }
    ASSERT_FALSE(set.reports.empty());
    const Vec x = set.reports[0].coords;
    const auto tr = integrate(make_vector_field(ModelVariant::Full5D, p), x, 0.0, 50.0, tight());
    const auto L = reconstruct(p, ModelVariant::Full5D, tr);
    const auto& a = L.rows.front();
    const auto& b = L.rows.back();
    for (const auto& [name, ptr] : ledger_fields()) {
        if (std::string(name) == "t") continue;
        EXPECT_NEAR(b.*ptr, a.*ptr, 1e-8 * std::max(1.0, std::abs(a.*ptr))) << name;
    }
}

TEST(Ledger, GoodwinWithConstantPrices) {
    ModelParams p;
    p.depreciation.delta = 0.01;
    const auto tr = integrate(make_vector_field(ModelVariant::Goodwin, p), StateGoodwin{0.8, 0.9}.to_vector(), 0.0, 60.0, tight());
    const auto L = reconstruct(p, ModelVariant::Goodwin, tr);
    for (const auto& s : L.rows) {
        EXPECT_DOUBLE_EQ(s.p, 1.0);
        EXPECT_NEAR(s.D, 0.0, 1e-10 * s.p * s.Y);
    }
    const auto a = identity_audit(L);
    for (const auto& r : a.identities) EXPECT_LT(r.max_violation, 1e-8) << r.name;
}

TEST(Ledger, KeenNominalOutputEqualsPriceTimesOutput) {
    ModelParams p;
    const auto tr = integrate(make_vector_field(ModelVariant::Keen, p), StateKeen{0.8, 0.9, 0.5}.to_vector(), 0.0, 50.0, tight());
    const auto L = reconstruct(p, ModelVariant::Keen, tr);
    for (const auto& s : L.rows) {
        EXPECT_EQ(s.Vdot, 0.0);
        EXPECT_NEAR(s.Y_n, s.p * s.Y, 1e-12 * s.p * s.Y);
    }
    EXPECT_TRUE(identity_audit(L).all_pass());
}

TEST(Ledger, LongRunMonetaryInventoriesMove) {
    ModelParams p;
    p.eta_p = 0.2;
    p.eta_q = 0.1;
    p.gamma = 0.5;
    p.u0 = 1.5;
    Vec x0(4);
    x0 << 0.7, 0.95, 2.0, 0.3;
    // Nearby paths separate quickly here, so the path itself needs a tighter tolerance.
    SolverOptions o;
    o.rtol = 1e-12;
    o.atol = 1e-13;
    const auto tr = integrate(make_vector_field(ModelVariant::LongRunMonetary3D, p), x0, 0.0, 30.0, o);
    ASSERT_EQ(tr.termination, Termination::ReachedEnd);
    const auto L = reconstruct(p, ModelVariant::LongRunMonetary3D, tr);
    EXPECT_NE(L.rows.back().V, L.rows.front().V);
    EXPECT_EQ(L.cross_checks.back().first, "v = V/Y (auxiliary, not enforced)");
    EXPECT_GT(L.cross_checks.back().second, 1e-3);
    const auto a = identity_audit(L);
    for (const auto& r : a.identities) EXPECT_LT(r.max_violation, 1e-8) << r.name;
}

TEST(Ledger, SeparateDepositsTrackHouseholdSaving) {
    auto p = full_params();
    p.r_m = 0.01;
    const auto tr = full_run(p, 50.0);
    InitialLevels lv;
    lv.M0 = 50.0;
    ReconstructOptions ro;
    ro.mode = DepositMode::Separate;
    const auto L = reconstruct(p, ModelVariant::Full5D, tr, lv, ro);
    EXPECT_NE(L.rows.back().M, L.rows.back().D);
    const auto a = identity_audit(L);
    for (const auto& r : a.identities) EXPECT_LT(r.max_violation, 1e-8) << r.name;
}

TEST(Ledger, FaultInjectionFlagsOneIdentity) {
    const auto p = full_params();
    const auto L = reconstruct(p, ModelVariant::Full5D, full_run(p, 30.0));
    ASSERT_TRUE(identity_audit(L).all_pass());
    const std::vector<std::pair<std::string, std::string>> cases{
        {"Xf_dot", "nw.firms"}, {"Xh_dot", "nw.households"}, {"Xb_dot", "nw.banks"}, {"I_p", "supply"}};
    for (const auto& [field, identity] : cases) {
        auto C = L;
        inject_fault(C, field, C.rows.size() / 2);
        const auto a = identity_audit(C);
        EXPECT_EQ(a.flagged_count(), 1u) << field;
        EXPECT_TRUE(a.get(identity).flagged) << field;
    }
    auto C = L;
    EXPECT_THROW(inject_fault(C, "no_such_field", 0), PreconditionError);
}

TEST(Ledger, InconsistentLevelsRejected) {
    const auto p = full_params();
    const auto tr = full_run(p, 10.0);
    InitialLevels lv;
    lv.N0 = 100.0;
    try {
        reconstruct(p, ModelVariant::Full5D, tr, lv);
        FAIL() << "expected an inconsistency";
    } catch (const InconsistencyError& e) {
        EXPECT_TRUE(e.identity() == "u = nu Y/K" || e.identity() == "d = D/(p Y)") << e.identity();
    }
}

TEST(Ledger, UnsupportedVariant) {
    ModelParams p;
    Trajectory tr;
    tr.t = {0.0};
    tr.y = {StateShortRun{1.0, 1.0}.to_vector()};
    EXPECT_THROW(reconstruct(p, ModelVariant::ShortRunA, tr), PreconditionError);
}
