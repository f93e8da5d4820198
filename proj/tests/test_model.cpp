#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sfcinv/model.hpp"
#include "sfcinv/ode.hpp"

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

ModelParams hopf_a_params(double gamma) {
    ModelParams p;
    p.eta_e = 2.5;
    p.eta_d = 0.75;
    p.eta_q = 0.25;
    p.f_d = 0.05;
    p.gamma = gamma;
    return p;
}

} // namespace

TEST(Derived, ZeroProfitShareAtFullWages) {
    ModelParams p;
    p.r = 0.0;
    const auto q = derived(p, {1.0, 0.9, 0.0, 1.0, 1.0});
    EXPECT_EQ(q.pi_e, 0.0);
}

TEST(Derived, NoInflationAtMarkupNeutralWageShare) {
    ModelParams p = full_params();
    const double omega = 1.0 / 1.3, d = 0.5, ye = 1.0;
    const double theta = p.consumption(omega, d);
    const double k = p.kappa(ye * (1.0 - omega) - p.r * d);
    const double u = k / (ye - theta); // chosen so that y_d = y_e
    const auto q = derived(p, {omega, 0.9, d, ye, u});
    EXPECT_NEAR(q.y_d, ye, 1e-15);
    EXPECT_NEAR(q.inflation, 0.0, 1e-15);
}

TEST(Derived, Identities) {
    ModelParams p = full_params();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.1, 1.2);
    for (int k = 0; k < 50; ++k) {
        StateFull5 s{U(rng) * 0.8, U(rng) * 0.8, U(rng) * 3, U(rng), U(rng)};
        const auto q = derived(p, s);
        EXPECT_EQ(q.pi_e, s.y_e * (1.0 - s.omega) - p.r * s.d);
        EXPECT_EQ(q.y_n_ratio, (1.0 - s.omega) * q.y_d + s.omega);
    }
}

TEST(Derived, UndefinedInventoryWithoutAdjustment) {
    ModelParams p = full_params();
    p.eta_d = 0.0;
    EXPECT_TRUE(std::isnan(derived(p, {0.7, 0.9, 1.0, 1.0, 1.0}).v));
    EXPECT_THROW(derived(p, {0.7, 0.9, 1.0, 1.0, 0.0}), DomainError);
}

TEST(Derived, GrowthAtEquilibriumRatiosIsNatural) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        ModelParams p = full_params();
        p.alpha = 0.05 * U(rng);
        p.beta = 0.05 * U(rng);
        p.f_d = U(rng);
        p.eta_d = 2.0 * U(rng) + 0.01;
        p.eta_e = 3.0 * U(rng) + 0.01;
        p.consumption = {0.5 * U(rng), 0.0};
        const double ybar = 1.0 / (1.0 + (p.alpha + p.beta) * p.f_d);
        const double omega = 0.5, d = 0.0;
        const double k_val = p.kappa(ybar * (1.0 - omega));
        const double u = k_val / (ybar - p.consumption(omega, d));
        const auto q = derived(p, {omega, 0.9, d, ybar, u});
        ASSERT_NEAR(q.y_d, ybar, 1e-14);
        EXPECT_NEAR(q.growth, p.alpha + p.beta, 1e-12);
    }
}

TEST(Full5D, EmploymentSignFollowsGrowthGap) {
    ModelParams p = full_params();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0.2, 1.0);
    for (int k = 0; k < 50; ++k) {
        StateFull5 s{U(rng) * 0.9, U(rng) * 0.95, U(rng) * 4, U(rng) * 1.2, U(rng) * 1.5};
        const auto q = derived(p, s);
        const auto f = vf_full5d(p, s);
        const double gap = q.growth - p.alpha - p.beta;
        EXPECT_EQ(std::signbit(f.lambda), std::signbit(gap));
    }
}

TEST(Goodwin, ClosedFormEquilibrium) {
    ModelParams p;
    p.depreciation.delta = 0.01;
    const double omega_bar = 1.0 - p.nu * (p.alpha + p.beta + 0.01);
    EXPECT_NEAR(omega_bar, 0.835, 1e-15);
    const double lambda_bar = p.phillips.inverse(p.alpha);
    const auto f = vf_goodwin(p, {omega_bar, lambda_bar});
    EXPECT_LT(std::abs(f.omega), 1e-15);
    EXPECT_LT(std::abs(f.lambda), 1e-15);
    EXPECT_THROW(vf_goodwin(p, {0.8, 1.0}), DomainError);
}

TEST(Goodwin, FirstIntegralIsOrthogonalToFlow) {
    ModelParams p;
    p.depreciation.delta = 0.01;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0.3, 0.97);
    for (int k = 0; k < 20; ++k) {
        StateGoodwin s{U(rng), U(rng)};
        const double h = 1e-6;
        const double dHdw = (goodwin_first_integral(p, {s.omega + h, s.lambda}) -
                             goodwin_first_integral(p, {s.omega - h, s.lambda})) / (2 * h);
        const double dHdl = (goodwin_first_integral(p, {s.omega, s.lambda + h}) -
                             goodwin_first_integral(p, {s.omega, s.lambda - h})) / (2 * h);
        const auto f = vf_goodwin(p, s);
        EXPECT_NEAR(dHdw * f.omega + dHdl * f.lambda, 0.0, 1e-8);
    }
}

TEST(Keen, DebtFromWageShare) {
    ModelParams p;
    p.nu = 3.0;
    p.alpha = 0.025;
    p.beta = 0.02;
    p.depreciation.delta = 0.06;
    p.r = 0.03;
    EXPECT_NEAR(keen_equilibrium_debt(p, 0.8), (0.8 - 1.0 + 0.315) / 0.015, 1e-12);
    EXPECT_NEAR(keen_equilibrium_debt(p, 0.8), 7.6667, 1e-4);
}

TEST(Keen, ReducesToGoodwinWithProfitInvestmentAndNoDebt) {
    ModelParams p;
    p.depreciation.delta = 0.01;
    p.kappa.form = KappaForm::Linear;
    p.kappa.k0 = 0.0;
    p.kappa.k1 = 1.0;
    for (double w : {0.6, 0.8, 0.9}) {
        for (double l : {0.5, 0.9}) {
            const auto fk = vf_keen(p, {w, l, 0.0});
            const auto fg = vf_goodwin(p, {w, l});
            EXPECT_NEAR(fk.omega, fg.omega, 1e-16);
            EXPECT_NEAR(fk.lambda, fg.lambda, 1e-16);
            EXPECT_NEAR(fk.d, 0.0, 1e-16);
        }
    }
}

TEST(MonetaryKeen, ReducesToKeen) {
    ModelParams p;
    p.eta_p = 0.0;
    p.gamma = 0.0;
    p.eta_q = 0.7; // not used by either system
    for (double d : {0.0, 1.0, 5.0}) {
        const auto a = vf_monetary_keen(p, {0.7, 0.9, d});
        const auto b = vf_keen(p, {0.7, 0.9, d});
        EXPECT_EQ(a.omega, b.omega);
        EXPECT_EQ(a.lambda, b.lambda);
        EXPECT_EQ(a.d, b.d);
    }
    p.gamma = 1.0;
    p.eta_p = 0.3;
    EXPECT_NO_THROW(vf_monetary_keen(p, {0.7, 0.9, 1.0}));
}

TEST(LongRun4D, NaturalGrowthFreezesEmployment) {
    ModelParams p = full_params();
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(0.1, 1.0);
    for (int k = 0; k < 20; ++k) {
        const auto f = vf_longrun4d(p, {U(rng), U(rng), 3 * U(rng), 2 * U(rng)});
        EXPECT_EQ(f.lambda, 0.0);
    }
    p.growth.form = GrowthForm::CapitalGrowth;
    for (int k = 0; k < 20; ++k) {
        const auto f = vf_longrun4d(p, {U(rng), U(rng), 3 * U(rng), 2 * U(rng)});
        EXPECT_NEAR(f.u, 0.0, 1e-16);
    }
}

TEST(LongRun4D, CapitalGrowthMatchesFixedUtilizationSystem) {
    ModelParams p = full_params();
    p.growth.form = GrowthForm::CapitalGrowth;
    p.u0 = 1.3;
    const auto f4 = vf_longrun4d(p, {0.7, 0.9, 2.0, 1.3});
    const auto f3 = vf_longrun_monetary3d(p, {0.7, 0.9, 2.0});
    EXPECT_NEAR(f4.omega, f3.omega, 1e-16);
    EXPECT_NEAR(f4.lambda, f3.lambda, 1e-16);
    EXPECT_NEAR(f4.d, f3.d, 1e-16);
}

TEST(LongRun3D, WealthEffectMakesDemandUnbounded) {
    ModelParams p = full_params();
    EXPECT_GT(longrun_demand(p, 0.5, 1e6), 1e4);
}

TEST(LongRun3D, QLimitOfInflation) {
    ModelParams p = full_params();
    p.u0 = 1.5;
    const double q = 1e-8;
    for (double w : {0.0, 0.5, 0.9}) EXPECT_NEAR(q * longrun_inflation(p, w, 1.0 / q), p.eta_q * p.consumption.c2, 1e-6);
}

TEST(LongRun3D, RealIsMonetaryWithoutPrices) {
    ModelParams p = full_params();
    ModelParams z = p;
    z.eta_p = z.eta_q = z.gamma = 0.0;
    const auto a = vf_longrun_real3d(p, {0.6, 0.8, 1.5});
    const auto b = vf_longrun_monetary3d(z, {0.6, 0.8, 1.5});
    EXPECT_EQ(a.d, b.d);
    EXPECT_EQ(a.omega, b.omega);
}

TEST(ShortRun5D, RestsAtBalancedDemand) {
    ModelParams p;
    p.phillips.phi0 = 0.0;
    p.phillips.phi1 = 0.0;
    p.eta_p = 0.0;
    p.eta_q = 0.3;
    p.eta_e = 2.0;
    p.eta_d = 0.6;
    p.f_d = 0.1;
    p.consumption = {1.0, p.r};
    const double omega = 0.7, d = 1.0;
    const double u = p.nu * p.depreciation(1.0) / (1.0 - omega - p.r * d);
    const auto f = vf_shortrun5d(p, {omega, 0.9, d, 1.0, u});
    EXPECT_NEAR(derived_shortrun5d(p, {omega, 0.9, d, 1.0, u}).y_d, 1.0, 1e-15);
    for (double c : {f.omega, f.lambda, f.d, f.y_e, f.u}) EXPECT_NEAR(c, 0.0, 1e-15);
}

TEST(ShortRun5D, GrowthPositiveWithExcessDemand) {
    ModelParams p = hopf_a_params(0.3);
    for (double yd : {1.01, 1.5, 3.0}) EXPECT_GT(shortrun_growth(p, yd, 1.0), 0.0);
}

namespace {

// Integrates the five-dimensional zero-growth system and the planar system side by side.
double decoupling_gap(double delta, bool shifted) {
    ModelParams p = hopf_a_params(0.3);
    p.phillips.phi0 = 0.0;
    p.phillips.phi1 = 0.0;
    p.phillips.form = PhillipsForm::Exponential; // lambda is free to exceed one here
    p.eta_p = 0.0;
    p.consumption = {1.0, 0.0};
    p.depreciation = {DepreciationForm::LinearInU, delta};
    const StateFull5 s0{1.2, 0.8, 1.0, 1.1, 1.1};
    const double yd0 = derived_shortrun5d(p, s0).y_d;

    SolverOptions opt;
    opt.rtol = 1e-12;
    opt.atol = 1e-14;
    auto f5 = [&](double, const Vec& y) { return vf_shortrun5d(p, StateFull5::from(y)).to_vector(); };
    const double shift = p.nu * delta;
    auto f2 = [&](double, const Vec& y) {
        Vec out = vf_shortrunA(p, StateShortRun::from(y)).to_vector();
        if (shifted) out[0] = -(1.0 - p.gamma) * (y[0] - shift) * p.eta_q * (y[0] - y[1]);
        return out;
    };
    const auto a = integrate(f5, s0.to_vector(), 0.0, 5.0, opt);
    const auto b = integrate(f2, StateShortRun{yd0, s0.y_e}.to_vector(), 0.0, 5.0, opt);
    double gap = 0.0;
    for (double t : {1.0, 2.5, 5.0}) {
        const Vec ya = a.interpolate(t);
        const Vec yb = b.interpolate(t);
        const double yd = derived_shortrun5d(p, StateFull5::from(ya)).y_d;
        gap = std::max({gap, std::abs(yd - yb[0]), std::abs(ya[3] - yb[1])});
    }
    return gap;
}

} // namespace

TEST(ShortRun5D, DecouplesIntoPlanarSystemWithoutReplacementInvestment) {
    EXPECT_LT(decoupling_gap(0.0, false), 1e-9);
}

TEST(ShortRun5D, ReplacementInvestmentShiftsDemandFloor) {
    // With delta > 0 the demand ratio obeys the planar law with y_d replaced by y_d - nu*delta.
    EXPECT_LT(decoupling_gap(0.02, true), 1e-9);
    EXPECT_GT(decoupling_gap(0.02, false), 1e-6);
}

TEST(ShortRun, BalancedAndCollapsedPointsAreStationary) {
    ModelParams p = hopf_a_params(0.3);
    for (auto f : {vf_shortrunA(p, {1.0, 1.0}), vf_shortrunA(p, {0.0, 0.0})}) {
        EXPECT_EQ(f.y_d, 0.0);
        EXPECT_EQ(f.y_e, 0.0);
    }
    ModelParams b = hopf_a_params(0.0);
    b.eta_d = 0.5;
    for (auto f : {vf_shortrunB(b, {1.0, 1.0}), vf_shortrunB(b, {0.0, 0.0})}) {
        EXPECT_EQ(f.y_d, 0.0);
        EXPECT_EQ(f.y_e, 0.0);
    }
}

TEST(ShortRun, DemandAxisIsInvariant) {
    ModelParams p = hopf_a_params(0.3);
    for (double ye : {0.1, 1.0, 3.0}) {
        EXPECT_EQ(vf_shortrunA(p, {0.0, ye}).y_d, 0.0);
        EXPECT_EQ(vf_shortrunB(p, {0.0, ye}).y_d, 0.0);
    }
}

TEST(ShortRunB, DemandIsoclineIsUnitExpectations) {
    ModelParams p = hopf_a_params(0.0);
    p.eta_d = 0.5;
    for (double yd : {0.3, 1.0, 2.0}) EXPECT_EQ(vf_shortrunB(p, {yd, 1.0}).y_d, 0.0);
    EXPECT_NE(vf_shortrunB(p, {0.5, 0.9}).y_d, 0.0);
    p.eta_d = 0.0;
    EXPECT_THROW(vf_shortrunB(p, {1.0, 1.0}), DomainError);
}

TEST(Inverse, RoundTripAndEquilibrium) {
    const StateShortRun s{1.5, 1.7};
    const auto back = from_inverse(to_inverse(s));
    EXPECT_NEAR(back.y_d, 1.5, 1e-15);
    EXPECT_NEAR(back.y_e, 1.7, 1e-15);
    const auto one = to_inverse({1.0, 1.0});
    EXPECT_EQ(one.h, 1.0);
    EXPECT_EQ(one.x, 1.0);
    const auto f = vf_inverse(hopf_a_params(0.3), one);
    EXPECT_NEAR(f.h, 0.0, 1e-15);
    EXPECT_NEAR(f.x, 0.0, 1e-15);
    EXPECT_THROW(to_inverse({0.0, 1.0}), DomainError);
}

TEST(Inverse, PushforwardOfPlanarField) {
    ModelParams p = hopf_a_params(0.3);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> U(0.2, 2.5);
    for (int k = 0; k < 10; ++k) {
        const StateShortRun s{U(rng), U(rng)};
        const auto f = vf_shortrunA(p, s);
        const double hdot = -f.y_d / (s.y_d * s.y_d);
        const double xdot = (f.y_d * s.y_e - s.y_d * f.y_e) / (s.y_e * s.y_e);
        const auto g = vf_inverse(p, to_inverse(s));
        EXPECT_NEAR(g.h, hdot, 1e-10 * std::max(1.0, std::abs(hdot)));
        EXPECT_NEAR(g.x, xdot, 1e-10 * std::max(1.0, std::abs(xdot)));
    }
}

TEST(Franke2D, CalibratedEquilibrium) {
    ModelParams p;
    p.f_d = 0.2;
    p.eta_d = 0.5;
    p.eta_e = 1.0;
    p.franke.u_bar = 0.4;
    const double ybar = 1.0 / (1.0 + (p.alpha + p.beta) * p.f_d);
    const StateFranke eq{p.f_d * 0.4 * ybar, 0.4 * ybar};
    const auto f = vf_franke2d(p, eq);
    EXPECT_LT(std::abs(f.v), 1e-15);
    EXPECT_LT(std::abs(f.z), 1e-15);
    EXPECT_NEAR(franke_utilization(p, eq), 0.4, 1e-15);
    EXPECT_NEAR(eq.z, ybar * franke_utilization(p, eq), 1e-15);
}

TEST(VariantTable, NamesAndDimensions) {
    ModelParams p = full_params();
    for (auto v : kAllVariants) {
        EXPECT_EQ(parse_variant(variant_name(v)), v);
        const auto names = integrated_names(v);
        Vec y = Vec::Constant(static_cast<Eigen::Index>(names.size()), 0.6);
        EXPECT_EQ(integrated_field(v, p, y).size(), y.size()) << variant_name(v);
    }
    EXPECT_THROW(parse_variant("nonsense"), ParseError);
}
