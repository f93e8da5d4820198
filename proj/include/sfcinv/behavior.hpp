#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"

namespace sfcinv {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ============================================================================
// Phillips curve
// ============================================================================

enum class PhillipsForm { Divergent, Exponential };

/// Wage-bargaining response Phi(lambda).
/// Divergent:   phi1/(1-lambda)^2 - phi0, blows up at full employment.
/// Exponential: phi1*exp(phi2*lambda) - phi0.
struct PhillipsCurve {
    PhillipsForm form = PhillipsForm::Divergent;
    double phi0 = 0.04;
    double phi1 = 0.0001;
    double phi2 = 1.0;

    double operator()(double lambda) const {
        if (form == PhillipsForm::Divergent) {
            if (!(lambda < 1.0))
                throw DomainError("divergent Phillips curve needs lambda < 1, got " + std::to_string(lambda));
            const double s = 1.0 - lambda;
            return phi1 / (s * s) - phi0;
        }
        return phi1 * std::exp(phi2 * lambda) - phi0;
    }

    double derivative(double lambda) const {
        if (form == PhillipsForm::Divergent) {
            if (!(lambda < 1.0))
                throw DomainError("divergent Phillips curve needs lambda < 1, got " + std::to_string(lambda));
            const double s = 1.0 - lambda;
            return 2.0 * phi1 / (s * s * s);
        }
        return phi1 * phi2 * std::exp(phi2 * lambda);
    }

    /// Greatest lower bound of Phi over the real line (not attained).
    double infimum() const { return -phi0; }

    double inverse(double target) const {
        if (!(target > -phi0) || phi1 <= 0.0)
            throw NoSolutionError("Phillips inverse: target " + std::to_string(target) +
                                  " is not above inf Phi = " + std::to_string(-phi0));
        if (form == PhillipsForm::Divergent) {
            if (std::isinf(target)) return 1.0;
            return 1.0 - std::sqrt(phi1 / (target + phi0));
        }
        if (phi2 == 0.0) throw NoSolutionError("exponential Phillips curve with phi2 = 0 is constant");
        return std::log((target + phi0) / phi1) / phi2;
    }

    /// Antiderivative of (Phi(s) - alpha)/s, used by the Goodwin first integral.
    double integral_over_lambda(double lambda, double alpha) const {
        if (!(lambda > 0.0)) throw DomainError("first integral needs lambda > 0");
        if (form == PhillipsForm::Divergent) {
            if (!(lambda < 1.0)) throw DomainError("first integral needs lambda < 1");
            return phi1 * (std::log(lambda) - std::log1p(-lambda) + 1.0 / (1.0 - lambda)) -
                   (phi0 + alpha) * std::log(lambda);
        }
        return phi1 * std::expint(phi2 * lambda) - (phi0 + alpha) * std::log(lambda);
    }
};

// ============================================================================
// Investment function
// ============================================================================

enum class KappaForm { Exponential, Logistic, Linear };

/// Investment-to-output ratio kappa(pi). Utilization does not enter any of the
/// provided forms; the u argument is kept for the general signature.
/// Exponential: k0 + k1*exp(k2*pi)
/// Logistic:    k0 + k1/(1 + exp(-k2*pi))   (bounded in (k0, k0+k1))
/// Linear:      k0 + k1*pi                  (unbounded; Goodwin reduction uses k0=0, k1=1)
struct InvestmentFunction {
    KappaForm form = KappaForm::Exponential;
    double k0 = -0.0065;
    double k1 = 0.006737946999085467; // exp(-5)
    double k2 = 20.0;

    double operator()(double pi) const {
        switch (form) {
        case KappaForm::Exponential: return k0 + k1 * std::exp(k2 * pi);
        case KappaForm::Logistic: return k0 + k1 / (1.0 + std::exp(-k2 * pi));
        case KappaForm::Linear: return k0 + k1 * pi;
        }
        return kNaN;
    }
    double operator()(double /*u*/, double pi) const { return (*this)(pi); }

    double derivative(double pi) const {
        switch (form) {
        case KappaForm::Exponential: return k1 * k2 * std::exp(k2 * pi);
        case KappaForm::Logistic: {
            const double s = 1.0 / (1.0 + std::exp(-k2 * pi));
            return k1 * k2 * s * (1.0 - s);
        }
        case KappaForm::Linear: return k1;
        }
        return kNaN;
    }

    double lower_limit() const {
        switch (form) {
        case KappaForm::Exponential: return k2 > 0.0 ? k0 : kNaN;
        case KappaForm::Logistic: return k2 > 0.0 ? k0 : k0 + k1;
        case KappaForm::Linear: return k1 > 0.0 ? -kInf : kInf;
        }
        return kNaN;
    }

    double upper_limit() const {
        switch (form) {
        case KappaForm::Exponential: return (k1 > 0.0 && k2 > 0.0) ? kInf : k0;
        case KappaForm::Logistic: return k2 > 0.0 ? k0 + k1 : k0;
        case KappaForm::Linear: return k1 > 0.0 ? kInf : -kInf;
        }
        return kNaN;
    }

    /// Profit share pi with kappa(pi) = target.
    double inverse(double target) const {
        switch (form) {
        case KappaForm::Exponential:
            if (!(target > k0) || k1 <= 0.0 || k2 == 0.0)
                throw NoSolutionError("kappa inverse: target not above lower limit " + std::to_string(k0));
            return std::log((target - k0) / k1) / k2;
        case KappaForm::Logistic:
            if (!(target > k0 && target < k0 + k1) || k2 == 0.0)
                throw NoSolutionError("kappa inverse: target outside (" + std::to_string(k0) + ", " +
                                      std::to_string(k0 + k1) + ")");
            return -std::log(k1 / (target - k0) - 1.0) / k2;
        case KappaForm::Linear:
            if (k1 == 0.0) throw NoSolutionError("kappa inverse: constant linear form");
            return (target - k0) / k1;
        }
        return kNaN;
    }
};

// ============================================================================
// Depreciation, growth expectation, consumption
// ============================================================================

enum class DepreciationForm { Constant, LinearInU };

struct DepreciationRule {
    DepreciationForm form = DepreciationForm::Constant;
    double delta = 0.05;

    double operator()(double u) const { return form == DepreciationForm::Constant ? delta : delta * u; }
    double derivative(double /*u*/) const { return form == DepreciationForm::Constant ? 0.0 : delta; }
};

enum class GrowthForm { ConstantNatural, CapitalGrowth, Zero };

struct GrowthExpectation {
    GrowthForm form = GrowthForm::ConstantNatural;

    /// kappa_value is kappa(u, pi_e), delta_value is delta(u).
    double operator()(double alpha, double beta, double nu, double kappa_value, double delta_value) const {
        switch (form) {
        case GrowthForm::ConstantNatural: return alpha + beta;
        case GrowthForm::CapitalGrowth: return kappa_value / nu - delta_value;
        case GrowthForm::Zero: return 0.0;
        }
        return kNaN;
    }
};

/// theta(omega, d) = c1*omega + c2*d.
struct ConsumptionRule {
    double c1 = 0.9;
    double c2 = 0.03;
    double operator()(double omega, double d) const { return c1 * omega + c2 * d; }
};

/// Affine behaviour functions of the two-dimensional inventory reduction:
/// h(u) = h0 + h1*u (capital growth incl. depreciation), e(u) = e0 - e1*u (expected sales growth).
/// NaN h0/e0 means "calibrate so that the interior point sits at u_bar".
struct FrankeForms {
    double h0 = kNaN;
    double h1 = 0.05;
    double e0 = kNaN;
    double e1 = 0.5;
    double u_bar = 1.0;
};

// ============================================================================
// Parameter bundle
// ============================================================================

struct ModelParams {
    double nu = 3.0;
    double alpha = 0.025;
    double beta = 0.02;
    double r = 0.03;
    double markup = 1.3;
    double eta_p = 0.0;
    double eta_q = 0.0;
    double eta_e = 1.0;
    double eta_d = 0.0;
    double f_d = 0.0;
    double gamma = 0.0;
    double u0 = 1.0;
    double r_m = kNaN; ///< deposit rate; NaN means "equal to r"

    PhillipsCurve phillips;
    InvestmentFunction kappa;
    DepreciationRule depreciation;
    GrowthExpectation growth;
    ConsumptionRule consumption;
    FrankeForms franke;

    double deposit_rate() const { return std::isnan(r_m) ? r : r_m; }
    double eta0() const { return eta_e * (1.0 + f_d * eta_d); }
    /// i = eta_p (m omega - 1), the markup-pricing part of inflation.
    double markup_inflation(double omega) const { return eta_p * (markup * omega - 1.0); }
};

// ============================================================================
// Validation
// ============================================================================

struct FormViolation {
    std::string code;
    std::string message;
};

struct ValidationReport {
    std::vector<FormViolation> violations;
    bool admissible() const { return violations.empty(); }
    bool has(const std::string& code) const {
        for (const auto& v : violations)
            if (v.code == code) return true;
        return false;
    }
};

/// Checks the regularity conditions on Phi and kappa plus sign/range constraints.
/// The depreciation rate is taken at u0.
inline ValidationReport validate_forms(const ModelParams& p) {
    ValidationReport rep;
    auto add = [&](std::string code, std::string msg) { rep.violations.push_back({std::move(code), std::move(msg)}); };

    constexpr int grid = 1000;
    bool phi_ok = p.phillips.phi1 > 0.0 && (p.phillips.form == PhillipsForm::Divergent || p.phillips.phi2 > 0.0);
    for (int k = 0; k < grid && phi_ok; ++k) {
        const double lam = (k + 0.5) / grid;
        if (!(p.phillips.derivative(lam) > 0.0)) phi_ok = false;
    }
    if (!phi_ok) add("phillips-monotone", "Phi must be strictly increasing on (0,1)");
    if (!(p.phillips(0.0) < p.alpha))
        add("Phillips-at-zero", "Phi(0) = " + std::to_string(p.phillips(0.0)) + " is not below alpha");

    bool kappa_ok = p.kappa.k1 > 0.0 && (p.kappa.form == KappaForm::Linear || p.kappa.k2 > 0.0);
    for (int k = 0; k < grid && kappa_ok; ++k) {
        const double pi = -1.0 + 2.0 * (k + 0.5) / grid;
        if (!(p.kappa.derivative(pi) > 0.0)) kappa_ok = false;
    }
    if (!kappa_ok) add("kappa-monotone", "kappa must be strictly increasing");
    const double target = p.nu * (p.alpha + p.beta + p.depreciation(p.u0));
    if (!(p.kappa.lower_limit() < target))
        add("kappa-lower-limit", "lower limit of kappa is not below nu(alpha+beta+delta) = " + std::to_string(target));
    if (!(p.kappa.upper_limit() > target))
        add("kappa-upper-limit", "upper limit of kappa is not above nu(alpha+beta+delta) = " + std::to_string(target));

    if (p.depreciation.delta < 0.0) add("depreciation-negative", "delta must be non-negative");
    if (p.consumption.c1 < 0.0 || p.consumption.c2 < 0.0) add("consumption-negative", "c1 and c2 must be non-negative");
    if (!(p.nu > 0.0)) add("nu-positive", "capital-to-output ratio must be positive");
    if (p.f_d < 0.0) add("f_d-negative", "desired inventory fraction must be non-negative");
    if (p.gamma < 0.0 || p.gamma > 1.0) add("gamma-range", "money illusion must lie in [0,1]");
    if (!(p.markup > 0.0)) add("markup-positive", "markup must be positive");
    if (!(p.u0 > 0.0)) add("u0-positive", "configured utilization must be positive");
    return rep;
}

} // namespace sfcinv
