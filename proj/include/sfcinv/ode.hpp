#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"
#include "model.hpp"

namespace sfcinv {

// ============================================================================
// Options, events, trajectories
// ============================================================================

struct SolverOptions {
    double rtol = 1e-8;
    double atol = 1e-10;
    double h0 = 0.0;   ///< 0 selects the initial step automatically
    double hmax = std::numeric_limits<double>::infinity();
    long max_steps = 2'000'000;
    double blowup_norm = 1e8;
    double min_step_factor = 1e-12; ///< minimum step as a fraction of the time span
    bool store_samples = true;      ///< false keeps only the first and last sample
};

enum class Direction { Rising, Falling, Both };

struct EventSpec {
    std::string name;
    std::function<double(double, const Vec&)> fn;
    Direction direction = Direction::Both;
    bool terminal = false;
    int max_count = 0; ///< when > 0 the event becomes terminal at its max_count-th occurrence
};

struct EventRecord {
    std::string name;
    double t = 0.0;
    Vec y;
    int direction = 0; ///< +1 rising, -1 falling
};

enum class Termination { ReachedEnd, Event, BlowUp, StepCollapse, MaxSteps };

inline std::string termination_name(Termination t) {
    switch (t) {
    case Termination::ReachedEnd: return "reached-t-end";
    case Termination::Event: return "event";
    case Termination::BlowUp: return "blow-up";
    case Termination::StepCollapse: return "step-collapse";
    case Termination::MaxSteps: return "max-steps";
    }
    return "?";
}

struct Trajectory {
    std::vector<double> t;
    std::vector<Vec> y;
    std::vector<Vec> f; ///< vector field at each sample, used for Hermite dense output
    Termination termination = Termination::ReachedEnd;
    std::string termination_event; ///< name of the terminal event, if any
    std::vector<EventRecord> events;
    long accepted_steps = 0;
    long rejected_steps = 0;
    long evaluations = 0;

    std::size_t size() const { return t.size(); }
    const Vec& back() const { return y.back(); }
    bool ended_in_blowup() const {
        return termination == Termination::BlowUp || termination == Termination::StepCollapse;
    }
    std::string termination_label() const {
        return termination == Termination::Event ? termination_event : termination_name(termination);
    }

    /// Cubic Hermite interpolation between stored samples.
    Vec interpolate(double tq) const {
        if (t.empty()) throw DomainError("empty trajectory");
        if (tq <= t.front()) return y.front();
        if (tq >= t.back()) return y.back();
        const auto it = std::upper_bound(t.begin(), t.end(), tq);
        const std::size_t k = static_cast<std::size_t>(it - t.begin()) - 1;
        return hermite(k, tq);
    }

    /// Time derivative of the Hermite interpolant.
    Vec interpolate_derivative(double tq) const {
        if (t.size() < 2) return f.front();
        std::size_t k;
        if (tq <= t.front()) k = 0;
        else if (tq >= t.back()) k = t.size() - 2;
        else k = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), tq) - t.begin()) - 1;
        const double h = t[k + 1] - t[k];
        const double s = (tq - t[k]) / h;
        const double d00 = 6.0 * s * s - 6.0 * s;
        const double d10 = 3.0 * s * s - 4.0 * s + 1.0;
        const double d01 = -6.0 * s * s + 6.0 * s;
        const double d11 = 3.0 * s * s - 2.0 * s;
        return (d00 * y[k] + d01 * y[k + 1]) / h + d10 * f[k] + d11 * f[k + 1];
    }

private:
    Vec hermite(std::size_t k, double tq) const {
        const double h = t[k + 1] - t[k];
        const double s = (tq - t[k]) / h;
        const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        const double h10 = s * (1.0 - s) * (1.0 - s);
        const double h01 = s * s * (3.0 - 2.0 * s);
        const double h11 = s * s * (s - 1.0);
        return h00 * y[k] + h * h10 * f[k] + h01 * y[k + 1] + h * h11 * f[k + 1];
    }
};

// ============================================================================
// Dormand-Prince 5(4)
// ============================================================================

namespace detail {

struct DP5 {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;
};

inline bool all_finite(const Vec& v) { return v.allFinite(); }

struct StepResult {
    Vec y;
    Vec f;   ///< field at the new point (FSAL)
    Vec err; ///< embedded error estimate
    bool ok = false;
};

/// One Dormand-Prince step; ok=false when a stage is non-finite or outside the field's domain.
inline StepResult dp_step(const VectorField& vf, double t, const Vec& y, const Vec& k1, double h, long& nfev,
                          bool want_error = true) {
    using C = DP5;
    StepResult out;
    try {
        const Vec k2 = vf(t + C::c2 * h, y + h * (C::a21 * k1));
        const Vec k3 = vf(t + C::c3 * h, y + h * (C::a31 * k1 + C::a32 * k2));
        const Vec k4 = vf(t + C::c4 * h, y + h * (C::a41 * k1 + C::a42 * k2 + C::a43 * k3));
        const Vec k5 = vf(t + C::c5 * h, y + h * (C::a51 * k1 + C::a52 * k2 + C::a53 * k3 + C::a54 * k4));
        const Vec k6 =
            vf(t + h, y + h * (C::a61 * k1 + C::a62 * k2 + C::a63 * k3 + C::a64 * k4 + C::a65 * k5));
        nfev += 5;
        out.y = y + h * (C::b1 * k1 + C::b3 * k3 + C::b4 * k4 + C::b5 * k5 + C::b6 * k6);
        if (!all_finite(out.y) || !all_finite(k2) || !all_finite(k3) || !all_finite(k4) || !all_finite(k5) ||
            !all_finite(k6))
            return out;
        out.f = vf(t + h, out.y);
        ++nfev;
        if (!all_finite(out.f)) return out;
        if (want_error)
            out.err = h * (C::e1 * k1 + C::e3 * k3 + C::e4 * k4 + C::e5 * k5 + C::e6 * k6 + C::e7 * out.f);
        out.ok = true;
    } catch (const DomainError&) {
        out.ok = false;
    }
    return out;
}

inline double error_norm(const Vec& err, const Vec& y0, const Vec& y1, double rtol, double atol) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double sk = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const double q = err[i] / sk;
        acc += q * q;
    }
    return std::sqrt(acc / static_cast<double>(err.size()));
}

inline double initial_step(const VectorField& vf, double t0, const Vec& y0, const Vec& f0, double rtol,
                           double atol, double hmax, long& nfev) {
    Vec sk = (atol + rtol * y0.array().abs()).matrix();
    const double d0 = std::sqrt((y0.array() / sk.array()).square().mean());
    const double d1 = std::sqrt((f0.array() / sk.array()).square().mean());
    double h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h = std::min(h, hmax);
    try {
        const Vec f1 = vf(t0 + h, y0 + h * f0);
        ++nfev;
        const double d2 = std::sqrt(((f1 - f0).array() / sk.array()).square().mean()) / h;
        const double dm = std::max(d1, d2);
        const double h1 = dm <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / dm, 1.0 / 5.0);
        if (std::isfinite(h1)) h = std::min({100.0 * h, h1, hmax});
    } catch (const DomainError&) {
    }
    return h;
}

inline int crossing_sign(double g0, double g1, Direction dir) {
    const bool rising = g0 < 0.0 && g1 >= 0.0;
    const bool falling = g0 > 0.0 && g1 <= 0.0;
    if (rising && dir != Direction::Falling) return +1;
    if (falling && dir != Direction::Rising) return -1;
    return 0;
}

} // namespace detail

/// Adaptive Dormand-Prince 5(4) integration with PI step control and event location.
/// Event times are refined by safeguarded bracketing (Illinois steps with bisection
/// fallback) on states obtained by re-stepping from the left end of the step.
inline Trajectory integrate(const VectorField& vf, const Vec& y0, double t0, double t1, const SolverOptions& opt,
                            const std::vector<EventSpec>& events = {}) {
    if (!(t1 > t0)) throw DomainError("integrate: t_span must satisfy t1 > t0");
    if (!(opt.rtol > 0.0) || !(opt.atol > 0.0)) throw DomainError("integrate: tolerances must be positive");

    Trajectory tr;
    Vec y = y0;
    Vec f;
    try {
        f = vf(t0, y);
    } catch (const DomainError& e) {
        throw NonFiniteError(std::string("vector field undefined at initial state: ") + e.what());
    }
    ++tr.evaluations;
    if (!detail::all_finite(f) || !detail::all_finite(y)) throw NonFiniteError("vector field not finite at initial state");

    tr.t.push_back(t0);
    tr.y.push_back(y);
    tr.f.push_back(f);

    const double span = t1 - t0;
    const double min_step = opt.min_step_factor * span;
    const double hmax = std::min(opt.hmax, span);
    double h = opt.h0 > 0.0 ? std::min(opt.h0, hmax)
                            : detail::initial_step(vf, t0, y, f, opt.rtol, opt.atol, hmax, tr.evaluations);
    double t = t0;

    std::vector<double> g(events.size());
    std::vector<int> counts(events.size(), 0);
    for (std::size_t k = 0; k < events.size(); ++k) g[k] = events[k].fn(t, y);

    constexpr double safe = 0.9, facmin = 0.2, facmax = 10.0, beta = 0.04;
    const double expo1 = 0.2 - beta * 0.75;
    double facold = 1e-4;
    bool last_rejected = false;

    auto push_sample = [&](double ts, const Vec& ys, const Vec& fs) {
        if (!opt.store_samples && tr.t.size() >= 2) {
            tr.t.back() = ts;
            tr.y.back() = ys;
            tr.f.back() = fs;
            return;
        }
        tr.t.push_back(ts);
        tr.y.push_back(ys);
        tr.f.push_back(fs);
    };

    for (long step = 0;; ++step) {
        if (step >= opt.max_steps) {
            tr.termination = Termination::MaxSteps;
            return tr;
        }
        if (h < min_step) {
            tr.termination = Termination::StepCollapse;
            return tr;
        }
        bool final_step = false;
        if (t + h >= t1) {
            h = t1 - t;
            final_step = true;
        }

        auto res = detail::dp_step(vf, t, y, f, h, tr.evaluations);
        if (!res.ok) {
            ++tr.rejected_steps;
            h *= 0.25;
            last_rejected = true;
            continue;
        }
        const double err = detail::error_norm(res.err, y, res.y, opt.rtol, opt.atol);
        if (!(err <= 1.0)) {
            ++tr.rejected_steps;
            const double fac11 = std::pow(err, expo1);
            h /= std::min(1.0 / facmin, fac11 / safe);
            last_rejected = true;
            continue;
        }

        // Accepted step: look for events inside (t, t+h].
        const double t_new = final_step ? t1 : t + h;
        std::vector<double> g_new(events.size());
        double first_terminal_t = std::numeric_limits<double>::infinity();
        std::size_t first_terminal_k = events.size();
        Vec first_terminal_y;
        std::vector<std::pair<double, EventRecord>> found;
        for (std::size_t k = 0; k < events.size(); ++k) {
            g_new[k] = events[k].fn(t_new, res.y);
            const int dir = detail::crossing_sign(g[k], g_new[k], events[k].direction);
            if (dir == 0) continue;
            // Locate the root of g along re-stepped states.
            double a = 0.0, b = h, ga = g[k], gb = g_new[k];
            Vec yb = res.y;
            int side = 0;
            const double tol = 1e-13 * std::max(1.0, std::abs(t));
            for (int it = 0; it < 200 && (b - a) > tol; ++it) {
                double m = (a * gb - b * ga) / (gb - ga);
                if (!(m > a && m < b) || it % 8 == 7) m = 0.5 * (a + b);
                long dummy = 0;
                auto rs = detail::dp_step(vf, t, y, f, m, dummy, false);
                tr.evaluations += dummy;
                if (!rs.ok) {
                    b = m;
                    continue;
                }
                const double gm = events[k].fn(t + m, rs.y);
                if (gm == 0.0) {
                    a = b = m;
                    yb = rs.y;
                    break;
                }
                if ((gm > 0.0) == (gb > 0.0)) {
                    b = m;
                    gb = gm;
                    yb = rs.y;
                    if (side == -1) ga *= 0.5;
                    side = -1;
                } else {
                    a = m;
                    ga = gm;
                    if (side == +1) gb *= 0.5;
                    side = +1;
                }
            }
            const double te = t + b;
            EventRecord rec{events[k].name, te, yb, dir};
            ++counts[k];
            const bool terminal = events[k].terminal || (events[k].max_count > 0 && counts[k] >= events[k].max_count);
            found.emplace_back(te, rec);
            if (terminal && te < first_terminal_t) {
                first_terminal_t = te;
                first_terminal_k = k;
                first_terminal_y = yb;
            }
        }
        std::sort(found.begin(), found.end(), [](const auto& l, const auto& r) { return l.first < r.first; });

        if (first_terminal_k < events.size()) {
            for (auto& fe : found)
                if (fe.first <= first_terminal_t) tr.events.push_back(fe.second);
            Vec fe;
            try {
                fe = vf(first_terminal_t, first_terminal_y);
            } catch (const DomainError&) {
                fe = res.f;
            }
            ++tr.accepted_steps;
            push_sample(first_terminal_t, first_terminal_y, fe);
            tr.termination = Termination::Event;
            tr.termination_event = events[first_terminal_k].name;
            return tr;
        }
        for (auto& fe : found) tr.events.push_back(fe.second);

        t = t_new;
        y = res.y;
        f = res.f;
        g = g_new;
        ++tr.accepted_steps;
        push_sample(t, y, f);

        if (y.lpNorm<Eigen::Infinity>() > opt.blowup_norm) {
            tr.termination = Termination::BlowUp;
            return tr;
        }
        if (final_step) {
            tr.termination = Termination::ReachedEnd;
            return tr;
        }

        // PI step-size update.
        const double fac11 = std::pow(std::max(err, 1e-16), expo1);
        double fac = fac11 / std::pow(facold, beta);
        fac = std::max(1.0 / facmax, std::min(1.0 / facmin, fac / safe));
        double h_new = h / fac;
        if (last_rejected) h_new = std::min(h_new, h);
        facold = std::max(err, 1e-4);
        last_rejected = false;
        h = std::min(h_new, hmax);
    }
}

// ============================================================================
// Blow-up assessment
// ============================================================================

struct BlowupAssessment {
    bool is_blowup = false;
    double t_star = kNaN;   ///< extrapolated blow-up time
    std::string growth = "none"; ///< none | finite-time | unbounded
    double last_norm = kNaN;
    int samples_used = 0;
};

/// Extrapolates 1/||y||_inf linearly to zero over the last samples of a trajectory
/// that stopped on the norm threshold or a collapsed step.
inline BlowupAssessment detect_blowup(const Trajectory& tr, int window = 6) {
    BlowupAssessment out;
    if (tr.t.empty()) return out;
    out.last_norm = tr.y.back().lpNorm<Eigen::Infinity>();
    if (!tr.ended_in_blowup()) return out;
    const int n = static_cast<int>(tr.t.size());
    const int m = std::min(window, n);
    if (m < 2) return out;
    double tbar = 0.0, zbar = 0.0;
    std::vector<double> ts, zs;
    for (int k = n - m; k < n; ++k) {
        ts.push_back(tr.t[k]);
        zs.push_back(1.0 / tr.y[k].lpNorm<Eigen::Infinity>());
        tbar += ts.back();
        zbar += zs.back();
    }
    tbar /= m;
    zbar /= m;
    double stt = 0.0, stz = 0.0;
    for (int k = 0; k < m; ++k) {
        stt += (ts[k] - tbar) * (ts[k] - tbar);
        stz += (ts[k] - tbar) * (zs[k] - zbar);
    }
    const double slope = stz / stt;
    out.samples_used = m;
    out.is_blowup = true;
    if (slope < 0.0) {
        out.t_star = tbar - zbar / slope;
        const double elapsed = tr.t.back() - tr.t.front();
        out.growth = (out.t_star - tr.t.back()) <= 0.1 * std::max(elapsed, 1e-300) ? "finite-time" : "unbounded";
    } else {
        out.growth = "unbounded";
    }
    return out;
}

// ============================================================================
// Poincare sections
// ============================================================================

struct PoincareResult {
    std::vector<EventRecord> crossings;
    bool complete = false;
    Termination termination = Termination::ReachedEnd;
};

/// Successive crossings of the section (same direction filter as the EventSpec).
inline PoincareResult poincare_section(const VectorField& vf, const Vec& y0, EventSpec section, int n_crossings,
                                       double t_max, SolverOptions opt = {}) {
    section.terminal = false;
    section.max_count = n_crossings;
    opt.store_samples = false;
    const auto tr = integrate(vf, y0, 0.0, t_max, opt, {section});
    PoincareResult out;
    out.crossings = tr.events;
    out.termination = tr.termination;
    out.complete = static_cast<int>(out.crossings.size()) >= n_crossings;
    return out;
}

} // namespace sfcinv
