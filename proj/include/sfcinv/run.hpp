#pragma once

// Subcommand drivers shared by the command-line tool and the tests.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sfcinv/io.hpp"
#include "sfcinv/parallel.hpp"

namespace sfcinv {

struct RunOptions {
    std::filesystem::path out_dir = "out";
    bool strict_inventory = false;
};

struct RunResult {
    std::vector<std::filesystem::path> files;
    std::vector<std::string> summary; ///< short key=value lines for the console
};

inline const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> s{"simulate", "equilibria", "stability", "hopf", "portrait", "basin", "sfc-audit"};
    return s;
}

namespace run_detail {

inline const Vec& require_initial(const Scenario& s) {
    if (s.initial.size() == 0) throw PreconditionError("scenario has no [initial] block");
    return s.initial;
}

inline std::vector<EventSpec> inventory_guard(const Scenario& s, bool strict) {
    if (!strict) return {};
    const ModelVariant v = s.variant;
    const ModelParams p = s.params;
    return {{"inventory-negative",
             [v, p](double, const Vec& y) {
                 try {
                     const double inv = derived_columns(v, p, y)[4];
                     return std::isnan(inv) ? 1.0 : inv;
                 } catch (const DomainError&) {
                     return 1.0;
                 }
             },
             Direction::Falling, true}};
}

inline Trajectory simulate(const Scenario& s, const Vec& x0, double t_end, bool strict) {
    auto guard = inventory_guard(s, strict);
    if (strict) {
        const double inv = guard.front().fn(s.t0, x0);
        if (inv < 0.0) throw PreconditionError("initial inventory ratio is negative");
    }
    return integrate(make_vector_field(s.variant, s.params), x0, s.t0, t_end, s.solver, guard);
}

} // namespace run_detail

inline RunResult run_subcommand(const std::string& cmd, const Scenario& s, const RunOptions& opt) {
    namespace fs = std::filesystem;
    RunResult out;
    auto emit = [&](const std::string& name, const std::string& text) {
        const fs::path path = opt.out_dir / name;
        io::write_text(path, text);
        out.files.push_back(path);
    };

    if (cmd == "simulate") {
        const auto tr = run_detail::simulate(s, run_detail::require_initial(s), s.t_end, opt.strict_inventory);
        emit("simulate.csv", io::trajectory_csv(s, tr));
        out.summary.push_back("termination=" + tr.termination_label());
        out.summary.push_back("t_final=" + io::fmt(tr.t.back()));
    } else if (cmd == "equilibria" || cmd == "stability") {
        const auto set = find_equilibria(s.variant, s.params, s.box);
        if (cmd == "equilibria") emit("equilibria.json", io::equilibria_json(s, set));
        else emit("stability.json", io::stability_json(s, set));
        std::size_t certified = 0;
        for (const auto& r : set.reports) certified += r.certified ? 1 : 0;
        out.summary.push_back("equilibria=" + std::to_string(set.reports.size()));
        out.summary.push_back("certified=" + std::to_string(certified));
    } else if (cmd == "hopf") {
        if (s.variant != ModelVariant::ShortRunA)
            throw PreconditionError("hopf: the scan is defined for shortrun_a, got " + std::string(variant_name(s.variant)));
        const auto h = hopf_scan(s.params, s.hopf.gamma_lo, s.hopf.gamma_hi, s.hopf.sweep);
        std::optional<LyapunovResult> ly;
        std::string ly_note;
        if (s.hopf.lyapunov) {
            try {
                ly = lyapunov_at_gamma0(s.params);
            } catch (const std::exception& e) {
                ly_note = e.what();
            }
        }
        emit("hopf.csv", io::hopf_csv(h));
        emit("hopf.json", io::hopf_json(s, h, ly, ly_note));
        out.summary.push_back("gamma_critical=" + io::fmt(h.gamma_critical));
        if (ly) out.summary.push_back("l1=" + io::fmt(ly->l1) + " (" + ly->regime + ")");
    } else if (cmd == "portrait") {
        if (s.portrait.starts.empty()) throw PreconditionError("portrait: [analysis.portrait] starts is empty");
        const double t_end = std::isnan(s.portrait.t_end) ? s.t_end : s.portrait.t_end;
        std::vector<Trajectory> trs(s.portrait.starts.size());
        parallel_for(trs.size(), [&](std::size_t k) {
            trs[k] = run_detail::simulate(s, s.portrait.starts[k], t_end, opt.strict_inventory);
        });
        emit("portrait.csv", io::portrait_csv(s, trs));
        for (std::size_t k = 0; k < trs.size(); ++k)
            out.summary.push_back("start" + std::to_string(k) + "=" + trs[k].termination_label());
    } else if (cmd == "basin") {
        BasinBudget budget;
        budget.t_max = s.basin.t_max;
        budget.ball = s.basin.ball;
        budget.solver = s.solver;
        const auto map = basin_classify(s.params, s.variant, s.basin.grid, budget);
        emit("basin.csv", io::basin_csv(map));
        for (auto b : {BasinLabel::ToBalanced, BasinLabel::ToCollapse, BasinLabel::BlowUp, BasinLabel::Undecided})
            out.summary.push_back(basin_label_name(b) + "=" + std::to_string(map.count(b)));
    } else if (cmd == "sfc-audit") {
        if (!ledger_supports(s.variant))
            throw PreconditionError("sfc-audit: no ledger for variant " + std::string(variant_name(s.variant)));
        const auto tr = run_detail::simulate(s, run_detail::require_initial(s), s.t_end, opt.strict_inventory);
        ReconstructOptions ro;
        ro.mode = s.audit.mode;
        const auto L = reconstruct(s.params, s.variant, tr, s.audit.levels, ro);
        const auto a = identity_audit(L, s.audit.tolerance);
        emit("ledger.csv", io::ledger_csv(L));
        emit("audit.json", io::audit_json(s, L, a));
        out.summary.push_back("identities=" + std::to_string(a.identities.size()));
        out.summary.push_back("flagged=" + std::to_string(a.flagged_count()));
    } else {
        throw PreconditionError("unknown subcommand '" + cmd + "'");
    }
    return out;
}

} // namespace sfcinv
