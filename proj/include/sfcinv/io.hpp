#pragma once

// Report emission: CSV at 17 significant digits with '#' footers, JSON with a schema_version.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sfcinv/scenario.hpp"

namespace sfcinv::io {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

inline std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// JSON has no NaN or infinity; they become null.
inline Json num(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

inline Json vec_json(const Vec& v) {
    Json a = Json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(num(v[k]));
    return a;
}

inline Json named_json(const std::vector<std::string>& names, const Vec& v) {
    Json o = Json::object();
    for (std::size_t k = 0; k < names.size() && static_cast<Eigen::Index>(k) < v.size(); ++k)
        o[names[k]] = num(v[static_cast<Eigen::Index>(k)]);
    return o;
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

inline Json header(const Scenario& s, const char* kind) {
    Json j = Json::object();
    j["schema_version"] = kSchemaVersion;
    j["kind"] = kind;
    j["variant"] = std::string(variant_name(s.variant));
    return j;
}

// ----------------------------------------------------------------------------
// simulate / portrait
// ----------------------------------------------------------------------------

inline void append_row(std::string& out, const std::vector<double>& xs) {
    for (std::size_t k = 0; k < xs.size(); ++k) {
        if (k) out += ',';
        out += fmt(xs[k]);
    }
    out += '\n';
}

inline std::vector<double> trajectory_row(const Scenario& s, double t, const Vec& y) {
    std::vector<double> row{t};
    for (Eigen::Index k = 0; k < y.size(); ++k) row.push_back(y[k]);
    std::array<double, 5> d{kNaN, kNaN, kNaN, kNaN, kNaN};
    try {
        d = derived_columns(s.variant, s.params, y);
    } catch (const DomainError&) {
    }
    row.insert(row.end(), d.begin(), d.end());
    return row;
}

inline std::string trajectory_columns(const Scenario& s) {
    std::string out = "t";
    for (const auto& n : integrated_names(s.variant)) out += "," + n;
    out += ",y_d,pi_e,i,g,v\n";
    return out;
}

inline void trajectory_footer(std::string& out, const Trajectory& tr, const std::string& prefix = "") {
    out += "# " + prefix + "termination=" + tr.termination_label() + "\n";
    out += "# " + prefix + "t_final=" + fmt(tr.t.empty() ? kNaN : tr.t.back()) + "\n";
    out += "# " + prefix + "accepted_steps=" + std::to_string(tr.accepted_steps) + "\n";
    out += "# " + prefix + "rejected_steps=" + std::to_string(tr.rejected_steps) + "\n";
    if (tr.ended_in_blowup()) {
        const auto b = detect_blowup(tr);
        out += "# " + prefix + "blowup_growth=" + b.growth + "\n";
        out += "# " + prefix + "blowup_t_star=" + fmt(b.t_star) + "\n";
    }
    for (const auto& e : tr.events) out += "# " + prefix + "event=" + e.name + " t=" + fmt(e.t) + "\n";
}

inline std::string trajectory_csv(const Scenario& s, const Trajectory& tr) {
    std::string out = trajectory_columns(s);
    for (std::size_t k = 0; k < tr.t.size(); ++k) append_row(out, trajectory_row(s, tr.t[k], tr.y[k]));
    out += "# variant=" + std::string(variant_name(s.variant)) + "\n";
    trajectory_footer(out, tr);
    return out;
}

inline std::string portrait_csv(const Scenario& s, const std::vector<Trajectory>& trs) {
    std::string out = "start," + trajectory_columns(s);
    for (std::size_t j = 0; j < trs.size(); ++j)
        for (std::size_t k = 0; k < trs[j].t.size(); ++k) {
            out += std::to_string(j) + ",";
            append_row(out, trajectory_row(s, trs[j].t[k], trs[j].y[k]));
        }
    out += "# variant=" + std::string(variant_name(s.variant)) + "\n";
    for (std::size_t j = 0; j < trs.size(); ++j) trajectory_footer(out, trs[j], "start" + std::to_string(j) + ".");
    return out;
}

// ----------------------------------------------------------------------------
// equilibria / stability
// ----------------------------------------------------------------------------

inline Json equilibrium_json(const EquilibriumReport& r) {
    Json j = Json::object();
    j["label"] = r.label;
    j["kind"] = kind_name(r.kind);
    j["coords"] = named_json(r.names.empty() ? integrated_names(r.variant) : r.names, r.coords);
    j["residual"] = num(r.residual);
    j["certified"] = r.certified;
    j["marker"] = r.marker;
    j["in_box"] = r.in_box;
    j["iterations"] = r.iterations;
    j["seed"] = r.seed;
    j["notes"] = r.notes;
    Json vals = Json::object();
    for (const auto& [k, v] : r.values) vals[k] = num(v);
    j["values"] = vals;
    return j;
}

inline Json quadratic_json(const QuadraticLedger& q) {
    auto arr = [](const std::vector<double>& xs) {
        Json a = Json::array();
        for (double x : xs) a.push_back(num(x));
        return a;
    };
    Json j = Json::object();
    j["pi_bar"] = num(q.pi_bar);
    j["printed"] = {{"A1", num(q.A1)}, {"A2", num(q.A2)}, {"A3", num(q.A3)}, {"discriminant", num(q.discriminant)},
                    {"roots", arr(q.printed_roots)}, {"field_residual", arr(q.printed_residual)}};
    j["derived"] = {{"B1", num(q.B1)}, {"B2", num(q.B2)}, {"B3", num(q.B3)}, {"roots", arr(q.derived_roots)}};
    j["direct_roots"] = arr(q.direct_roots);
    j["status"] = q.status;
    return j;
}

inline std::string equilibria_json(const Scenario& s, const EquilibriumSet& set) {
    Json j = header(s, "equilibria");
    Json list = Json::array();
    for (const auto& r : set.reports) list.push_back(equilibrium_json(r));
    j["equilibria"] = list;
    j["diagnostics"] = set.diagnostics;
    if (set.quadratic) j["quadratic"] = quadratic_json(*set.quadratic);
    return dump(j);
}

inline Json stability_json_entry(const StabilityReport& r) {
    Json j = Json::object();
    j["equilibrium"] = r.equilibrium_label;
    j["kind"] = kind_name(r.kind);
    j["coords"] = vec_json(r.coords);
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < r.jacobian.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index k = 0; k < r.jacobian.cols(); ++k) row.push_back(num(r.jacobian(i, k)));
        rows.push_back(row);
    }
    j["jacobian"] = rows;
    j["jacobian_source"] = r.jacobian_source;
    Json ev = Json::array();
    for (Eigen::Index k = 0; k < r.eigenvalues.size(); ++k)
        ev.push_back({{"re", num(r.eigenvalues[k].real())}, {"im", num(r.eigenvalues[k].imag())}});
    j["eigenvalues"] = ev;
    j["classification"] = classification_name(r.classification);
    if (r.routh_hurwitz)
        j["routh_hurwitz"] = {{"stable", r.routh_hurwitz->stable},
                              {"a2", num(r.routh_hurwitz->margin_a2)},
                              {"a0", num(r.routh_hurwitz->margin_a0)},
                              {"a2_a1_minus_a0", num(r.routh_hurwitz->margin_cross)}};
    if (r.printed_conditions) {
        const auto& c = *r.printed_conditions;
        j["printed_conditions"] = {{"condition1", c.condition1}, {"condition2", c.condition2}, {"margin1", num(c.margin1)},
                                   {"margin2", num(c.margin2)},   {"J11", num(c.J11)},          {"J13", num(c.J13)},
                                   {"J31", num(c.J31)},           {"J33", num(c.J33)},          {"J11_negative", c.j11_negative}};
    }
    j["notes"] = r.notes;
    return j;
}

inline std::string stability_json(const Scenario& s, const EquilibriumSet& set) {
    Json j = header(s, "stability");
    Json list = Json::array();
    for (const auto& eq : set.reports) {
        if (eq.marker) {
            list.push_back({{"equilibrium", eq.label}, {"kind", kind_name(eq.kind)}, {"notes", {"asymptotic marker; no Jacobian"}}});
            continue;
        }
        try {
            list.push_back(stability_json_entry(stability_of(eq, s.params)));
        } catch (const std::exception& e) {
            list.push_back({{"equilibrium", eq.label}, {"kind", kind_name(eq.kind)}, {"notes", {std::string("failed: ") + e.what()}}});
        }
    }
    j["reports"] = list;
    return dump(j);
}

// ----------------------------------------------------------------------------
// hopf / basin / audit
// ----------------------------------------------------------------------------

inline std::string hopf_csv(const HopfRecord& h) {
    std::string out = "gamma,max_re\n";
    for (const auto& [g, m] : h.sweep) append_row(out, {g, m});
    out += "# gamma_critical=" + fmt(h.gamma_critical) + "\n";
    return out;
}

inline std::string hopf_json(const Scenario& s, const HopfRecord& h, const std::optional<LyapunovResult>& ly,
                             const std::string& ly_note) {
    Json j = header(s, "hopf");
    j["found"] = h.found;
    j["gamma_critical"] = num(h.gamma_critical);
    j["gamma0_closed_form"] = num(h.gamma0_closed_form);
    j["frequency"] = num(h.frequency);
    j["iterations"] = h.iterations;
    j["note"] = h.note;
    if (ly) j["lyapunov"] = {{"l1", num(ly->l1)}, {"frequency", num(ly->frequency)}, {"regime", ly->regime}};
    else if (!ly_note.empty()) j["lyapunov"] = {{"note", ly_note}};
    return dump(j);
}

inline std::string basin_csv(const BasinMap& m) {
    std::string out = "i_yd,i_ye,y_d,y_e,label,t_end\n";
    for (int i = 0; i < m.grid.n; ++i)
        for (int k = 0; k < m.grid.n; ++k) {
            const auto idx = static_cast<std::size_t>(i * m.grid.n + k);
            out += std::to_string(i) + "," + std::to_string(k) + "," + fmt(m.grid.centre(i)) + "," + fmt(m.grid.centre(k)) + "," +
                   basin_label_name(m.labels[idx]) + "," + fmt(m.end_times[idx]) + "\n";
        }
    for (auto b : {BasinLabel::ToBalanced, BasinLabel::ToCollapse, BasinLabel::BlowUp, BasinLabel::Undecided})
        out += "# count." + basin_label_name(b) + "=" + std::to_string(m.count(b)) + "\n";
    out += "# t_max=" + fmt(m.budget.t_max) + "\n";
    return out;
}

inline std::string ledger_csv(const LedgerSeries& L) {
    std::string out;
    bool first = true;
    for (const auto& [name, ptr] : ledger_fields()) {
        out += (first ? "" : ",") + std::string(name);
        first = false;
    }
    out += '\n';
    std::vector<double> row;
    for (const auto& s : L.rows) {
        row.clear();
        for (const auto& [name, ptr] : ledger_fields()) row.push_back(s.*ptr);
        append_row(out, row);
    }
    out += std::string("# deposits=") + (L.mode == DepositMode::Pooled ? "pooled" : "separate") + "\n";
    out += "# r=" + fmt(L.r) + "\n# r_m=" + fmt(L.r_m) + "\n";
    return out;
}

inline std::string audit_json(const Scenario& s, const LedgerSeries& L, const AuditReport& a) {
    Json j = header(s, "sfc-audit");
    j["deposits"] = L.mode == DepositMode::Pooled ? "pooled" : "separate";
    j["tolerance"] = a.tolerance;
    j["samples"] = a.samples;
    j["all_pass"] = a.all_pass();
    j["flagged_count"] = a.flagged_count();
    Json ids = Json::array();
    for (const auto& r : a.identities)
        ids.push_back({{"name", r.name}, {"max_violation", num(r.max_violation)}, {"at_t", num(r.at_t)}, {"flagged", r.flagged}});
    j["identities"] = ids;
    Json cc = Json::object();
    for (const auto& [k, v] : L.cross_checks) cc[k] = num(v);
    j["cross_checks"] = cc;
    return dump(j);
}

} // namespace sfcinv::io
