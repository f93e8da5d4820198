#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sfcinv/equilibrium.hpp"
#include "sfcinv/ledger.hpp"
#include "sfcinv/stability.hpp"
#include "sfcinv/toml.hpp"

namespace sfcinv {

struct HopfOptions {
    double gamma_lo = 0.0;
    double gamma_hi = 1.0;
    int sweep = 101;
    bool lyapunov = true;
};

struct PortraitOptions {
    std::vector<Vec> starts;
    double t_end = kNaN; ///< NaN uses solver.t_end
};

struct BasinOptions {
    BasinGrid grid;
    double t_max = 2000.0;
    double ball = 1e-3;
};

struct AuditOptions {
    DepositMode mode = DepositMode::Pooled;
    InitialLevels levels;
    double tolerance = 1e-8;
};

struct Scenario {
    ModelVariant variant = ModelVariant::Full5D;
    bool allow_inadmissible = false;
    ModelParams params;
    Vec initial; ///< integrated coordinates; empty when [initial] is absent
    double t0 = 0.0;
    double t_end = 100.0;
    SolverOptions solver;
    SearchBox box;
    HopfOptions hopf;
    PortraitOptions portrait;
    BasinOptions basin;
    AuditOptions audit;
    std::string out_dir = "out";
};

namespace scenario_detail {

using toml::Value;

/// Walks one table, handing out keys and remembering which were read so that anything left
/// over can be reported as unknown.
class Table {
public:
    Table(const Value* v, std::string path) : v_(v), path_(std::move(path)) {
        if (v_ && !v_->is_object()) throw ParseError(path_, "expected a table");
    }

    bool present() const { return v_ != nullptr; }
    std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

    const Value* raw(const std::string& k) {
        seen_.insert(k);
        if (!v_) return nullptr;
        auto it = v_->find(k);
        return it == v_->end() ? nullptr : &*it;
    }

    Table sub(const std::string& k) {
        const Value* v = raw(k);
        return Table(v, key(k));
    }

    void number(const std::string& k, double& out) {
        if (const Value* v = raw(k)) out = as_number(*v, key(k));
    }

    void integer(const std::string& k, int& out) {
        if (const Value* v = raw(k)) {
            if (!v->is_number_integer()) throw ParseError(key(k), "expected an integer");
            out = v->get<int>();
        }
    }

    void boolean(const std::string& k, bool& out) {
        if (const Value* v = raw(k)) {
            if (!v->is_boolean()) throw ParseError(key(k), "expected true or false");
            out = v->get<bool>();
        }
    }

    bool string(const std::string& k, std::string& out) {
        if (const Value* v = raw(k)) {
            if (!v->is_string()) throw ParseError(key(k), "expected a string");
            out = v->get<std::string>();
            return true;
        }
        return false;
    }

    void reject_unknown() const {
        if (!v_) return;
        for (const auto& [k, v] : v_->items())
            if (!seen_.count(k)) throw ParseError(key(k), "unknown key");
    }

    static double as_number(const Value& v, const std::string& key) {
        if (!v.is_number()) throw ParseError(key, "expected a number");
        return v.get<double>();
    }

private:
    const Value* v_;
    std::string path_;
    std::set<std::string> seen_;
};

template <class E>
E pick(const std::string& key, const std::string& name, const std::vector<std::pair<std::string, E>>& options) {
    std::string allowed;
    for (const auto& [n, e] : options) {
        if (n == name) return e;
        allowed += (allowed.empty() ? "" : ", ") + n;
    }
    throw ParseError(key, "unknown form '" + name + "' (expected one of " + allowed + ")");
}

template <class E>
std::string name_of(E e, const std::vector<std::pair<std::string, E>>& options) {
    for (const auto& [n, x] : options)
        if (x == e) return n;
    return "?";
}

inline const std::vector<std::pair<std::string, PhillipsForm>>& phillips_forms() {
    static const std::vector<std::pair<std::string, PhillipsForm>> f{{"divergent", PhillipsForm::Divergent},
                                                                     {"exponential", PhillipsForm::Exponential}};
    return f;
}
inline const std::vector<std::pair<std::string, KappaForm>>& kappa_forms() {
    static const std::vector<std::pair<std::string, KappaForm>> f{
        {"exponential", KappaForm::Exponential}, {"logistic", KappaForm::Logistic}, {"linear", KappaForm::Linear}};
    return f;
}
inline const std::vector<std::pair<std::string, DepreciationForm>>& depreciation_forms() {
    static const std::vector<std::pair<std::string, DepreciationForm>> f{{"constant", DepreciationForm::Constant},
                                                                         {"linear_in_u", DepreciationForm::LinearInU}};
    return f;
}
inline const std::vector<std::pair<std::string, GrowthForm>>& growth_forms() {
    static const std::vector<std::pair<std::string, GrowthForm>> f{
        {"constant_natural", GrowthForm::ConstantNatural}, {"capital_growth", GrowthForm::CapitalGrowth}, {"zero", GrowthForm::Zero}};
    return f;
}
inline const std::vector<std::pair<std::string, DepositMode>>& deposit_modes() {
    static const std::vector<std::pair<std::string, DepositMode>> f{{"pooled", DepositMode::Pooled},
                                                                    {"separate", DepositMode::Separate}};
    return f;
}

/// Parameters a variant cannot run without; everything else has a default.
inline std::vector<std::string> required_params(ModelVariant v) {
    switch (v) {
    case ModelVariant::ShortRunA:
    case ModelVariant::ShortRunB:
    case ModelVariant::ShortRunInverse:
    case ModelVariant::ShortRun5D: return {"eta_q", "eta_e", "eta_d", "f_d"};
    case ModelVariant::Franke2D: return {"eta_e", "eta_d", "f_d"};
    case ModelVariant::MonetaryKeen: return {"eta_p"};
    case ModelVariant::LongRunMonetary3D: return {"eta_p", "eta_q", "u0"};
    default: return {};
    }
}

inline void read_params(Table t, ModelParams& p, ModelVariant v) {
    if (t.present())
        for (const auto& k : required_params(v))
            if (!t.raw(k)) throw ParseError(t.key(k), "required for variant " + std::string(variant_name(v)));
    if (!t.present() && !required_params(v).empty())
        throw ParseError(t.key(required_params(v).front()), "required for variant " + std::string(variant_name(v)));
    t.number("nu", p.nu);
    t.number("alpha", p.alpha);
    t.number("beta", p.beta);
    t.number("r", p.r);
    t.number("markup", p.markup);
    t.number("eta_p", p.eta_p);
    t.number("eta_q", p.eta_q);
    t.number("eta_e", p.eta_e);
    t.number("eta_d", p.eta_d);
    t.number("f_d", p.f_d);
    t.number("gamma", p.gamma);
    t.number("c1", p.consumption.c1);
    t.number("c2", p.consumption.c2);
    t.number("u0", p.u0);
    t.number("r_m", p.r_m);
    t.reject_unknown();
}

inline void read_forms(Table t, ModelParams& p) {
    std::string name;
    {
        auto s = t.sub("phillips");
        if (s.string("form", name)) p.phillips.form = pick(s.key("form"), name, phillips_forms());
        s.number("phi0", p.phillips.phi0);
        s.number("phi1", p.phillips.phi1);
        s.number("phi2", p.phillips.phi2);
        s.reject_unknown();
    }
    {
        auto s = t.sub("kappa");
        if (s.string("form", name)) p.kappa.form = pick(s.key("form"), name, kappa_forms());
        s.number("k0", p.kappa.k0);
        s.number("k1", p.kappa.k1);
        s.number("k2", p.kappa.k2);
        s.reject_unknown();
    }
    {
        auto s = t.sub("depreciation");
        if (s.string("form", name)) p.depreciation.form = pick(s.key("form"), name, depreciation_forms());
        s.number("delta", p.depreciation.delta);
        s.reject_unknown();
    }
    {
        auto s = t.sub("growth_expectation");
        if (s.string("form", name)) p.growth.form = pick(s.key("form"), name, growth_forms());
        s.reject_unknown();
    }
    {
        auto s = t.sub("franke");
        s.number("h0", p.franke.h0);
        s.number("h1", p.franke.h1);
        s.number("e0", p.franke.e0);
        s.number("e1", p.franke.e1);
        s.number("u_bar", p.franke.u_bar);
        s.reject_unknown();
    }
    t.reject_unknown();
}

inline Vec read_point(const Value& v, const std::string& key, std::size_t dim) {
    if (!v.is_array() || v.size() != dim) throw ParseError(key, "expected an array of " + std::to_string(dim) + " numbers");
    Vec out(static_cast<Eigen::Index>(dim));
    for (std::size_t k = 0; k < dim; ++k) out[static_cast<Eigen::Index>(k)] = Table::as_number(v[k], key);
    return out;
}

inline void read_analysis(Table t, Scenario& s) {
    const std::size_t dim = integrated_names(s.variant).size();
    {
        auto a = t.sub("equilibria");
        a.number("omega_max", s.box.omega_max);
        a.number("d_max", s.box.d_max);
        a.integer("seeds", s.box.n);
        a.reject_unknown();
    }
    {
        auto a = t.sub("hopf");
        a.number("gamma_lo", s.hopf.gamma_lo);
        a.number("gamma_hi", s.hopf.gamma_hi);
        a.integer("sweep", s.hopf.sweep);
        a.boolean("lyapunov", s.hopf.lyapunov);
        a.reject_unknown();
        if (!(s.hopf.gamma_lo < s.hopf.gamma_hi)) throw ParseError(a.key("gamma_hi"), "must exceed gamma_lo");
        if (s.hopf.sweep < 2) throw ParseError(a.key("sweep"), "need at least two sweep points");
    }
    {
        auto a = t.sub("portrait");
        if (const Value* st = a.raw("starts")) {
            if (!st->is_array()) throw ParseError(a.key("starts"), "expected an array of points");
            s.portrait.starts.clear();
            for (const auto& e : *st) s.portrait.starts.push_back(read_point(e, a.key("starts"), dim));
        }
        a.number("t_end", s.portrait.t_end);
        a.reject_unknown();
    }
    {
        auto a = t.sub("basin");
        a.number("lo", s.basin.grid.lo);
        a.number("hi", s.basin.grid.hi);
        a.integer("n", s.basin.grid.n);
        a.number("t_max", s.basin.t_max);
        a.number("ball", s.basin.ball);
        a.reject_unknown();
        if (!(s.basin.grid.lo < s.basin.grid.hi)) throw ParseError(a.key("hi"), "must exceed lo");
        if (s.basin.grid.n < 1) throw ParseError(a.key("n"), "must be positive");
    }
    {
        auto a = t.sub("audit");
        std::string mode;
        if (a.string("deposits", mode)) s.audit.mode = pick(a.key("deposits"), mode, deposit_modes());
        a.number("tolerance", s.audit.tolerance);
        a.number("K0", s.audit.levels.K0);
        a.number("p0", s.audit.levels.p0);
        a.number("a0", s.audit.levels.a0);
        a.number("N0", s.audit.levels.N0);
        a.number("w0", s.audit.levels.w0);
        a.number("V0", s.audit.levels.V0);
        a.number("D0", s.audit.levels.D0);
        a.number("M0", s.audit.levels.M0);
        a.reject_unknown();
    }
    t.reject_unknown();
}

} // namespace scenario_detail

/// Builds a scenario from a parsed TOML tree. Unknown keys, missing required keys, type
/// mismatches and inadmissible forms raise ParseError naming the key.
inline Scenario scenario_from_tree(const toml::Value& root) {
    using namespace scenario_detail;
    Table top(&root, "");
    Scenario s;
    {
        auto m = top.sub("model");
        std::string name;
        if (!m.present() || !m.string("variant", name)) throw ParseError("model.variant", "missing required key");
        s.variant = parse_variant(name);
        m.boolean("allow_inadmissible", s.allow_inadmissible);
        m.reject_unknown();
    }
    read_params(top.sub("params"), s.params, s.variant);
    read_forms(top.sub("forms"), s.params);
    {
        auto t = top.sub("initial");
        if (t.present()) {
            const auto names = integrated_names(s.variant);
            s.initial.resize(static_cast<Eigen::Index>(names.size()));
            for (std::size_t k = 0; k < names.size(); ++k) {
                const toml::Value* v = t.raw(names[k]);
                if (!v) throw ParseError(t.key(names[k]), "missing initial state component");
                s.initial[static_cast<Eigen::Index>(k)] = Table::as_number(*v, t.key(names[k]));
            }
            t.reject_unknown();
        }
    }
    {
        auto t = top.sub("solver");
        t.number("rtol", s.solver.rtol);
        t.number("atol", s.solver.atol);
        t.number("h0", s.solver.h0);
        t.number("hmax", s.solver.hmax);
        t.number("t0", s.t0);
        t.number("t_end", s.t_end);
        t.number("blowup_norm", s.solver.blowup_norm);
        double max_steps = static_cast<double>(s.solver.max_steps);
        t.number("max_steps", max_steps);
        s.solver.max_steps = static_cast<long>(max_steps);
        t.reject_unknown();
        if (!(s.solver.rtol > 0.0) || !(s.solver.atol > 0.0)) throw ParseError("solver.rtol", "tolerances must be positive");
        if (!(s.t_end > s.t0)) throw ParseError("solver.t_end", "must exceed t0");
    }
    read_analysis(top.sub("analysis"), s);
    {
        auto t = top.sub("output");
        t.string("dir", s.out_dir);
        t.reject_unknown();
    }
    top.reject_unknown();

    if (!s.allow_inadmissible) {
        const auto rep = validate_forms(s.params);
        if (!rep.admissible()) {
            const auto& v = rep.violations.front();
            throw ParseError("forms", v.code + ": " + v.message + " (set model.allow_inadmissible = true to proceed)");
        }
    }
    return s;
}

/// Applies `a.b.c=value` to the tree before it is resolved, so overrides go through the same
/// validation as file contents.
inline void apply_override(toml::Value& root, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ParseError(assignment, "override must look like key=value");
    std::string key = assignment.substr(0, eq);
    while (!key.empty() && key.back() == ' ') key.pop_back();
    std::vector<std::string> path;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        path.push_back(key.substr(start, dot - start));
        if (path.back().empty()) throw ParseError(key, "empty key component");
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    toml::Value* t = &root;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        auto& next = (*t)[path[k]];
        if (next.is_null()) next = toml::Value::object();
        if (!next.is_object()) throw ParseError(key, "'" + path[k] + "' is not a table");
        t = &next;
    }
    (*t)[path.back()] = toml::parse_value(key, assignment.substr(eq + 1));
}

inline Scenario parse_scenario(const std::string& text, const std::vector<std::string>& overrides = {}) {
    auto tree = toml::parse(text);
    for (const auto& o : overrides) apply_override(tree, o);
    return scenario_from_tree(tree);
}

inline Scenario load_scenario(const std::string& path, const std::vector<std::string>& overrides = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("", "cannot open scenario file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), overrides);
}

/// Fully resolved tree; NaN-valued optional entries (meaning "derive it") are left out.
inline toml::Value scenario_tree(const Scenario& s) {
    using namespace scenario_detail;
    toml::Value root = toml::Value::object();
    auto put = [](toml::Value& t, const char* k, double x) {
        if (!std::isnan(x)) t[k] = x;
    };
    root["model"]["variant"] = std::string(variant_name(s.variant));
    root["model"]["allow_inadmissible"] = s.allow_inadmissible;

    const auto& p = s.params;
    auto& pr = root["params"];
    put(pr, "nu", p.nu);
    put(pr, "alpha", p.alpha);
    put(pr, "beta", p.beta);
    put(pr, "r", p.r);
    put(pr, "markup", p.markup);
    put(pr, "eta_p", p.eta_p);
    put(pr, "eta_q", p.eta_q);
    put(pr, "eta_e", p.eta_e);
    put(pr, "eta_d", p.eta_d);
    put(pr, "f_d", p.f_d);
    put(pr, "gamma", p.gamma);
    put(pr, "c1", p.consumption.c1);
    put(pr, "c2", p.consumption.c2);
    put(pr, "u0", p.u0);
    put(pr, "r_m", p.r_m);

    auto& f = root["forms"];
    f["phillips"]["form"] = name_of(p.phillips.form, phillips_forms());
    put(f["phillips"], "phi0", p.phillips.phi0);
    put(f["phillips"], "phi1", p.phillips.phi1);
    put(f["phillips"], "phi2", p.phillips.phi2);
    f["kappa"]["form"] = name_of(p.kappa.form, kappa_forms());
    put(f["kappa"], "k0", p.kappa.k0);
    put(f["kappa"], "k1", p.kappa.k1);
    put(f["kappa"], "k2", p.kappa.k2);
    f["depreciation"]["form"] = name_of(p.depreciation.form, depreciation_forms());
    put(f["depreciation"], "delta", p.depreciation.delta);
    f["growth_expectation"]["form"] = name_of(p.growth.form, growth_forms());
    f["franke"] = toml::Value::object();
    put(f["franke"], "h0", p.franke.h0);
    put(f["franke"], "h1", p.franke.h1);
    put(f["franke"], "e0", p.franke.e0);
    put(f["franke"], "e1", p.franke.e1);
    put(f["franke"], "u_bar", p.franke.u_bar);

    if (s.initial.size() > 0) {
        const auto names = integrated_names(s.variant);
        auto& in = root["initial"];
        for (std::size_t k = 0; k < names.size(); ++k) in[names[k]] = s.initial[static_cast<Eigen::Index>(k)];
    }

    auto& so = root["solver"];
    so["rtol"] = s.solver.rtol;
    so["atol"] = s.solver.atol;
    so["h0"] = s.solver.h0;
    so["hmax"] = s.solver.hmax;
    so["t0"] = s.t0;
    so["t_end"] = s.t_end;
    so["blowup_norm"] = s.solver.blowup_norm;
    so["max_steps"] = static_cast<long long>(s.solver.max_steps);

    auto& an = root["analysis"];
    an["equilibria"]["omega_max"] = s.box.omega_max;
    an["equilibria"]["d_max"] = s.box.d_max;
    an["equilibria"]["seeds"] = s.box.n;
    an["hopf"]["gamma_lo"] = s.hopf.gamma_lo;
    an["hopf"]["gamma_hi"] = s.hopf.gamma_hi;
    an["hopf"]["sweep"] = s.hopf.sweep;
    an["hopf"]["lyapunov"] = s.hopf.lyapunov;
    an["portrait"] = toml::Value::object();
    if (!s.portrait.starts.empty()) {
        toml::Value starts = toml::Value::array();
        for (const auto& x : s.portrait.starts) {
            toml::Value pt = toml::Value::array();
            for (Eigen::Index k = 0; k < x.size(); ++k) pt.push_back(x[k]);
            starts.push_back(pt);
        }
        an["portrait"]["starts"] = starts;
    }
    put(an["portrait"], "t_end", s.portrait.t_end);
    an["basin"]["lo"] = s.basin.grid.lo;
    an["basin"]["hi"] = s.basin.grid.hi;
    an["basin"]["n"] = s.basin.grid.n;
    an["basin"]["t_max"] = s.basin.t_max;
    an["basin"]["ball"] = s.basin.ball;
    auto& au = an["audit"];
    au["deposits"] = name_of(s.audit.mode, deposit_modes());
    au["tolerance"] = s.audit.tolerance;
    put(au, "K0", s.audit.levels.K0);
    put(au, "p0", s.audit.levels.p0);
    put(au, "a0", s.audit.levels.a0);
    put(au, "N0", s.audit.levels.N0);
    put(au, "w0", s.audit.levels.w0);
    put(au, "V0", s.audit.levels.V0);
    put(au, "D0", s.audit.levels.D0);
    put(au, "M0", s.audit.levels.M0);

    root["output"]["dir"] = s.out_dir;
    return root;
}

inline std::string serialize_scenario(const Scenario& s) { return toml::serialize(scenario_tree(s)); }

} // namespace sfcinv
