#include "cqed/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <set>
#include <sstream>

namespace cqed {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// A JSON object together with its dotted path, used to produce precise
/// diagnostics and to reject unknown keys.
class Section {
public:
    Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) throw ConfigError(path_, "expected an object");
    }

    void allow(std::initializer_list<const char*> keys) const {
        std::set<std::string> ok(keys.begin(), keys.end());
        for (const auto& [key, _] : node_.items()) {
            if (!ok.count(key)) throw ConfigError(child(key), "unknown key");
        }
    }

    bool has(const char* key) const { return node_.contains(key); }

    std::string child(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

    void number(const char* key, double& out) const {
        if (!has(key)) return;
        const auto& v = node_.at(key);
        if (!v.is_number()) throw ConfigError(child(key), "expected a number");
        out = v.get<double>();
        if (!std::isfinite(out)) throw ConfigError(child(key), "must be finite");
    }

    void positive(const char* key, double& out) const {
        number(key, out);
        if (has(key) && !(out > 0.0)) throw ConfigError(child(key), "must be positive");
    }

    void non_negative(const char* key, double& out) const {
        number(key, out);
        if (has(key) && !(out >= 0.0)) throw ConfigError(child(key), "must be >= 0");
    }

    template <class Int>
    void integer(const char* key, Int& out) const {
        if (!has(key)) return;
        const auto& v = node_.at(key);
        if (!v.is_number_integer()) throw ConfigError(child(key), "expected an integer");
        if constexpr (std::is_unsigned_v<Int>) {
            if (v.is_number_unsigned()) {
                out = v.get<Int>();
                return;
            }
            if (v.get<long long>() < 0) throw ConfigError(child(key), "must be >= 0");
        }
        out = v.get<Int>();
    }

    void boolean(const char* key, bool& out) const {
        if (!has(key)) return;
        const auto& v = node_.at(key);
        if (!v.is_boolean()) throw ConfigError(child(key), "expected true or false");
        out = v.get<bool>();
    }

    std::string string(const char* key) const {
        const auto& v = node_.at(key);
        if (!v.is_string()) throw ConfigError(child(key), "expected a string");
        return v.get<std::string>();
    }

    Section object(const char* key) const { return Section(node_.at(key), child(key)); }
    const json& raw(const char* key) const { return node_.at(key); }

private:
    const json& node_;
    std::string path_;
};

double parse_beta(const json& v, const std::string& path) {
    if (v.is_string()) {
        if (v.get<std::string>() == "inf") return kInf;
        throw ConfigError(path, "expected a positive number or \"inf\"");
    }
    if (!v.is_number()) throw ConfigError(path, "expected a positive number or \"inf\"");
    const double beta = v.get<double>();
    if (!std::isfinite(beta) || beta <= 0.0) throw ConfigError(path, "must be positive");
    return beta;
}

json beta_to_json(double beta) {
    if (std::isinf(beta)) return "inf";
    return beta;
}

void parse_params(const Section& s, SystemParams& p) {
    s.allow({"alpha", "delta", "variant", "temperature"});
    s.positive("alpha", p.alpha);
    s.number("delta", p.delta);
    if (s.has("variant")) {
        const auto v = parse_variant(s.string("variant"));
        if (!v) throw ConfigError(s.child("variant"), "expected \"literal\" or \"consistent\"");
        p.variant = *v;
    }
    p.temperature = ZeroTemperature{};
    if (s.has("temperature")) {
        const auto& t = s.raw("temperature");
        if (!t.is_null()) {
            const Section ts = s.object("temperature");
            ts.allow({"beta"});
            if (ts.has("beta")) {
                const double beta = parse_beta(ts.raw("beta"), ts.child("beta"));
                if (!std::isinf(beta)) p.temperature = InverseTemperature{beta};
            }
        }
    }
}

void parse_initial(const Section& s, InitialConditions& ic) {
    s.allow({"x", "p", "sx", "sy", "sz", "ax", "ay", "p_tilde", "atx", "aty"});
    s.number("x", ic.x);
    s.number("p", ic.p);
    if (s.has("sx") && !s.raw("sx").is_null()) {
        double sx = 0.0;
        s.number("sx", sx);
        ic.sx = sx;
    }
    s.number("sy", ic.sy);
    s.number("sz", ic.sz);
    s.number("ax", ic.ax);
    s.number("ay", ic.ay);
    s.number("p_tilde", ic.p_tilde);
    s.number("atx", ic.atx);
    s.number("aty", ic.aty);
    const double bloch_rest = 1.0 - ic.sy * ic.sy - ic.sz * ic.sz;
    if (!ic.sx && bloch_rest < -1e-12) {
        throw ConfigError(s.child("sz"), "sy^2 + sz^2 exceeds 1");
    }
    if (ic.sx) {
        const double n = *ic.sx * *ic.sx + ic.sy * ic.sy + ic.sz * ic.sz;
        if (std::abs(n - 1.0) > 1e-12) {
            throw ConfigError(s.child("sx"), "Bloch vector must have unit norm");
        }
    }
}

void parse_integration(const Section& s, IntegrationSpec& spec) {
    s.allow({"method", "step", "rel_tol", "abs_tol", "t_end", "sample_every"});
    if (s.has("method")) {
        const auto m = parse_method(s.string("method"));
        if (!m) throw ConfigError(s.child("method"), "expected \"rk4\" or \"dp45\"");
        spec.method = *m;
    }
    s.positive("step", spec.step);
    s.positive("rel_tol", spec.rel_tol);
    s.positive("abs_tol", spec.abs_tol);
    s.positive("t_end", spec.t_end);
    s.positive("sample_every", spec.sample_every);
    auto in_range = [](double v) { return v >= 1e-14 && v <= 1e-2; };
    if (!in_range(spec.rel_tol)) throw ConfigError(s.child("rel_tol"), "must lie in [1e-14, 1e-2]");
    if (!in_range(spec.abs_tol)) throw ConfigError(s.child("abs_tol"), "must lie in [1e-14, 1e-2]");
}

ProjectionAxis parse_projection(const Section& s, ProjectionAxis axis) {
    s.allow({"component", "wrap_2pi"});
    s.integer("component", axis.component);
    s.boolean("wrap_2pi", axis.wrap_2pi);
    return axis;
}

void parse_section(const Section& s, SectionDef& def, PoincareOptions& opts) {
    s.allow({"function", "component", "level", "direction", "project_u", "project_v", "n_points",
             "t_max", "transient"});
    if (s.has("function")) {
        const auto k = parse_section_kind(s.string("function"));
        if (!k) {
            throw ConfigError(s.child("function"),
                              "expected \"ay_zero_up\", \"cos_x_zero_up\" or \"custom\"");
        }
        def.kind = *k;
    }
    s.integer("component", def.component);
    s.number("level", def.level);
    if (s.has("direction")) {
        const auto d = parse_direction(s.string("direction"));
        if (!d) throw ConfigError(s.child("direction"), "expected \"up\", \"down\" or \"both\"");
        def.direction = *d;
    }
    if (s.has("project_u")) def.u = parse_projection(s.object("project_u"), def.u);
    if (s.has("project_v")) def.v = parse_projection(s.object("project_v"), def.v);
    s.integer("n_points", opts.n_points);
    if (opts.n_points < 1) throw ConfigError(s.child("n_points"), "must be >= 1");
    s.positive("t_max", opts.t_max);
    s.non_negative("transient", opts.transient);
}

void parse_lyapunov(const Section& s, LyapunovOptions& opts) {
    s.allow({"d0", "renorm_interval", "n_renorm", "transient"});
    s.number("d0", opts.d0);
    if (!(opts.d0 >= 1e-10 && opts.d0 <= 1e-6)) {
        throw ConfigError(s.child("d0"), "must lie in [1e-10, 1e-6]");
    }
    s.positive("renorm_interval", opts.renorm_interval);
    s.integer("n_renorm", opts.n_renorm);
    if (opts.n_renorm < 100) throw ConfigError(s.child("n_renorm"), "must be >= 100");
    s.non_negative("transient", opts.transient);
}

void parse_flights(const Section& s, FlightOptions& opts) {
    s.allow({"min_length", "p_threshold", "transient", "max_sample_spacing"});
    s.positive("min_length", opts.min_length);
    s.non_negative("p_threshold", opts.p_threshold);
    s.non_negative("transient", opts.transient);
    s.positive("max_sample_spacing", opts.max_sample_spacing);
}

SweepAxis parse_axis(const Section& s) {
    s.allow({"name", "values", "linspace", "logspace"});
    if (!s.has("name")) throw ConfigError(s.child("name"), "required");
    const auto kind = parse_axis_kind(s.string("name"));
    if (!kind) throw ConfigError(s.child("name"), "expected \"delta\", \"beta\" or \"p0\"");
    SweepAxis axis;
    axis.kind = *kind;

    const int forms = s.has("values") + s.has("linspace") + s.has("logspace");
    if (forms != 1) {
        throw ConfigError(s.child("values"), "give exactly one of values, linspace, logspace");
    }
    if (s.has("values")) {
        const auto& vals = s.raw("values");
        if (!vals.is_array() || vals.empty()) {
            throw ConfigError(s.child("values"), "expected a non-empty array");
        }
        for (std::size_t i = 0; i < vals.size(); ++i) {
            const std::string path = s.child("values") + "[" + std::to_string(i) + "]";
            if (axis.kind == SweepAxisKind::Beta) {
                axis.values.push_back(parse_beta(vals[i], path));
            } else {
                if (!vals[i].is_number()) throw ConfigError(path, "expected a number");
                axis.values.push_back(vals[i].get<double>());
            }
        }
        return axis;
    }
    const bool log = s.has("logspace");
    const Section r = s.object(log ? "logspace" : "linspace");
    r.allow({"start", "stop", "count"});
    double start = 0.0, stop = 0.0;
    int count = 0;
    if (!r.has("start") || !r.has("stop") || !r.has("count")) {
        throw ConfigError(r.child("count"), "start, stop and count are required");
    }
    r.number("start", start);
    r.number("stop", stop);
    r.integer("count", count);
    if (count < 1) throw ConfigError(r.child("count"), "must be >= 1");
    if (log && !(start > 0.0 && stop > 0.0)) {
        throw ConfigError(r.child("start"), "logspace bounds must be positive");
    }
    for (int i = 0; i < count; ++i) {
        const double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
        const double v = log ? std::exp(std::log(start) + f * (std::log(stop) - std::log(start)))
                             : start + f * (stop - start);
        axis.values.push_back(v);
    }
    if (axis.kind == SweepAxisKind::Beta) {
        for (double v : axis.values) {
            if (!(v > 0.0)) throw ConfigError(s.child("linspace"), "beta values must be positive");
        }
    }
    return axis;
}

void parse_sweep(const Section& s, SweepConfig& sweep) {
    s.allow({"axes", "diagnostic", "max_cells"});
    if (s.has("axes")) {
        const auto& axes = s.raw("axes");
        if (!axes.is_array()) throw ConfigError(s.child("axes"), "expected an array");
        sweep.axes.clear();
        for (std::size_t i = 0; i < axes.size(); ++i) {
            sweep.axes.push_back(
                parse_axis(Section(axes[i], s.child("axes") + "[" + std::to_string(i) + "]")));
        }
    }
    if (s.has("diagnostic")) {
        const auto d = parse_diagnostic(s.string("diagnostic"));
        if (!d) throw ConfigError(s.child("diagnostic"), "expected \"lyapunov\" or \"flight_count\"");
        sweep.diagnostic = *d;
    }
    s.integer("max_cells", sweep.max_cells);
}

} // namespace

ExperimentConfig parse_config(const json& doc) {
    ExperimentConfig cfg;
    const Section root(doc, "");
    root.allow({"params", "initial", "integration", "section", "lyapunov", "flights", "sweep",
                "seed", "output_path"});
    auto& e = cfg.experiment;
    if (root.has("params")) parse_params(root.object("params"), e.params);
    if (root.has("initial")) parse_initial(root.object("initial"), e.initial);
    if (root.has("integration")) parse_integration(root.object("integration"), e.integration);
    if (root.has("section")) parse_section(root.object("section"), e.section, e.poincare);
    if (root.has("lyapunov")) parse_lyapunov(root.object("lyapunov"), e.lyapunov);
    if (root.has("flights")) parse_flights(root.object("flights"), e.flights);
    if (root.has("sweep")) parse_sweep(root.object("sweep"), cfg.sweep);
    root.integer("seed", e.seed);
    if (root.has("output_path")) cfg.output_path = root.string("output_path");
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& err) {
        throw ConfigError("", std::string("JSON syntax error: ") + err.what());
    }
    return parse_config(doc);
}

json to_json(const ExperimentConfig& cfg) {
    const auto& e = cfg.experiment;
    json params = {{"alpha", e.params.alpha},
                   {"delta", e.params.delta},
                   {"variant", std::string(to_string(e.params.variant))}};
    if (const auto* inv = std::get_if<InverseTemperature>(&e.params.temperature)) {
        params["temperature"] = {{"beta", inv->beta}};
    } else {
        params["temperature"] = {{"beta", "inf"}};
    }

    json initial = {{"x", e.initial.x},         {"p", e.initial.p},     {"sy", e.initial.sy},
                    {"sz", e.initial.sz},       {"ax", e.initial.ax},   {"ay", e.initial.ay},
                    {"p_tilde", e.initial.p_tilde}, {"atx", e.initial.atx}, {"aty", e.initial.aty}};
    initial["sx"] = e.initial.sx ? json(*e.initial.sx) : json(nullptr);

    const auto& it = e.integration;
    json integration = {{"method", std::string(to_string(it.method))},
                        {"step", it.step},
                        {"rel_tol", it.rel_tol},
                        {"abs_tol", it.abs_tol},
                        {"t_end", it.t_end},
                        {"sample_every", it.sample_every}};

    auto proj = [](const ProjectionAxis& a) {
        return json{{"component", a.component}, {"wrap_2pi", a.wrap_2pi}};
    };
    json section = {{"function", std::string(to_string(e.section.kind))},
                    {"component", e.section.component},
                    {"level", e.section.level},
                    {"direction", std::string(to_string(e.section.direction))},
                    {"project_u", proj(e.section.u)},
                    {"project_v", proj(e.section.v)},
                    {"n_points", e.poincare.n_points},
                    {"t_max", e.poincare.t_max},
                    {"transient", e.poincare.transient}};

    json lyapunov = {{"d0", e.lyapunov.d0},
                     {"renorm_interval", e.lyapunov.renorm_interval},
                     {"n_renorm", e.lyapunov.n_renorm},
                     {"transient", e.lyapunov.transient}};

    json flights = {{"min_length", e.flights.min_length},
                    {"p_threshold", e.flights.p_threshold},
                    {"transient", e.flights.transient},
                    {"max_sample_spacing", e.flights.max_sample_spacing}};

    json axes = json::array();
    for (const auto& axis : cfg.sweep.axes) {
        json values = json::array();
        for (double v : axis.values) {
            values.push_back(axis.kind == SweepAxisKind::Beta ? beta_to_json(v) : json(v));
        }
        axes.push_back({{"name", std::string(to_string(axis.kind))}, {"values", values}});
    }
    json sweep = {{"axes", axes},
                  {"diagnostic", std::string(to_string(cfg.sweep.diagnostic))},
                  {"max_cells", cfg.sweep.max_cells}};

    return {{"params", params},     {"initial", initial}, {"integration", integration},
            {"section", section},   {"lyapunov", lyapunov}, {"flights", flights},
            {"sweep", sweep},       {"seed", e.seed},     {"output_path", cfg.output_path}};
}

} // namespace cqed
