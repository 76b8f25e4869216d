#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cqed/analysis.hpp"
#include "cqed/config.hpp"
#include "cqed/errors.hpp"
#include "cqed/model.hpp"
#include "cqed/thermal.hpp"

namespace py = pybind11;
using namespace cqed;

namespace {

using Array = py::array_t<double>;

TemperatureSpec temperature_of(const py::object& beta) {
    if (beta.is_none()) return ZeroTemperature{};
    const double b = beta.cast<double>();
    if (std::isinf(b) && b > 0) return ZeroTemperature{};
    return InverseTemperature{b};
}

Variant variant_of(const std::string& name) {
    const auto v = parse_variant(name);
    if (!v) throw InvalidArgument("unknown variant '" + name + "'");
    return *v;
}

SystemParams params_of(double alpha, double delta, const py::object& beta,
                       const std::string& variant) {
    SystemParams p;
    p.alpha = alpha;
    p.delta = delta;
    p.temperature = temperature_of(beta);
    p.variant = variant_of(variant);
    validate(p);
    return p;
}

template <std::size_t N>
StateVector<N> state_of(const std::vector<double>& v) {
    if (v.size() != N) {
        throw InvalidArgument("state must have " + std::to_string(N) + " components, got " +
                              std::to_string(v.size()));
    }
    StateVector<N> s{};
    std::copy(v.begin(), v.end(), s.begin());
    return s;
}

template <class Container>
Array to_array(const Container& v) {
    Array out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

Array to_matrix(const std::vector<std::vector<double>>& rows, std::size_t cols) {
    Array out({static_cast<py::ssize_t>(rows.size()), static_cast<py::ssize_t>(cols)});
    auto m = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
    }
    return out;
}

ExperimentConfig config_of(const py::object& cfg) {
    if (cfg.is_none()) return parse_config(nlohmann::json::object());
    const auto text = py::module_::import("json").attr("dumps")(cfg).cast<std::string>();
    return parse_config(nlohmann::json::parse(text));
}

py::object json_to_python(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

std::vector<std::string> state_columns(bool thermal) {
    if (thermal) return {"x", "p", "p_tilde", "sx", "sy", "sz", "ax", "ay", "atx", "aty"};
    return {"x", "p", "sx", "sy", "sz", "ax", "ay"};
}

py::dict simulate_py(const py::object& cfg) {
    const auto c = config_of(cfg);
    SampledTrajectory t;
    {
        py::gil_scoped_release release;
        t = simulate(c.experiment);
    }
    const auto cols = state_columns(t.thermal);
    py::dict d;
    d["tau"] = to_array(t.times);
    d["state"] = to_matrix(t.states, cols.size());
    d["columns"] = cols;
    d["thermal"] = t.thermal;
    return d;
}

py::dict poincare_py(const py::object& cfg) {
    const auto c = config_of(cfg);
    PoincareSection sec;
    {
        py::gil_scoped_release release;
        sec = poincare(c.experiment);
    }
    std::vector<double> u, v;
    for (const auto& [a, b] : sec.points) {
        u.push_back(a);
        v.push_back(b);
    }
    py::dict d;
    d["u"] = to_array(u);
    d["v"] = to_array(v);
    d["tau"] = to_array(sec.taus);
    d["empty"] = sec.empty;
    return d;
}

py::dict lyapunov_py(const py::object& cfg) {
    const auto c = config_of(cfg);
    LyapunovEstimate est;
    {
        py::gil_scoped_release release;
        est = lyapunov_max(c.experiment);
    }
    py::dict d;
    d["lambda_max"] = est.lambda_max;
    d["history"] = to_array(est.history);
    d["times"] = to_array(est.times);
    d["n_renorm"] = est.n_renorm;
    d["d0"] = est.d0;
    return d;
}

py::dict flights_py(const py::object& cfg) {
    const auto c = config_of(cfg);
    FlightStats st;
    {
        py::gil_scoped_release release;
        st = levy_flights(c.experiment);
    }
    std::vector<double> start, end, dx;
    for (const auto& f : st.flights) {
        start.push_back(f.tau_start);
        end.push_back(f.tau_end);
        dx.push_back(f.dx);
    }
    py::dict d;
    d["count"] = st.count;
    d["tau_start"] = to_array(start);
    d["tau_end"] = to_array(end);
    d["dx"] = to_array(dx);
    return d;
}

py::dict sweep_py(const py::object& cfg, int threads) {
    const auto c = config_of(cfg);
    SweepResult r;
    {
        py::gil_scoped_release release;
        r = sweep(c.sweep.axes, c.experiment, c.sweep.diagnostic, threads, c.sweep.max_cells);
    }
    std::vector<std::string> names;
    for (const auto& a : r.axes) names.emplace_back(to_string(a.kind));
    std::vector<std::vector<double>> coords;
    std::vector<double> values;
    std::vector<bool> ok;
    std::vector<std::string> status;
    for (const auto& cell : r.cells) {
        coords.push_back(cell.coords);
        values.push_back(cell.value);
        ok.push_back(cell.ok);
        status.push_back(cell.status);
    }
    py::dict d;
    d["axes"] = names;
    d["coords"] = to_matrix(coords, names.size());
    d["value"] = to_array(values);
    d["ok"] = ok;
    d["status"] = status;
    d["diagnostic"] = std::string(to_string(r.diagnostic));
    return d;
}

} // namespace

PYBIND11_MODULE(_cqed, m) {
    m.doc() = "Semiclassical Jaynes-Cummings dynamics at finite temperature";

    auto base = py::register_exception<Error>(m, "CqedError", PyExc_RuntimeError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<InvalidTemperature>(m, "InvalidTemperature", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<IntegrationDiverged>(m, "IntegrationDiverged", base.ptr());
    py::register_exception<StiffnessError>(m, "StiffnessError", base.ptr());
    py::register_exception<RenormalizationError>(m, "RenormalizationError", base.ptr());

    m.def(
        "thermal_factors",
        [](const py::object& beta) {
            const auto f = thermal_factors(temperature_of(beta));
            return py::make_tuple(f.sinh_theta, f.cosh_theta);
        },
        py::arg("beta") = py::none(),
        "(sinh theta, cosh theta) for inverse temperature beta; None or inf is T = 0.");

    m.def(
        "deriv_zero_t",
        [](const std::vector<double>& s, double alpha, double delta) {
            SystemParams p;
            p.alpha = alpha;
            p.delta = delta;
            validate(p);
            const auto d = deriv_zero_t(ZeroTState::from_array(state_of<7>(s)), p);
            return to_array(d.to_array());
        },
        py::arg("state"), py::arg("alpha") = 1e-3, py::arg("delta") = 0.0,
        "Time derivative of (x, p, sx, sy, sz, ax, ay).");

    m.def(
        "deriv_thermal",
        [](const std::vector<double>& s, double alpha, double delta, const py::object& beta,
           const std::string& variant) {
            const auto p = params_of(alpha, delta, beta, variant);
            const auto d = deriv_thermal(ThermalState::from_array(state_of<10>(s)), p,
                                         thermal_factors(p.temperature));
            return to_array(d.to_array());
        },
        py::arg("state"), py::arg("alpha") = 1e-3, py::arg("delta") = 0.0,
        py::arg("beta") = py::none(), py::arg("variant") = "consistent",
        "Time derivative of (x, p, p_tilde, sx, sy, sz, ax, ay, atx, aty).");

    m.def(
        "energy_zero_t",
        [](const std::vector<double>& s, double alpha, double delta) {
            SystemParams p;
            p.alpha = alpha;
            p.delta = delta;
            return energy_zero_t(ZeroTState::from_array(state_of<7>(s)), p);
        },
        py::arg("state"), py::arg("alpha") = 1e-3, py::arg("delta") = 0.0);

    m.def(
        "excitation_zero_t",
        [](const std::vector<double>& s) {
            return excitation_zero_t(ZeroTState::from_array(state_of<7>(s)));
        },
        py::arg("state"));

    m.def(
        "check_axioms",
        [](const std::string& variant, std::uint64_t seed, int samples) {
            const auto r = check_axioms(variant_of(variant), seed, samples);
            py::dict d;
            d["hermiticity"] = r.hermiticity;
            d["decoupling"] = r.decoupling;
            d["reduction"] = r.reduction;
            d["detail"] = r.detail;
            return d;
        },
        py::arg("variant"), py::arg("seed") = 1, py::arg("samples") = 256);

    m.def(
        "default_config",
        [] { return json_to_python(to_json(parse_config(nlohmann::json::object()))); },
        "Full configuration with every default filled in.");
    m.def(
        "normalize_config", [](const py::object& cfg) { return json_to_python(to_json(config_of(cfg))); },
        py::arg("config"), "Validates a configuration and fills in its defaults.");

    m.def("simulate", &simulate_py, py::arg("config") = py::none());
    m.def("poincare", &poincare_py, py::arg("config") = py::none());
    m.def("lyapunov", &lyapunov_py, py::arg("config") = py::none());
    m.def("flights", &flights_py, py::arg("config") = py::none());
    m.def("sweep", &sweep_py, py::arg("config"), py::arg("threads") = 1);
}
