#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "fskmc/cli.hpp"
#include "fskmc/config.hpp"
#include "fskmc/csv.hpp"
#include "fskmc/errors.hpp"
#include "fskmc/harness.hpp"
#include "fskmc/oracle.hpp"

namespace py = pybind11;
using namespace fskmc;

namespace {

Engine engine_from(const std::string& name) {
    if (name == "ssa") return Engine::ssa;
    if (name == "fs" || name == "fs_kmc") return Engine::fs_kmc;
    throw UsageError("engine must be 'ssa' or 'fs'");
}

std::vector<Site> all_sites(const Lattice& lat) {
    std::vector<Site> s(lat.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<Site>(i);
    return s;
}

struct OracleSystem {
    Lattice lat;
    ModelPtr model;
    oracle::DenseGenerator full;
    Eigen::VectorXd p0;

    explicit OracleSystem(const RunConfig& cfg)
        : lat(make_lattice(cfg)),
          model(make_model(cfg.model)),
          full(oracle::build_generator(*model, lat, all_sites(lat))),
          p0(oracle::point_mass(full.codec, make_initial(cfg, lat, 0))) {}
};

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Fractional-step kinetic Monte Carlo core";

    static py::exception<ConfigError> config_error(m, "ConfigError", PyExc_ValueError);
    static py::exception<UsageError> usage_error(m, "UsageError", PyExc_ValueError);
    static py::exception<ResourceError> resource_error(m, "ResourceError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ConfigError& e) {
            std::string msg;
            for (const auto& issue : e.issues()) msg += (msg.empty() ? "" : "; ") + issue;
            py::set_error(config_error, msg.c_str());
        } catch (const UsageError& e) {
            py::set_error(usage_error, e.what());
        } catch (const ResourceError& e) {
            py::set_error(resource_error, e.what());
        }
    });

    py::class_<RunConfig>(m, "RunConfig")
        .def_property_readonly("scheme", &RunConfig::scheme_label)
        .def_readwrite("q", &RunConfig::q)
        .def_readwrite("horizon", &RunConfig::horizon)
        .def_readwrite("grid", &RunConfig::grid)
        .def_readwrite("samples", &RunConfig::samples)
        .def_readwrite("seed", &RunConfig::seed)
        .def_readwrite("workers", &RunConfig::workers)
        .def_property(
            "dt", [](const RunConfig& c) { return c.schedule.dt; },
            [](RunConfig& c, double dt) { c.schedule.dt = dt; })
        .def("set_scheme", [](RunConfig& c, const std::string& s) { apply_scheme_override(c, s); })
        .def("validate", &RunConfig::validate);

    m.def("parse_config", &parse_config, py::arg("text"));
    m.def("load_config", [](const std::string& path) { return load_config(path); }, py::arg("path"));

    py::class_<TrajectoryStats>(m, "TrajectoryStats")
        .def_readonly("scheme", &TrajectoryStats::scheme)
        .def_readonly("dt", &TrajectoryStats::dt)
        .def_readonly("q", &TrajectoryStats::q)
        .def_readonly("sites", &TrajectoryStats::sites)
        .def_readonly("samples", &TrajectoryStats::samples)
        .def_readonly("times", &TrajectoryStats::times)
        .def("mean", [](const TrajectoryStats& s, const std::string& obs) { return s.at(Observable::parse(obs)).mean; },
             py::arg("observable") = "coverage")
        .def("stderr", [](const TrajectoryStats& s, const std::string& obs) { return s.at(Observable::parse(obs)).stderr_; },
             py::arg("observable") = "coverage")
        .def("to_csv", [](const TrajectoryStats& s) {
            std::ostringstream os;
            write_trajectory_header(os);
            write_trajectory_rows(os, s);
            return os.str();
        });

    m.def(
        "run_ensemble",
        [](const RunConfig& cfg, const std::string& engine, std::optional<std::size_t> samples,
           std::optional<std::uint64_t> seed) {
            py::gil_scoped_release release;
            return run_ensemble(cfg, engine_from(engine), samples.value_or(cfg.samples), seed.value_or(cfg.seed));
        },
        py::arg("config"), py::arg("engine") = "fs", py::arg("samples") = py::none(), py::arg("seed") = py::none());

    m.def(
        "weak_error",
        [](const TrajectoryStats& ref, const TrajectoryStats& test, const std::string& obs) {
            const auto e = weak_error(ref, test, Observable::parse(obs));
            return py::make_tuple(e.value, e.stderr_);
        },
        py::arg("reference"), py::arg("test"), py::arg("observable") = "coverage");

    m.def("fit_loglog", [](const std::vector<double>& x, const std::vector<double>& y) {
        const auto f = fit_loglog(x, y);
        return py::make_tuple(f.slope, f.intercept);
    });

    m.def(
        "exact_curve",
        [](const RunConfig& cfg, const std::vector<double>& times, const std::string& obs) {
            const OracleSystem sys(cfg);
            const auto f = oracle::observable_vector(sys.full.codec, sys.lat, Observable::parse(obs));
            std::vector<double> out;
            for (double t : times) out.push_back(f.dot(oracle::expm_apply(sys.full.matrix, sys.p0, t)));
            return out;
        },
        py::arg("config"), py::arg("times"), py::arg("observable") = "coverage");

    m.def(
        "splitting_curve",
        [](const RunConfig& cfg, const std::vector<double>& times, const std::string& obs) {
            const OracleSystem sys(cfg);
            const auto dec = decompose(sys.lat, cfg.q, sys.model->interaction_range());
            const auto l1 = oracle::build_group_generator(*sys.model, sys.lat, dec, 1);
            const auto l2 = oracle::build_group_generator(*sys.model, sys.lat, dec, 2);
            const auto f = oracle::observable_vector(sys.full.codec, sys.lat, Observable::parse(obs));
            return oracle::splitting_curve(l1, l2, dec, cfg.schedule, cfg.horizon, times, f, sys.p0);
        },
        py::arg("config"), py::arg("times"), py::arg("observable") = "coverage");

    m.def(
        "generators",
        [](const RunConfig& cfg) {
            const OracleSystem sys(cfg);
            const auto dec = decompose(sys.lat, cfg.q, sys.model->interaction_range());
            return py::make_tuple(sys.full.matrix, oracle::build_group_generator(*sys.model, sys.lat, dec, 1).matrix,
                                  oracle::build_group_generator(*sys.model, sys.lat, dec, 2).matrix);
        },
        py::arg("config"), "Dense (L, L1, L2); entry (i, j) is the rate of state j -> i.");

    m.def(
        "cli_main",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            int code = 0;
            {
                py::gil_scoped_release release;
                code = cli_main(args, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
