#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "afcxpm/afc.hpp"
#include "afcxpm/dynamics.hpp"
#include "afcxpm/errors.hpp"
#include "afcxpm/feasibility.hpp"
#include "afcxpm/loss.hpp"
#include "afcxpm/material.hpp"
#include "afcxpm/measurement.hpp"
#include "afcxpm/spectrum.hpp"
#include "afcxpm/version.hpp"
#include "afcxpm/xpm.hpp"

namespace py = pybind11;
using namespace afcxpm;

namespace {

template <typename T>
py::array_t<T> to_array(const std::vector<T>& v)
{
    return py::array_t<T>(static_cast<py::ssize_t>(v.size()), v.data());
}

template <typename T>
py::array_t<T> to_array(std::span<const T> v)
{
    return py::array_t<T>(static_cast<py::ssize_t>(v.size()), v.data());
}

MaterialParams preset(const std::string& name)
{
    auto m = material_preset(name);
    if (!m) throw ConfigError("unknown material preset '" + name + "'");
    return *m;
}

py::dict condition_dict(const Condition& c)
{
    py::dict d;
    d["quantity"] = c.quantity;
    d["relation"] = c.relation;
    d["value"] = c.value;
    d["bound"] = c.bound;
    d["satisfied"] = c.satisfied;
    return d;
}

py::dict report_dict(const FeasibilityReport& r)
{
    py::dict conditions;
    for (const auto& c : r.conditions) conditions[py::str(c.name)] = condition_dict(c);
    py::dict d;
    d["eta"] = r.eta;
    d["detuning"] = r.detuning;
    d["phase_per_photon"] = r.phase_per_photon;
    d["zeta_l_single"] = r.zeta_l_single;
    d["loss_budget"] = r.loss_budget;
    d["absolute_floor"] = r.absolute_floor;
    d["all_satisfied"] = r.all_satisfied();
    d["conditions"] = conditions;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Cross-phase modulation of a stored probe in an atomic frequency comb";
    m.attr("__version__") = kVersion;

    auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    auto config = py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
    py::register_exception<ResolutionError>(m, "ResolutionError", config.ptr());
    auto domain = py::register_exception<DomainError>(m, "DomainError", error.ptr());
    py::register_exception<WindowError>(m, "WindowError", domain.ptr());
    py::register_exception<NumericalError>(m, "NumericalError", error.ptr());

    py::class_<MaterialParams>(m, "MaterialParams")
        .def(py::init<>())
        .def(py::init([](double lambda0, double n, double gamma, double area, double length) {
                 MaterialParams p{lambda0, n, gamma, area, length};
                 p.validate();
                 return p;
             }),
             py::arg("lambda0"), py::arg("n"), py::arg("gamma"), py::arg("area"), py::arg("length"))
        .def_readwrite("lambda0", &MaterialParams::lambda0)
        .def_readwrite("n", &MaterialParams::n)
        .def_readwrite("gamma", &MaterialParams::gamma)
        .def_readwrite("area", &MaterialParams::area)
        .def_readwrite("length", &MaterialParams::length)
        .def("validate", &MaterialParams::validate)
        .def("__repr__", [](const MaterialParams& p) {
            return "MaterialParams(lambda0=" + std::to_string(p.lambda0) + ", n=" + std::to_string(p.n) +
                   ", gamma=" + std::to_string(p.gamma) + ", area=" + std::to_string(p.area) +
                   ", length=" + std::to_string(p.length) + ")";
        });
    m.def("material_preset", &preset, py::arg("name"));
    m.def("material_preset_names", [] {
        std::vector<std::string> names;
        for (auto n : material_preset_names()) names.emplace_back(n);
        return names;
    });

    py::enum_<ToothShape>(m, "ToothShape")
        .value("Square", ToothShape::Square)
        .value("Gaussian", ToothShape::Gaussian)
        .value("Lorentzian", ToothShape::Lorentzian);
    py::class_<CombParams>(m, "CombParams")
        .def(py::init<>())
        .def_readwrite("delta_m", &CombParams::delta_m)
        .def_readwrite("n_teeth", &CombParams::n_teeth)
        .def_readwrite("finesse", &CombParams::finesse)
        .def_readwrite("peak_od", &CombParams::peak_od)
        .def_readwrite("background_od", &CombParams::background_od)
        .def_readwrite("pit_width", &CombParams::pit_width)
        .def_readwrite("pit_gap", &CombParams::pit_gap)
        .def_readwrite("pit_od", &CombParams::pit_od)
        .def_readwrite("tooth_shape", &CombParams::tooth_shape);
    m.def("experimental_comb", &experimental_comb);

    m.def(
        "absorption_profile",
        [](const CombParams& comb, std::size_t points, double half_span, double length) {
            const auto f = build_feature(comb, GridSpec{points, half_span}, length);
            return py::make_tuple(to_array(f.grid()), to_array(f.alpha()));
        },
        py::arg("comb"), py::arg("points") = GridSpec{}.points, py::arg("half_span") = GridSpec{}.half_span,
        py::arg("length") = MaterialParams{}.length,
        "Detuning grid (rad/s) and absorption coefficient (1/m).");

    m.def("phase_per_photon", &phase_per_photon, py::arg("params"), py::arg("detuning"), py::arg("transfer") = false);
    m.def(
        "probe_phase",
        [](const MaterialParams& p, double detuning, double photons, int passes, bool transfer, double duration) {
            const SignalField s({{0.0, duration}}, photons, detuning, passes, StorageWindow{-duration, duration});
            const auto shift = probe_phase_shift(s, p, transfer);
            return py::make_tuple(shift.phi, shift.validity_warnings);
        },
        py::arg("params"), py::arg("detuning"), py::arg("photons"), py::arg("passes") = 1, py::arg("transfer") = false,
        py::arg("duration") = 10e-9, "Total probe phase and any model-validity warnings.");
    m.def("sensitivity_threshold", &sensitivity_threshold, py::arg("n_probe"), py::arg("eta"));

    m.def("recall_efficiency", &recall_efficiency, py::arg("d"), py::arg("finesse"));
    m.def("recall_efficiency_with_background", &recall_efficiency_with_background, py::arg("d"), py::arg("finesse"),
          py::arg("background_od"));

    m.def("atoms_from_optical_depth", &atoms_from_optical_depth, py::arg("params"), py::arg("d"), py::arg("n_teeth"));
    m.def("signal_loss", &signal_loss, py::arg("params"), py::arg("n_ground"), py::arg("detuning"),
          py::arg("passes") = 1);

    py::class_<DesignPoint>(m, "DesignPoint")
        .def(py::init<>())
        .def_readwrite("d", &DesignPoint::d)
        .def_readwrite("finesse", &DesignPoint::finesse)
        .def_readwrite("n_teeth", &DesignPoint::n_teeth)
        .def_readwrite("f", &DesignPoint::f)
        .def_readwrite("passes", &DesignPoint::passes)
        .def_readwrite("bandwidth_hz", &DesignPoint::bandwidth_hz)
        .def_readwrite("params", &DesignPoint::params)
        .def("eta", &DesignPoint::eta)
        .def("detuning", &DesignPoint::detuning);
    m.def("example_design_point", &example_design_point);
    m.def(
        "check_conditions", [](const DesignPoint& p, double budget) { return report_dict(check_conditions(p, budget)); },
        py::arg("point"), py::arg("loss_budget") = kDefaultLossBudget);

    m.def(
        "simulate_echo",
        [](const CombParams& comb, const MaterialParams& p, double duration, int z_slices, int steps_per_storage,
           int threads) {
            SolverOptions o;
            o.z_slices = z_slices;
            o.steps_per_storage = steps_per_storage;
            o.threads = threads;
            ProbeSpec probe;
            probe.duration = duration;
            EchoRun run;
            {
                py::gil_scoped_release release;
                run = simulate_echo(build_feature(comb, GridSpec{}, p.length), p, probe, o);
            }
            py::dict d;
            d["t"] = to_array(run.trace.t);
            d["input"] = to_array(run.trace.input);
            d["output"] = to_array(run.trace.output);
            d["echo_delay"] = run.analysis.echo_delay;
            d["efficiency"] = run.analysis.efficiency;
            d["echo_phase"] = run.analysis.echo_phase;
            d["storage_time"] = run.storage_time;
            return d;
        },
        py::arg("comb"), py::arg("params"), py::arg("duration") = 10e-9, py::arg("z_slices") = 64,
        py::arg("steps_per_storage") = 0, py::arg("threads") = 1);

    py::class_<NoiseModel>(m, "NoiseModel")
        .def(py::init<>())
        .def_static("none", &NoiseModel::none)
        .def_readwrite("shot_to_shot_sigma", &NoiseModel::shot_to_shot_sigma)
        .def_readwrite("reference_residual_sigma", &NoiseModel::reference_residual_sigma)
        .def_readwrite("detector_sigma", &NoiseModel::detector_sigma)
        .def_readwrite("reference_correlation_weight", &NoiseModel::reference_correlation_weight)
        .def_readwrite("seed", &NoiseModel::seed);
    py::class_<ReadoutModel>(m, "ReadoutModel")
        .def(py::init<>())
        .def_readwrite("visibility", &ReadoutModel::visibility)
        .def_readwrite("bias", &ReadoutModel::bias)
        .def_readwrite("lo_match", &ReadoutModel::lo_match)
        .def_readwrite("noise", &ReadoutModel::noise);

    m.def("intensity_from_phase", &intensity_from_phase, py::arg("model"), py::arg("phi"));
    m.def("phase_from_intensity", &phase_from_intensity, py::arg("model"), py::arg("intensity"));
    m.def(
        "run_experiment",
        [](double phase, int repetitions, const ReadoutModel& model, int threads) {
            const auto r = run_experiment(phase, repetitions, model, threads);
            std::vector<double> shots;
            shots.reserve(r.records.size());
            for (const auto& rec : r.records) shots.push_back(rec.inferred_phase);
            py::dict d;
            d["mean"] = r.mean;
            d["std_dev"] = r.std_dev;
            d["sem"] = r.sem;
            d["phases"] = to_array(shots);
            return d;
        },
        py::arg("phase"), py::arg("repetitions"), py::arg("model") = ReadoutModel{}, py::arg("threads") = 1);
    m.def(
        "detuning_sweep",
        [](const std::vector<double>& detunings, const ReadoutModel& model, const MaterialParams& p, int repetitions,
           int threads) {
            SweepConfig sweep = SweepConfig::defaults();
            if (!detunings.empty()) sweep.detunings = detunings;
            sweep.repetitions = repetitions;
            py::list out;
            for (const auto& pt : detuning_sweep(sweep, p, model, threads)) {
                py::dict d;
                d["detuning"] = pt.detuning;
                d["slope"] = pt.fit.slope;
                d["slope_err"] = pt.fit.slope_err;
                d["analytic"] = pt.analytic;
                out.append(d);
            }
            return out;
        },
        py::arg("detunings") = std::vector<double>{}, py::arg("model") = ReadoutModel{}, py::arg("params") = tm_linbo3(),
        py::arg("repetitions") = 200, py::arg("threads") = 1);
    m.def(
        "reproduce_fig4",
        [](const ReadoutModel& model, const MaterialParams& p, double n_photons, int threads) {
            Fig4Config c;
            c.n_photons = n_photons;
            py::list out;
            for (const auto& r : reproduce_fig4(c, p, model, threads)) {
                py::dict d;
                d["state"] = r.state ? py::object(py::str(std::string(to_string(*r.state)))) : py::object(py::none());
                d["phase_true"] = r.phase_true;
                d["phase_mean"] = r.phase_mean;
                d["phase_sem"] = r.phase_sem;
                d["error_before"] = r.error_before;
                d["error_after"] = r.error_after;
                out.append(d);
            }
            return out;
        },
        py::arg("model") = ReadoutModel{}, py::arg("params") = tm_linbo3(), py::arg("n_photons") = Fig4Config{}.n_photons,
        py::arg("threads") = 1);
}
