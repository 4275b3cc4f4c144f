#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "hysterobeam/analysis.hpp"
#include "hysterobeam/beam.hpp"
#include "hysterobeam/hysteresis.hpp"
#include "hysterobeam/integrator.hpp"
#include "hysterobeam/rom.hpp"
#include "hysterobeam/trajectory.hpp"

namespace py = pybind11;
using namespace hysterobeam;

namespace {

SecondOrderSystem system_of(const BeamModel& model) {
    return SecondOrderSystem{model.M, model.K, {}, model.A, model.B};
}

Eigen::RowVectorXd tip_row(const BeamModel& model) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(model.M.rows());
    row[model.tip_dof()] = 1.0;
    return row;
}

}  // namespace

PYBIND11_MODULE(_hysterobeam, m) {
    m.doc() = "Euler-Bernoulli cantilever with distributed Bouc-Wen hysteretic "
              "damping: semi-implicit time integration and data-driven model "
              "order reduction";

    py::class_<BeamGeometry>(m, "BeamGeometry")
        .def(py::init<double, double, double, int, int>(), py::arg("length"),
             py::arg("EI"), py::arg("rhoA"), py::arg("n_elements"),
             py::arg("n_gauss") = 3)
        .def_readonly("length", &BeamGeometry::length)
        .def_readonly("EI", &BeamGeometry::EI)
        .def_readonly("rhoA", &BeamGeometry::rhoA)
        .def_readonly("n_elements", &BeamGeometry::n_elements)
        .def_readonly("n_gauss", &BeamGeometry::n_gauss)
        .def("element_length", &BeamGeometry::element_length)
        .def("n_dofs", &BeamGeometry::n_dofs)
        .def("n_hyst", &BeamGeometry::n_hyst);

    py::class_<BoucWenParams>(m, "BoucWenParams")
        .def(py::init<double, double, double, double, double>(),
             py::arg("A_bar"), py::arg("alpha"), py::arg("beta"),
             py::arg("n_h"), py::arg("gamma_h"))
        .def_readonly("A_bar", &BoucWenParams::A_bar)
        .def_readonly("alpha", &BoucWenParams::alpha)
        .def_readonly("beta", &BoucWenParams::beta)
        .def_readonly("n_h", &BoucWenParams::n_h)
        .def_readonly("gamma_h", &BoucWenParams::gamma_h)
        .def("z_saturation", &BoucWenParams::z_saturation);

    py::class_<BeamModel>(m, "BeamModel")
        .def_readonly("M", &BeamModel::M)
        .def_readonly("K", &BeamModel::K)
        .def_readonly("A", &BeamModel::A)
        .def_readonly("B", &BeamModel::B)
        .def_readonly("gauss_x", &BeamModel::gauss_x)
        .def("tip_dof", &BeamModel::tip_dof);

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("times", &Trajectory::times)
        .def_readonly("tip", &Trajectory::tip)
        .def_readonly("q", &Trajectory::q)
        .def_readonly("v", &Trajectory::v)
        .def_readonly("z", &Trajectory::z)
        .def_readonly("h", &Trajectory::h)
        .def("__len__", [](const Trajectory& t) { return t.size(); });

    m.def("assemble", &assemble, py::arg("geometry"), py::arg("gamma_h"),
          "Assemble global M, K, A, B for the clamped cantilever");
    m.def(
        "modal_analysis",
        [](const BeamModel& model, int r) {
            ModalResult res = modal_analysis(model, r);
            return py::make_tuple(res.frequencies_hz, res.R);
        },
        py::arg("model"), py::arg("r"),
        "First r natural frequencies [Hz] and M-orthonormal mode shapes");

    m.def("bw_rate",
          py::overload_cast<const Eigen::VectorXd&, const Eigen::VectorXd&,
                            const BoucWenParams&>(&bw_rate),
          py::arg("z"), py::arg("chi_dot"), py::arg("params"));
    m.def("chi_max", &chi_max, py::arg("params"),
          "Amplitude bound for the small-amplitude power-law regime");
    m.def("solve_abar_for_chimax", &solve_abar_for_chimax, py::arg("target"),
          py::arg("alpha"), py::arg("beta"), py::arg("n_h"));

    m.def(
        "simulate",
        [](const BeamModel& model, const BoucWenParams& params,
           const Eigen::VectorXd& q0, const Eigen::VectorXd& v0, double h,
           double T, int stride, bool record_z) {
            if (std::abs(model.gamma_h - params.gamma_h) >
                1e-12 * std::max(1.0, std::abs(model.gamma_h))) {
                throw std::invalid_argument(
                    "simulate: model assembled with gamma_h = " +
                    std::to_string(model.gamma_h) + " but params carry " +
                    std::to_string(params.gamma_h));
            }
            SimState ic;
            ic.q = q0;
            ic.v = v0;
            ic.z = Eigen::VectorXd::Zero(model.B.rows());
            SimulateOptions opt;
            opt.h = h;
            opt.T = T;
            opt.stride = stride;
            opt.record_z = record_z;
            return simulate(system_of(model), params, {}, ic, opt,
                            tip_row(model));
        },
        py::arg("model"), py::arg("params"), py::arg("q0"), py::arg("v0"),
        py::arg("h"), py::arg("T"), py::arg("stride") = 1,
        py::arg("record_z") = false,
        "Unforced semi-implicit simulation; returns the tip trajectory");

    m.def("split_step",
          py::overload_cast<const Eigen::VectorXd&, const Eigen::VectorXd&,
                            const Eigen::VectorXd&, double,
                            const BoucWenParams&>(&split_step),
          py::arg("z0"), py::arg("chidot0"), py::arg("chidot1"), py::arg("h"),
          py::arg("params"));

    m.def("rms_error", &rms_error, py::arg("traj"), py::arg("reference"),
          py::arg("n_instants") = 128);
    m.def("fixed_time_error", &fixed_time_error, py::arg("traj"),
          py::arg("reference"), py::arg("tau") = 1.0);
    m.def("rms_difference", &rms_difference, py::arg("a"), py::arg("b"));
    m.def(
        "zeta_equiv",
        [](const std::vector<double>& peaks) { return zeta_equiv(peaks); },
        py::arg("peaks"));
    m.def(
        "envelope_peaks",
        [](const Trajectory& traj, bool rectified) {
            std::vector<std::pair<double, double>> out;
            for (const Peak& p : envelope_peaks(traj, rectified)) {
                out.emplace_back(p.t, p.amplitude);
            }
            return out;
        },
        py::arg("traj"), py::arg("rectified") = false);
    m.def("decay_slope", &decay_slope, py::arg("traj"), py::arg("t1"),
          py::arg("t2"));
    m.def(
        "spectrum_peaks",
        [](const Trajectory& traj, double threshold) {
            std::vector<std::pair<double, double>> out;
            for (const SpectrumPeak& p : spectrum_peaks(traj, threshold)) {
                out.emplace_back(p.frequency_hz, p.magnitude);
            }
            return out;
        },
        py::arg("traj"), py::arg("threshold") = 0.01);

    py::class_<SnapshotSet>(m, "SnapshotSet")
        .def_property_readonly(
            "Z", [](const SnapshotSet& s) { return Eigen::MatrixXd(s.Z); })
        .def_readonly("n_t", &SnapshotSet::n_t)
        .def_readonly("n_s", &SnapshotSet::n_s)
        .def_readonly("seed", &SnapshotSet::seed);

    py::class_<Rom>(m, "Rom")
        .def_readonly("R", &Rom::R)
        .def_readonly("P", &Rom::P)
        .def_readonly("B_s", &Rom::B_s)
        .def_readonly("indices", &Rom::indices)
        .def_property_readonly("r", &Rom::r)
        .def_property_readonly("m", &Rom::m);

    m.def("generate_snapshots", &generate_snapshots, py::arg("model"),
          py::arg("params"), py::arg("r"), py::arg("n_s"), py::arg("n_t"),
          py::arg("T"), py::arg("h"), py::arg("ic_scale"), py::arg("seed"),
          py::arg("workers") = 1);
    m.def(
        "greedy_select",
        [](const Eigen::MatrixXd& Z, int m) {
            GreedyResult res = greedy_select(Z, m);
            return py::make_tuple(res.indices, res.residual_fro,
                                  res.rank_deficient);
        },
        py::arg("Z"), py::arg("m"),
        "Greedy row selection; returns (indices, residual norms, rank_deficient)");
    m.def("solve_p",
          py::overload_cast<const Eigen::MatrixXd&, const Eigen::MatrixXd&>(
              &solve_p),
          py::arg("target"), py::arg("z_s"));
    m.def("build_rom", &build_rom, py::arg("model"), py::arg("params"),
          py::arg("snapshots"), py::arg("r"), py::arg("m"));
    m.def(
        "simulate_rom",
        [](const Rom& rom, const Eigen::VectorXd& xi0,
           const Eigen::VectorXd& xidot0, double h, double T, int stride,
           int tip_dof) {
            return simulate_rom(rom, {}, xi0, xidot0, h, T, stride, tip_dof);
        },
        py::arg("rom"), py::arg("xi0"), py::arg("xidot0"), py::arg("h"),
        py::arg("T"), py::arg("stride") = 1, py::arg("tip_dof") = 0);
    m.def("save_snapshots", &save_snapshots, py::arg("snapshots"),
          py::arg("path"));
    m.def("load_snapshots", &load_snapshots, py::arg("path"));
    m.def("save_rom", &save_rom, py::arg("rom"), py::arg("path"));
    m.def("load_rom", &load_rom, py::arg("path"));

#ifdef HYSTEROBEAM_VERSION
#define HB_STR(x) #x
#define HB_XSTR(x) HB_STR(x)
    m.attr("__version__") = HB_XSTR(HYSTEROBEAM_VERSION);
#else
    m.attr("__version__") = "dev";
#endif
}
