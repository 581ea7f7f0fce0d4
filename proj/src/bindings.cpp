#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "maxgas/constants.hpp"
#include "maxgas/fluid.hpp"
#include "maxgas/kinetic.hpp"
#include "maxgas/lattice.hpp"
#include "maxgas/quadrature.hpp"
#include "maxgas/scenario.hpp"
#include "maxgas/thermo.hpp"
#include "maxgas/transport.hpp"
#include "maxgas/version.hpp"

namespace py = pybind11;
using namespace maxgas;

namespace {

Vec3 to_vec3(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }
std::array<double, 3> from_vec3(const Vec3& v) { return {v.x, v.y, v.z}; }

} // namespace

PYBIND11_MODULE(_maxwellgas, m) {
    m.doc() = "occupation-gas core: transport coefficients, fluid solver, lattice chain";
    m.attr("__version__") = kVersion;

    py::register_exception<QuadratureError>(m, "QuadratureError");
    py::register_exception<PositivityError>(m, "PositivityError");
    py::register_exception<LatticePositivityError>(m, "LatticePositivityError");
    py::register_exception<DegenerateMomentsError>(m, "DegenerateMomentsError");
    py::register_exception<ConfigError>(m, "ConfigError");

    py::class_<KineticConstants>(m, "KineticConstants")
        .def(py::init<>())
        .def_readwrite("m", &KineticConstants::m)
        .def_readwrite("k_B", &KineticConstants::k_B)
        .def_readwrite("sigma", &KineticConstants::sigma)
        .def_readwrite("a", &KineticConstants::a)
        .def_readwrite("epsilon", &KineticConstants::epsilon)
        .def_readwrite("nondimensional", &KineticConstants::nondimensional)
        .def("validate", &KineticConstants::validate);
    m.def("nondimensional_constants", &nondimensional_constants, py::arg("sigma") = 1.0);

    py::class_<FieldPoint>(m, "FieldPoint")
        .def_readonly("rho", &FieldPoint::rho)
        .def_property_readonly("u", [](const FieldPoint& f) { return from_vec3(f.u); })
        .def_readonly("theta", &FieldPoint::theta)
        .def_readonly("N", &FieldPoint::N)
        .def_readonly("E", &FieldPoint::E)
        .def_property_readonly("pi", [](const FieldPoint& f) { return from_vec3(f.pi); });
    m.def(
        "make_field_point",
        [](double rho, const std::array<double, 3>& u, double theta, const KineticConstants& kc) {
            return make_field_point(rho, to_vec3(u), theta, kc);
        },
        py::arg("rho"), py::arg("u"), py::arg("theta"), py::arg("constants"));

    py::class_<LteParams>(m, "LteParams")
        .def_readonly("beta", &LteParams::beta)
        .def_property_readonly("zeta", [](const LteParams& p) { return from_vec3(p.zeta); })
        .def_readonly("xi", &LteParams::xi)
        .def_readonly("Xi", &LteParams::Xi)
        .def_readonly("Z", &LteParams::Z);
    m.def(
        "lte_from_fields",
        [](const FieldPoint& f, const KineticConstants& kc) { return lte_from_fields(f, kc); },
        py::arg("fields"), py::arg("constants"));
    m.def("fields_from_lte", &fields_from_lte, py::arg("params"), py::arg("constants"));
    m.def(
        "maxwell_pdf",
        [](const FieldPoint& f, const std::array<double, 3>& k, const KineticConstants& kc) {
            return maxwell_pdf(f, to_vec3(k), kc);
        },
        py::arg("fields"), py::arg("k"), py::arg("constants"));
    m.def("equation_of_state", &equation_of_state, py::arg("N"), py::arg("theta"), py::arg("V"),
          py::arg("V0"), py::arg("constants"));
    m.def(
        "entropy",
        [](const std::vector<double>& mu, double k_B) {
            return entropy(std::span<const double>(mu.data(), mu.size()), k_B);
        },
        py::arg("mu"), py::arg("k_B") = 1.0);

    py::class_<TransportTable>(m, "TransportTable")
        .def_readonly("mu1", &TransportTable::mu1)
        .def_readonly("mu2", &TransportTable::mu2)
        .def_readonly("mu3", &TransportTable::mu3)
        .def_readonly("lambda1", &TransportTable::lambda1)
        .def_readonly("lambda2", &TransportTable::lambda2)
        .def_readonly("lambda3", &TransportTable::lambda3)
        .def_readonly("lambda_shear", &TransportTable::lambda_shear)
        .def_readonly("lambda_fourier", &TransportTable::lambda_fourier)
        .def_readonly("lambda_dufour", &TransportTable::lambda_dufour)
        .def_readonly("quad_tol", &TransportTable::quad_tol)
        .def_readonly("kappa_max", &TransportTable::kappa_max);
    m.def("bessel_like_In", &bessel_like_In, py::arg("n"), py::arg("kappa"),
          py::arg("quad_tol") = 1e-10);
    m.def("collision_F", &collision_F, py::arg("kappa"), py::arg("quad_tol") = 1e-10);
    m.def("collision_F_scaled", &collision_F_scaled, py::arg("kappa"),
          py::arg("quad_tol") = 1e-10);
    m.def("lambda_moments", &lambda_moments, py::arg("constants"), py::arg("quad_tol") = 1e-10,
          py::arg("kappa_max") = 12.0);
    py::class_<PositivityCertificate>(m, "PositivityCertificate")
        .def_readonly("positive", &PositivityCertificate::positive)
        .def_readonly("minimum", &PositivityCertificate::minimum)
        .def_readonly("argmin_kappa", &PositivityCertificate::argmin_kappa);
    m.def("fourier_positivity_certificate", &fourier_positivity_certificate);
    m.def(
        "mean_free_time",
        [](const FieldPoint& f, const std::array<double, 3>& k, const KineticConstants& kc,
           double quad_tol) { return mean_free_time(f, to_vec3(k), kc, quad_tol); },
        py::arg("fields"), py::arg("k"), py::arg("constants"), py::arg("quad_tol") = 1e-10);

    py::enum_<Boundary>(m, "Boundary")
        .value("periodic", Boundary::periodic)
        .value("reflective", Boundary::reflective);
    py::class_<Grid>(m, "Grid")
        .def(py::init<>())
        .def_readwrite("dim", &Grid::dim)
        .def_readwrite("n", &Grid::n)
        .def_readwrite("length", &Grid::length)
        .def_readwrite("bc", &Grid::bc)
        .def("dx", &Grid::dx)
        .def("cells", &Grid::cells)
        .def("validate", &Grid::validate);
    py::class_<FieldState>(m, "FieldState")
        .def_static("zeros", &FieldState::zeros, py::arg("grid"))
        .def_readwrite("grid", &FieldState::grid)
        .def_readwrite("time", &FieldState::time)
        .def_readwrite("rho", &FieldState::rho)
        .def_readwrite("theta", &FieldState::theta)
        .def_readwrite("u", &FieldState::u)
        .def("require_positive", &FieldState::require_positive);
    py::class_<ConservedTotals>(m, "ConservedTotals")
        .def_readonly("mass", &ConservedTotals::mass)
        .def_property_readonly("momentum",
                               [](const ConservedTotals& t) { return from_vec3(t.momentum); })
        .def_readonly("energy", &ConservedTotals::energy);
    m.def("stable_dt", &stable_dt, py::arg("state"), py::arg("table"), py::arg("constants"),
          py::arg("cfl") = 0.4, py::arg("beta_d") = 0.2);
    m.def("step", &step, py::arg("state"), py::arg("dt"), py::arg("table"), py::arg("constants"),
          py::arg("cfl") = 0.4, py::arg("beta_d") = 0.2);
    m.def(
        "boost",
        [](const FieldState& s, const std::array<double, 3>& v) { return boost(s, to_vec3(v)); },
        py::arg("state"), py::arg("v"));
    m.def("conserved_totals", &conserved_totals, py::arg("state"), py::arg("constants"));
    m.def("viscous_work_equivalence", &viscous_work_equivalence, py::arg("state"),
          py::arg("table"), py::arg("constants"));

    py::class_<MomentumBins>(m, "MomentumBins")
        .def_static("symmetric", &MomentumBins::symmetric, py::arg("count"), py::arg("k_max"))
        .def_readonly("count", &MomentumBins::count)
        .def_readonly("dk", &MomentumBins::dk)
        .def("k", &MomentumBins::k);
    py::class_<LatticeGasState>(m, "LatticeGasState")
        .def_readonly("sites", &LatticeGasState::sites)
        .def_readonly("bins", &LatticeGasState::bins)
        .def_readwrite("time", &LatticeGasState::time)
        .def_readwrite("N", &LatticeGasState::N)
        .def_readwrite("Pi", &LatticeGasState::Pi)
        .def_readwrite("E", &LatticeGasState::E)
        .def_readonly("p", &LatticeGasState::p)
        .def("site_u", &LatticeGasState::site_u)
        .def("site_theta", &LatticeGasState::site_theta)
        .def("rethermalise", &LatticeGasState::rethermalise, py::arg("constants"),
             py::arg("tol") = 1e-12);
    py::class_<HopKernel>(m, "HopKernel")
        .def_readonly("direction", &HopKernel::direction)
        .def_readonly("sites", &HopKernel::sites)
        .def_readonly("wrap_factor", &HopKernel::wrap_factor)
        .def("at", &HopKernel::at)
        .def("two_point_operator", &HopKernel::two_point_operator);
    m.def("build_hop_kernel", &build_hop_kernel, py::arg("state"), py::arg("direction"));
    m.def(
        "thermalise",
        [](double N, double Pi, double E, const MomentumBins& bins, const KineticConstants& kc,
           double tol, int max_iter) { return thermalise({N, Pi, E}, bins, kc, tol, max_iter); },
        py::arg("N"), py::arg("Pi"), py::arg("E"), py::arg("bins"), py::arg("constants"),
        py::arg("tol") = 1e-12, py::arg("max_iter") = 200);
    m.def("chain_step", &chain_step, py::arg("state"), py::arg("dt"), py::arg("constants"));
    m.def("lattice_entropy", &lattice_entropy, py::arg("state"), py::arg("constants"));
    py::class_<LatticeTotals>(m, "LatticeTotals")
        .def_readonly("mass", &LatticeTotals::mass)
        .def_readonly("momentum", &LatticeTotals::momentum)
        .def_readonly("energy", &LatticeTotals::energy);
    m.def("lattice_totals", &lattice_totals, py::arg("state"));
    m.def("make_uniform_lattice", &make_uniform_lattice, py::arg("sites"), py::arg("bins"),
          py::arg("k_max"), py::arg("occupation"), py::arg("theta"), py::arg("constants"));
    m.def("make_theta_bump_lattice", &make_theta_bump_lattice, py::arg("sites"), py::arg("bins"),
          py::arg("k_max"), py::arg("occupation"), py::arg("theta"), py::arg("amplitude"),
          py::arg("width"), py::arg("constants"));

    m.def("parse_config", &parse_config, py::arg("json_text"));
    m.def("run_scenario", &run_scenario, py::arg("config"), py::arg("out_dir"));
    py::class_<ScenarioConfig>(m, "ScenarioConfig")
        .def_readonly("constants", &ScenarioConfig::constants)
        .def_readonly("seed", &ScenarioConfig::seed)
        .def_readonly("config_hash", &ScenarioConfig::config_hash);
}
