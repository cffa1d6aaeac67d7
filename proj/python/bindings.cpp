#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kpztail/bounds.hpp"
#include "kpztail/crossover.hpp"
#include "kpztail/deformed_airy.hpp"
#include "kpztail/fredholm.hpp"
#include "kpztail/kernel_ops.hpp"
#include "kpztail/special.hpp"

namespace py = pybind11;
using namespace kpztail;

namespace {

Config make_config(double T0, double abs_tol, double det_tol) {
    Config cfg;
    cfg.T0 = T0;
    cfg.abs_tol = abs_tol;
    cfg.det_tol = det_tol;
    return cfg;
}

py::dict airy_result_dict(const airy::AiryEvalResult& r) {
    py::dict d;
    d["value"] = r.value;
    d["imag_residual"] = r.imag_residual;
    d["contour_case"] = airy::to_string(r.contour_case);
    d["nodes_used"] = r.quad.nodes_used;
    d["abs_error_estimate"] = r.quad.abs_error_estimate;
    return d;
}

} // namespace

PYBIND11_MODULE(_kpztail, m) {
    m.doc() = "Gamma-deformed Airy functions, crossover kernel Fredholm determinants, "
              "and the right tail of the KPZ edge crossover distribution";

    m.def("gamma", &special::gamma, py::arg("z"));
    m.def("recip_gamma", &special::recip_gamma, py::arg("z"));
    m.def("log_gamma", &special::log_gamma, py::arg("z"));

    m.def(
        "check_stirling_sandwich",
        [](double x) {
            auto r = special::check_stirling_sandwich(x);
            py::dict d;
            d["x"] = r.x;
            d["middle"] = r.middle;
            d["upper_bound"] = r.upper_bound;
            d["ok"] = r.ok;
            return d;
        },
        py::arg("x"));

    m.def(
        "check_recip_gamma_envelope",
        [](double re_min, double re_max, double im_min, double im_max, double step) {
            auto r = special::check_recip_gamma_envelope({re_min, re_max, im_min, im_max},
                                                         step);
            py::dict d;
            d["max_ratio"] = r.max_ratio;
            d["argmax"] = std::complex<double>(r.argmax_point);
            d["violations"] = r.violations;
            return d;
        },
        py::arg("re_min"), py::arg("re_max"), py::arg("im_min"), py::arg("im_max"),
        py::arg("step"));

    m.def(
        "ai_upper_gamma",
        [](double x, double T, double T0) {
            Config cfg = make_config(T0, 1e-10, 1e-8);
            return airy_result_dict(
                airy::ai_upper_gamma(airy::DeformedAiryParams::from_T(x, T), cfg));
        },
        py::arg("x"), py::arg("T"), py::arg("T0") = 1.0);
    m.def(
        "ai_lower_gamma",
        [](double x, double T, double T0) {
            Config cfg = make_config(T0, 1e-10, 1e-8);
            return airy_result_dict(
                airy::ai_lower_gamma(airy::DeformedAiryParams::from_T(x, T), cfg));
        },
        py::arg("x"), py::arg("T"), py::arg("T0") = 1.0);
    m.def("airy_classical", [](double x) { return airy::airy_classical(x); }, py::arg("x"));
    m.def(
        "airy_classical_deriv", [](double x) { return airy::airy_classical_deriv(x); },
        py::arg("x"));

    m.def(
        "certify_envelope",
        [](const std::string& which, std::vector<double> x_grid,
           std::vector<double> T_grid) {
            bounds::EnvelopeSpec spec;
            if (which == "upper_all_x") spec.which = bounds::EnvelopeKind::upper_all_x;
            else if (which == "lower_pos_x") spec.which = bounds::EnvelopeKind::lower_pos_x;
            else if (which == "lower_neg_x") spec.which = bounds::EnvelopeKind::lower_neg_x;
            else throw std::invalid_argument("which: upper_all_x|lower_pos_x|lower_neg_x");
            auto r = bounds::certify_envelope(spec, x_grid, T_grid);
            py::dict d;
            d["empirical_C"] = r.empirical_C;
            d["argmax_x"] = r.argmax_x;
            d["argmax_T"] = r.argmax_T;
            d["monotone_tail_ok"] = r.monotone_tail_ok;
            return d;
        },
        py::arg("which"), py::arg("x_grid"), py::arg("T_grid"));

    m.def(
        "mu_factor",
        [](double t, double T, std::complex<double> mu, double s) {
            return op::mu_factor(t, op::KernelSpec{T, mu, s});
        },
        py::arg("t"), py::arg("T"), py::arg("mu"), py::arg("s") = 10.0);

    m.def(
        "kernel_eval",
        [](double x, double y, double T, std::complex<double> mu, double s) {
            return op::kernel_eval(x, y, op::KernelSpec{T, mu, s});
        },
        py::arg("x"), py::arg("y"), py::arg("T"), py::arg("mu"), py::arg("s"));

    m.def(
        "hs_norms",
        [](double T, std::complex<double> mu, double s) {
            auto r = op::hs_norms(op::KernelSpec{T, mu, s});
            py::dict d;
            d["norm_a1"] = r.norm_a1;
            d["norm_a2"] = r.norm_a2;
            d["I1"] = r.I1;
            d["I2"] = r.I2;
            d["I3"] = r.I3;
            d["I4"] = r.I4;
            d["product"] = r.product;
            return d;
        },
        py::arg("T"), py::arg("mu"), py::arg("s"));

    m.def(
        "nystrom_det",
        [](double T, std::complex<double> mu, double s, int n_start) {
            auto r = fredholm::nystrom_det(op::KernelSpec{T, mu, s}, n_start);
            py::dict d;
            d["det"] = std::complex<double>(r.det);
            d["n"] = r.n;
            d["converged"] = r.converged;
            d["richardson"] = std::complex<double>(r.richardson);
            return d;
        },
        py::arg("T"), py::arg("mu"), py::arg("s"), py::arg("n_start") = 16);

    m.def(
        "det_bound_check",
        [](double T, std::complex<double> mu, double s) {
            auto r = fredholm::det_bound_check(op::KernelSpec{T, mu, s});
            py::dict d;
            d["lhs"] = r.lhs;
            d["rhs"] = r.rhs;
            d["ok"] = r.ok;
            d["slack_ratio"] = r.slack_ratio;
            return d;
        },
        py::arg("T"), py::arg("mu"), py::arg("s"));

    m.def(
        "tail_probability",
        [](double s, double T, double delta, double radius, double truncation,
           double det_tol) {
            crossover::MuContourSpec mc{delta, radius, truncation};
            auto r = crossover::tail_probability(s, T, mc, det_tol);
            py::dict d;
            d["tail"] = r.tail;
            d["imag_residual"] = r.imag_residual;
            d["err_estimate"] = r.err_estimate;
            d["n_used"] = r.n_used;
            return d;
        },
        py::arg("s"), py::arg("T"), py::arg("delta") = 0.5, py::arg("radius") = 0.5,
        py::arg("truncation") = 40.0, py::arg("det_tol") = 1e-8);

    m.def(
        "sweep",
        [](std::vector<double> s_values, std::vector<double> T_values, int jobs) {
            crossover::MuContourSpec mc;
            auto rows = crossover::sweep(s_values, T_values, mc, 1e-8, default_config(),
                                         jobs);
            py::list out;
            for (const auto& r : rows) {
                py::dict d;
                d["s"] = r.s;
                d["T"] = r.T;
                d["tail"] = r.tail;
                d["err"] = r.err;
                out.append(d);
            }
            return out;
        },
        py::arg("s_values"), py::arg("T_values"), py::arg("jobs") = 1);

    m.def("fit_tail_envelope", [](py::list samples) {
        std::vector<crossover::SweepRow> rows;
        for (auto item : samples) {
            py::dict d = item.cast<py::dict>();
            rows.push_back({d["s"].cast<double>(), d["T"].cast<double>(),
                            d["tail"].cast<double>(), 0.0});
        }
        auto f = crossover::fit_tail_envelope(rows);
        py::dict d;
        d["c1"] = f.c1;
        d["c2"] = f.c2;
        d["c3"] = f.c3;
        d["rms_log_residual"] = f.rms_log_residual;
        d["max_log_residual"] = f.max_log_residual;
        d["model_slope_ratio"] = f.model_slope_ratio;
        d["empirical_slope_ratio"] = f.empirical_slope_ratio;
        return d;
    });

    m.attr("__version__") = "0.1.0";
}
