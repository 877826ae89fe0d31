#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sharpbound/bound.hpp"
#include "sharpbound/experiment.hpp"
#include "sharpbound/hessian.hpp"
#include "sharpbound/loss_grad.hpp"
#include "sharpbound/oracle.hpp"
#include "sharpbound/rng.hpp"
#include "sharpbound/stats.hpp"
#include "sharpbound/traces.hpp"

namespace py = pybind11;
namespace sb = sharpbound;

namespace {

sb::Matrix matrix_from_numpy(const py::array_t<double>& array) {
    const auto buf = array.request();
    if (buf.ndim != 2) throw std::invalid_argument("expected a 2-d array");
    sb::Matrix m(static_cast<std::size_t>(buf.shape[0]),
                 static_cast<std::size_t>(buf.shape[1]));
    const auto view = array.unchecked<2>();
    for (py::ssize_t i = 0; i < buf.shape[0]; ++i)
        for (py::ssize_t j = 0; j < buf.shape[1]; ++j) m(i, j) = view(i, j);
    return m;
}

py::array_t<double> matrix_to_numpy(const sb::Matrix& m) {
    py::array_t<double> out({m.rows(), m.cols()});
    auto view = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) view(i, j) = m(i, j);
    return out;
}

struct Instance {
    sb::NetworkParams params;
    sb::Dataset data;
    sb::ActivationKind kind;
};

Instance make_instance(const std::vector<double>& theta, int input_dim, int hidden_dim,
                       const std::string& kind, const py::array_t<double>& inputs,
                       const std::vector<int>& labels) {
    Instance inst;
    inst.kind = sb::activation_from_string(kind);
    inst.params = sb::unflatten(theta, {input_dim, hidden_dim});
    inst.data.inputs = matrix_from_numpy(inputs);
    inst.data.labels = labels;
    sb::validate(inst.data);
    return inst;
}

py::dict spectrum_dict(const sb::SpectrumReport& report) {
    py::dict out;
    out["eigenvalues"] = report.eigenvalues;
    out["lambda1"] = report.lambda1;
    out["mu"] = report.mu;
    out["sigma2"] = report.sigma2;
    out["lambda_sup"] = report.lambda_sup;
    out["psd"] = report.psd;
    return out;
}

}  // namespace

PYBIND11_MODULE(_sharpbound, m) {
    m.doc() = "Closed-form Hessian traces and the Wolkowicz-Styan sharpness bound "
              "for a 3-layer cross-entropy network";

    m.def("param_dim", &sb::param_dim, py::arg("input_dim"), py::arg("hidden_dim"));

    m.def(
        "activation_eval",
        [](const std::string& kind, double y) {
            const sb::ActivationEval e = sb::eval(sb::activation_from_string(kind), y);
            return py::make_tuple(e.value, e.slope, e.curve);
        },
        py::arg("kind"), py::arg("y"), "value, first and second derivative at y");

    m.def(
        "activation_profile",
        [](const std::string& kind) {
            const sb::ActivationProfile p =
                sb::profile(sb::activation_from_string(kind));
            py::dict out;
            out["f_prime_max"] = p.f_prime_max;
            out["f_prime_inf"] = p.f_prime_inf;
            out["f_second_max"] = p.f_second_max;
            out["f_second_min"] = p.f_second_min;
            out["zeta1"] = p.zeta1;
            out["zeta2"] = p.zeta2;
            out["output_sup"] = p.output_sup;
            return out;
        },
        py::arg("kind"));

    m.def(
        "total_loss",
        [](const std::vector<double>& theta, int input_dim, int hidden_dim,
           const std::string& kind, const py::array_t<double>& inputs,
           const std::vector<int>& labels) {
            const Instance inst =
                make_instance(theta, input_dim, hidden_dim, kind, inputs, labels);
            return sb::total_loss(inst.params, inst.kind, inst.data);
        },
        py::arg("theta"), py::arg("input_dim"), py::arg("hidden_dim"), py::arg("kind"),
        py::arg("inputs"), py::arg("labels"));

    m.def(
        "grad_total",
        [](const std::vector<double>& theta, int input_dim, int hidden_dim,
           const std::string& kind, const py::array_t<double>& inputs,
           const std::vector<int>& labels) {
            const Instance inst =
                make_instance(theta, input_dim, hidden_dim, kind, inputs, labels);
            return sb::grad_total(inst.params, inst.kind, inst.data);
        },
        py::arg("theta"), py::arg("input_dim"), py::arg("hidden_dim"), py::arg("kind"),
        py::arg("inputs"), py::arg("labels"));

    m.def(
        "hessian_total",
        [](const std::vector<double>& theta, int input_dim, int hidden_dim,
           const std::string& kind, const py::array_t<double>& inputs,
           const std::vector<int>& labels) {
            const Instance inst =
                make_instance(theta, input_dim, hidden_dim, kind, inputs, labels);
            return matrix_to_numpy(
                sb::hessian_total(inst.params, inst.kind, inst.data).assembled);
        },
        py::arg("theta"), py::arg("input_dim"), py::arg("hidden_dim"), py::arg("kind"),
        py::arg("inputs"), py::arg("labels"),
        "assembled D x D Hessian of the total loss");

    m.def(
        "traces",
        [](const std::vector<double>& theta, int input_dim, int hidden_dim,
           const std::string& kind, const py::array_t<double>& inputs,
           const std::vector<int>& labels) {
            const Instance inst =
                make_instance(theta, input_dim, hidden_dim, kind, inputs, labels);
            const sb::BatchTrace batch =
                sb::forward_batch(inst.params, inst.kind, inst.data);
            const sb::TraceBundle traces =
                sb::trace_bundle(batch, inst.params, inst.data);
            py::dict out;
            out["tr_ww"] = traces.parts.ww;
            out["tr_vv"] = traces.parts.vv;
            out["tr_total"] = traces.parts.total;
            out["tr_sq_total"] = traces.squared.sq_total;
            return out;
        },
        py::arg("theta"), py::arg("input_dim"), py::arg("hidden_dim"), py::arg("kind"),
        py::arg("inputs"), py::arg("labels"),
        "closed-form tr(H) and tr(H^2), no Hessian materialized");

    m.def(
        "trace_bounds",
        [](const std::vector<double>& theta, int input_dim, int hidden_dim,
           const std::string& kind, const py::array_t<double>& inputs,
           const std::vector<int>& labels) {
            const Instance inst =
                make_instance(theta, input_dim, hidden_dim, kind, inputs, labels);
            const sb::BatchTrace batch =
                sb::forward_batch(inst.params, inst.kind, inst.data);
            const sb::TraceBounds bounds = sb::trace_bounds(
                sb::profile(inst.kind), inst.params, inst.data, batch);
            py::dict out;
            out["ub_tr_vv"] = bounds.ub_tr_vv;
            out["ub_tr_ww"] = bounds.ub_tr_ww;
            out["ub_tr_sq"] = bounds.ub_tr_sq;
            out["phi_max"] = bounds.phi_max;
            return out;
        },
        py::arg("theta"), py::arg("input_dim"), py::arg("hidden_dim"), py::arg("kind"),
        py::arg("inputs"), py::arg("labels"));

    m.def(
        "lambda_sup",
        [](double tr_total, double tr_sq_total, int dim) {
            const sb::EigenvalueBound b =
                sb::lambda_sup_closed_form(tr_total, tr_sq_total, dim);
            py::dict out;
            out["mu"] = b.mu;
            out["sigma2"] = b.sigma2;
            out["lambda_sup"] = b.lambda_sup;
            return out;
        },
        py::arg("tr_total"), py::arg("tr_sq_total"), py::arg("dim"),
        "Wolkowicz-Styan upper bound from the two traces");

    m.def(
        "spectrum",
        [](const py::array_t<double>& matrix) {
            const sb::Matrix a = matrix_from_numpy(matrix);
            return spectrum_dict(
                sb::spectrum_report(a, sb::matrix_trace(a), sb::matrix_sq_trace(a)));
        },
        py::arg("matrix"),
        "Jacobi eigenvalues plus the closed-form bound of a symmetric matrix");

    m.def(
        "macro_f1",
        [](const std::vector<int>& predictions, const std::vector<int>& truth) {
            return sb::macro_f1(predictions, truth);
        },
        py::arg("predictions"), py::arg("truth"));

    m.def(
        "mann_whitney_u",
        [](const std::vector<double>& a, const std::vector<double>& b) {
            const sb::MannWhitneyResult r = sb::mann_whitney_u(a, b);
            return py::make_tuple(r.u, r.p_two_sided);
        },
        py::arg("sample_a"), py::arg("sample_b"));
}
