#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ovstokes/case.hpp"
#include "ovstokes/errors.hpp"
#include "ovstokes/harness.hpp"
#include "ovstokes/manufactured.hpp"
#include "ovstokes/splines.hpp"

namespace py = pybind11;
using namespace ovs;

namespace {

CaseConfig parse_case(const std::string& text)
{
    try {
        return nlohmann::json::parse(text).get<CaseConfig>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigurationError(e.what());
    }
}

py::dict row_dict(const ResultRow& r)
{
    py::dict d;
    d["level"] = r.level;
    d["h"] = r.h;
    d["dofs"] = r.dofs;
    d["err_u_1h"] = r.err.energy;
    d["err_u_l2"] = r.err.l2_u;
    d["err_p_0h"] = r.err.pressure;
    d["err_p_l2"] = r.err.l2_p;
    d["p_jump"] = r.err.p_jump;
    d["kappa"] = r.kappa ? py::cast(*r.kappa) : py::none();
    d["wall_time"] = r.seconds;
    d["status"] = r.status;
    return d;
}

RunOptions options(std::optional<bool> stabilize, std::optional<double> theta, std::optional<double> gamma0,
                   std::optional<std::string> flux, bool kappa)
{
    RunOptions o;
    o.stabilize = stabilize;
    o.theta = theta;
    o.gamma0 = gamma0;
    if (flux) {
        if (*flux != "symmetric" && *flux != "onesided") throw ParameterError("flux must be symmetric or onesided");
        o.t = *flux == "symmetric" ? 0.5 : 1.0;
    }
    o.kappa = kappa;
    return o;
}

} // namespace

PYBIND11_MODULE(_ovstokes, m)
{
    // translators are tried newest first, so the base class goes first
    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ConfigurationError>(m, "ConfigurationError", PyExc_ValueError);
    py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);

    m.def(
        "gen_two_patch",
        [](double eps, int k) {
            CaseConfig c = gen_two_patch(eps);
            c.k = k;
            return nlohmann::json(c).dump();
        },
        py::arg("eps"), py::arg("k") = 2, "two-patch case as a JSON string");
    m.def(
        "gen_multi_patch",
        [](int n, int k) {
            CaseConfig c = gen_multi_patch(n);
            c.k = k;
            return nlohmann::json(c).dump();
        },
        py::arg("n"), py::arg("k") = 2, "multi-patch case as a JSON string");

    m.def(
        "solve",
        [](const std::string& case_json, int level, std::optional<bool> stabilize, std::optional<double> theta,
           std::optional<double> gamma0, std::optional<std::string> flux, bool kappa) {
            CaseConfig c = parse_case(case_json);
            RunOptions o = options(stabilize, theta, gamma0, flux, kappa);
            ResultRow r;
            {
                py::gil_scoped_release nogil;
                r = run_solve(c, level, o);
            }
            return row_dict(r);
        },
        py::arg("case_json"), py::arg("level") = 0, py::arg("stabilize") = py::none(), py::arg("theta") = py::none(),
        py::arg("gamma0") = py::none(), py::arg("flux") = py::none(), py::arg("kappa") = false);

    m.def(
        "convergence",
        [](const std::string& case_json, int levels, std::optional<bool> stabilize) {
            CaseConfig c = parse_case(case_json);
            std::vector<ResultRow> rows;
            {
                py::gil_scoped_release nogil;
                rows = run_convergence(c, levels, options(stabilize, {}, {}, {}, false));
            }
            py::list out;
            for (const auto& r : rows) out.append(row_dict(r));
            Slopes s = fit_slopes(rows);
            py::dict sl;
            sl["err_u_1h"] = s.energy;
            sl["err_u_l2"] = s.l2_u;
            sl["err_p_0h"] = s.pressure;
            sl["err_p_l2"] = s.l2_p;
            sl["p_jump"] = s.p_jump;
            py::dict d;
            d["rows"] = out;
            d["slopes"] = sl;
            return d;
        },
        py::arg("case_json"), py::arg("levels"), py::arg("stabilize") = py::none());

    m.def(
        "condition_sweep",
        [](const std::vector<double>& eps, int k, bool stabilized, bool unstabilized) {
            std::vector<SweepRow> rows;
            {
                py::gil_scoped_release nogil;
                rows = run_condition_sweep(eps, k, stabilized, unstabilized);
            }
            py::list out;
            for (const auto& r : rows) {
                py::dict d;
                d["eps"] = r.eps;
                d["kappa_stabilized"] = r.kappa_stab ? py::cast(*r.kappa_stab) : py::none();
                d["kappa_unstabilized"] = r.kappa_unstab ? py::cast(*r.kappa_unstab) : py::none();
                d["status_stabilized"] = r.status_stab;
                d["status_unstabilized"] = r.status_unstab;
                out.append(d);
            }
            return out;
        },
        py::arg("eps"), py::arg("k") = 2, py::arg("stabilized") = true, py::arg("unstabilized") = true);

    m.def(
        "bspline_basis",
        [](int degree, std::vector<double> knots, double x) {
            KnotVector kv(degree, std::move(knots));
            Eigen::VectorXd all = Eigen::VectorXd::Zero(kv.num_basis());
            int span = find_span(kv, x);
            Eigen::VectorXd v = eval_basis(kv, x);
            for (int a = 0; a <= degree; ++a) all[span - degree + a] = v[a];
            return std::vector<double>(all.data(), all.data() + all.size());
        },
        py::arg("degree"), py::arg("knots"), py::arg("x"), "all basis values at x");

    m.def(
        "exact",
        [](const std::string& name, double x, double y) {
            auto ex = manufactured(name);
            Vec2 X(x, y);
            Vec2 u = ex->u(X), f = ex->f(X);
            py::dict d;
            d["u"] = std::vector<double>{u.x(), u.y()};
            d["p"] = ex->p(X);
            d["f"] = std::vector<double>{f.x(), f.y()};
            return d;
        },
        py::arg("name"), py::arg("x"), py::arg("y"));

    m.def("manufactured_names", &manufactured_names);
}
