#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "riskmarket/apps.hpp"
#include "riskmarket/runner.hpp"

namespace py = pybind11;
using namespace riskmarket;

namespace {

PenaltyFunctional wrap_penalty(int dim, const std::function<double(const Vector&)>& alpha) {
    PenaltyFunctional pen;
    pen.dim = dim;
    pen.alpha = alpha;
    return pen;
}

py::dict summary_to_dict(const RunSummary& s) {
    py::dict d;
    d["rounds"] = s.rounds;
    d["converged"] = s.converged;
    d["final_objective"] = s.final_objective;
    d["final_price"] = s.final_price;
    d["avg_price"] = s.avg_price;
    d["primal_value"] = s.primal_value ? py::cast(*s.primal_value) : py::none();
    d["duality_gap"] = s.duality_gap ? py::cast(*s.duality_gap) : py::none();
    d["wall_clock_seconds"] = s.wall_seconds;
    return d;
}

py::dict trace_to_dict(const MarketRun& run, int k) {
    const auto m = static_cast<Eigen::Index>(run.trace.size());
    Eigen::VectorXi t(m), agent(m);
    Vector cost(m), objective(m);
    Matrix deltas(m, k), prices(m, k);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto& rec = run.trace[static_cast<std::size_t>(i)];
        t(i) = rec.t;
        agent(i) = rec.agent_id;
        cost(i) = rec.cost_paid;
        objective(i) = rec.objective_after;
        deltas.row(i) = rec.delta;
        prices.row(i) = rec.price_after;
    }
    py::dict d;
    d["t"] = t;
    d["agent"] = agent;
    d["delta"] = deltas;
    d["cost_paid"] = cost;
    d["objective"] = objective;
    d["price"] = prices;
    return d;
}

py::tuple run_config_json(const std::string& config_json) {
    const MarketConfig config = parse_config(nlohmann::json::parse(config_json));
    const RunOutput out = run_config(config);
    return py::make_tuple(summary_to_dict(out.summary),
                          trace_to_dict(out.run, out.num_securities),
                          out.run.state.inventory);
}

} // namespace

PYBIND11_MODULE(_riskmarket, m) {
    m.doc() = "Multi-period prediction markets driven by risk-measure agents";

    // translators are tried newest-first, so the derived type goes second
    py::register_exception<error>(m, "MarketError", PyExc_RuntimeError);
    py::register_exception<config_error>(m, "ConfigError", PyExc_ValueError);

    // core
    m.def("verify_basis", &verify_basis, py::arg("payoff_matrix"),
          py::arg("rel_tol") = kDefaultRankTol,
          "True iff the K x n payoff matrix has full row rank");
    m.def(
        "asset_payoff",
        [](const Vector& shares, const Matrix& payoff_matrix) {
            return asset_payoff(shares, SecurityBasis(payoff_matrix));
        },
        py::arg("shares"), py::arg("payoff_matrix"),
        "Per-state payoff of the asset implied by the holdings");
    m.def(
        "recover_shares",
        [](const Vector& payoff, const Matrix& payoff_matrix) {
            return recover_shares(payoff, SecurityBasis(payoff_matrix));
        },
        py::arg("payoff"), py::arg("payoff_matrix"));

    // risk measures
    py::class_<EntropicRisk>(m, "EntropicRisk")
        .def(py::init<double, Vector>(), py::arg("theta"), py::arg("belief"))
        .def("risk", &EntropicRisk::payoff_risk, py::arg("payoff"))
        .def("tilted_belief", &EntropicRisk::tilted_belief, py::arg("payoff"))
        .def_property_readonly("theta", &EntropicRisk::theta)
        .def_property_readonly("belief", &EntropicRisk::belief);
    py::class_<VaRRisk>(m, "VaRRisk")
        .def(py::init<double, Vector>(), py::arg("alpha"), py::arg("belief"))
        .def("risk", &VaRRisk::payoff_risk, py::arg("payoff"));
    py::class_<QuadraticRisk>(m, "QuadraticRisk")
        .def(py::init<Vector, double>(), py::arg("mu"), py::arg("scale"))
        .def(
            "risk",
            [](const QuadraticRisk& r, const Vector& shares) {
                return r.risk(shares, nullptr);
            },
            py::arg("shares"));
    m.def(
        "gross_risk",
        [](double cash, const Vector& payoff, const EntropicRisk& r) {
            return gross_risk(cash, payoff, r);
        },
        py::arg("cash"), py::arg("payoff"), py::arg("measure"),
        "rho(X + w) = rho(X) - w");
    m.def(
        "penalty_risk_oracle",
        [](const Vector& payoff, const std::function<double(const Vector&)>& alpha,
           double tol) {
            const auto res = penalty_risk_oracle(
                payoff, wrap_penalty(static_cast<int>(payoff.size()), alpha), tol);
            return py::make_tuple(res.value, res.argmax, res.converged);
        },
        py::arg("payoff"), py::arg("alpha"), py::arg("tol") = 1e-4,
        "Numeric sup over the simplex of E_Q[-x] - alpha(Q); returns (value, "
        "argmax, converged)");

    // pricing
    py::class_<LMSRCost>(m, "LMSRCost")
        .def(py::init<double, int>(), py::arg("theta0"), py::arg("num_securities"))
        .def("cost", &LMSRCost::cost, py::arg("inventory"))
        .def("price", &LMSRCost::price, py::arg("inventory"));
    py::class_<QuadraticCost>(m, "QuadraticCost")
        .def(py::init<double, int>(), py::arg("theta0"), py::arg("num_securities") = 1)
        .def("cost", &QuadraticCost::cost, py::arg("inventory"))
        .def("price", &QuadraticCost::price, py::arg("inventory"));
    m.def(
        "incremental_cost",
        [](const LMSRCost& c, const Vector& before, const Vector& delta) {
            return incremental_cost(c, before, delta);
        },
        py::arg("cost"), py::arg("before"), py::arg("delta"));
    m.def(
        "duality_based_cost_oracle",
        [](const std::function<double(const Vector&)>& penalty, const Vector& inventory,
           double tol) {
            const auto res = duality_based_cost_oracle(
                wrap_penalty(static_cast<int>(inventory.size()), penalty), inventory,
                tol);
            return py::make_tuple(res.value, res.argmax, res.converged);
        },
        py::arg("penalty"), py::arg("inventory"), py::arg("tol") = 1e-6);

    // duality
    m.def("analytic_log_pool", &analytic_log_pool, py::arg("beliefs"),
          py::arg("thetas"), py::arg("theta0"),
          "Closed-form biased logarithmic opinion pool");

    // worked examples
    m.def(
        "gaussian_map_closed_form",
        [](double mu1, double sigma1, double theta1, double theta0, double mu0,
           double sigma0) {
            const auto sol =
                gaussian_map_closed_form(mu1, sigma1, theta1, theta0, mu0, sigma0);
            return py::make_tuple(sol.s_star, sol.mu_map);
        },
        py::arg("mu1"), py::arg("sigma1"), py::arg("theta1"), py::arg("theta0"),
        py::arg("mu0") = 0.0, py::arg("sigma0") = 1.0,
        "Equilibrium holdings and posterior-mean price of the single-agent "
        "quadratic market");
    m.def(
        "make_synthetic_dataset",
        [](int m_rows, int k, std::uint64_t seed, double weight_scale) {
            const Dataset data = make_synthetic_dataset({m_rows, k, seed, weight_scale});
            return py::make_tuple(data.features, data.labels);
        },
        py::arg("m"), py::arg("k"), py::arg("seed") = 1,
        py::arg("weight_scale") = 1.0);
    m.def(
        "reference_logistic_solver",
        [](const Matrix& features, const Vector& labels, double lam, double tol) {
            return reference_logistic_solver(Dataset{features, labels}, lam, tol);
        },
        py::arg("features"), py::arg("labels"), py::arg("lambda"),
        py::arg("tol") = 1e-7,
        "Independent full-batch gradient-descent oracle for the regression market");
    m.def(
        "logistic_objective",
        [](const Matrix& features, const Vector& labels, const Vector& w, double lam) {
            return regularized_logistic_objective(Dataset{features, labels}, w, lam);
        },
        py::arg("features"), py::arg("labels"), py::arg("w"), py::arg("lambda"));

    // runs
    m.def("preset_names", &preset_names);
    m.def(
        "preset_config",
        [](const std::string& name, std::optional<std::uint64_t> seed) {
            return config_to_json(make_preset(name, seed)).dump();
        },
        py::arg("name"), py::arg("seed") = py::none(),
        "JSON text of a built-in preset configuration");
    m.def("run_config_json", &run_config_json, py::arg("config_json"),
          "Run a market from JSON config text; returns (summary, trace, "
          "final_inventory)");

    m.attr("__all__") =
        py::make_tuple("verify_basis", "asset_payoff", "recover_shares",
                       "EntropicRisk", "VaRRisk", "QuadraticRisk", "gross_risk",
                       "penalty_risk_oracle", "LMSRCost", "QuadraticCost",
                       "incremental_cost", "duality_based_cost_oracle",
                       "analytic_log_pool", "gaussian_map_closed_form",
                       "make_synthetic_dataset", "reference_logistic_solver",
                       "logistic_objective", "preset_names", "preset_config",
                       "run_config_json", "ConfigError", "MarketError");
}
