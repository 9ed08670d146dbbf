#include "riskmarket/apps.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "riskmarket/detail/rng.hpp"

namespace riskmarket {

namespace {

// log(1 + e^z) without overflow.
double log1pexp(double z) {
    if (z > 33.0) return z;
    if (z < -37.0) return std::exp(z);
    return std::log1p(std::exp(z));
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

} // namespace

void validate_dataset(const Dataset& data) {
    require(data.features.rows() >= 1, "dataset needs at least one row");
    require(data.features.cols() >= 1, "dataset needs at least one feature");
    require(data.features.allFinite(), "dataset features must be finite");
    require(data.labels.size() == data.features.rows(),
            "dataset needs one label per row");
    for (Eigen::Index i = 0; i < data.labels.size(); ++i)
        require(data.labels(i) == 1.0 || data.labels(i) == -1.0,
                "dataset labels must be +1 or -1");
}

Dataset load_dataset_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw error("cannot open dataset file: " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        bool numeric = true;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                const double v = std::stod(cell, &used);
                while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used])))
                    ++used;
                if (used != cell.size()) throw std::invalid_argument(cell);
                row.push_back(v);
            } catch (const std::exception&) {
                numeric = false;
                break;
            }
        }
        if (!numeric) {
            if (lineno == 1) continue; // header
            throw error("dataset line " + std::to_string(lineno) +
                        ": non-numeric field '" + cell + "'");
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw error("dataset line " + std::to_string(lineno) +
                        ": inconsistent column count");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw error("dataset file has no data rows: " + path.string());
    const int m = static_cast<int>(rows.size());
    const int k = static_cast<int>(rows.front().size()) - 1;
    if (k < 1) throw error("dataset needs at least one feature column before y");
    Dataset data;
    data.features.resize(m, k);
    data.labels.resize(m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < k; ++j)
            data.features(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        data.labels(i) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
    }
    validate_dataset(data);
    return data;
}

Dataset make_synthetic_dataset(const SyntheticDatasetSpec& spec) {
    require(spec.m >= 1, "synthetic dataset needs m >= 1");
    require(spec.k >= 1, "synthetic dataset needs k >= 1");
    detail::SplitMix64 rng(spec.seed ^ 0xda7a5e7ULL);
    Vector truth(spec.k);
    for (int j = 0; j < spec.k; ++j) truth(j) = spec.weight_scale * rng.normal();
    Dataset data;
    data.features.resize(spec.m, spec.k);
    data.labels.resize(spec.m);
    for (int i = 0; i < spec.m; ++i) {
        for (int j = 0; j < spec.k; ++j) data.features(i, j) = rng.normal();
        const double p = sigmoid(truth.dot(data.features.row(i)));
        data.labels(i) = rng.bernoulli(p) ? 1.0 : -1.0;
    }
    return data;
}

MarketConfig build_opinion_pool_market(const std::vector<Vector>& beliefs,
                                       const std::vector<double>& thetas,
                                       double theta0) {
    require(!beliefs.empty(), "pool market needs at least one belief");
    require(beliefs.size() == thetas.size(), "one theta per belief required");
    const int k = static_cast<int>(beliefs.front().size());
    MarketConfig config;
    config.outcomes = OutcomeSpace::indexed(k);
    config.basis.kind = BasisKind::ArrowDebreu;
    config.cost = LMSRSpec{theta0};
    for (std::size_t n = 0; n < beliefs.size(); ++n) {
        require(beliefs[n].size() == k, "beliefs must share one outcome space");
        require(beliefs[n].minCoeff() > 0.0, "pool market needs strictly positive beliefs");
        AgentConfig agent;
        agent.risk = EntropicSpec{thetas[n], beliefs[n]};
        agent.mode = AgentMode::Exact;
        config.agents.push_back(std::move(agent));
    }
    validate_config(config);
    return config;
}

MarketConfig build_gaussian_map_market(double mu1, double sigma1, double theta1,
                                       double theta0, double mu0, double sigma0) {
    require(sigma1 > 0.0, "sigma1 must be > 0");
    require(theta1 > 0.0, "theta1 must be > 0");
    require(theta0 > 0.0, "theta0 must be > 0");
    require(sigma0 > 0.0, "sigma0 must be > 0");
    MarketConfig config;
    config.basis.kind = BasisKind::Linear;
    // The prior enters through the pricing rule: c(s) = mu0 s + (sigma0^2
    // theta0 / 2) s^2, the conjugate of the prior's quadratic penalty.
    QuadraticCostSpec cost;
    cost.theta0 = sigma0 * sigma0 * theta0;
    cost.k = 1;
    if (mu0 != 0.0) cost.linear = Vector::Constant(1, mu0);
    config.cost = std::move(cost);
    AgentConfig agent;
    agent.risk = QuadraticRiskSpec{Vector::Constant(1, mu1), sigma1 * sigma1 * theta1};
    agent.mode = AgentMode::Exact;
    config.agents.push_back(std::move(agent));
    validate_config(config);
    return config;
}

GaussianMapSolution gaussian_map_closed_form(double mu1, double sigma1, double theta1,
                                             double theta0, double mu0, double sigma0) {
    require(sigma1 > 0.0 && theta1 > 0.0 && theta0 > 0.0 && sigma0 > 0.0,
            "gaussian closed form needs positive scales");
    const double prior_curv = sigma0 * sigma0 * theta0;
    const double likelihood_curv = sigma1 * sigma1 * theta1;
    const double s_star = (mu1 - mu0) / (prior_curv + likelihood_curv);
    const double mu_map = mu0 + prior_curv * s_star;
    return {s_star, mu_map};
}

MarketConfig build_logistic_market(const Dataset& data, double lambda,
                                   bool single_agent) {
    validate_dataset(data);
    return build_logistic_market(DatasetSource{data}, lambda, single_agent);
}

MarketConfig build_logistic_market(DatasetSource source, double lambda,
                                   bool single_agent) {
    require(lambda > 0.0, "lambda must be > 0");
    MarketConfig config;
    config.basis.kind = BasisKind::Linear;
    LogisticCostSpec cost;
    cost.lambda = lambda;
    cost.source = std::move(source);
    config.cost = std::move(cost);

    // Resolve K once to size the agents and their masks.
    const int k = num_securities(config);

    if (single_agent) {
        AgentConfig agent;
        agent.risk = QuadraticRiskSpec{Vector::Zero(k), lambda};
        agent.mode = AgentMode::GradientStep;
        config.agents.push_back(std::move(agent));
    } else {
        for (int i = 0; i < k; ++i) {
            AgentConfig agent;
            agent.risk = QuadraticRiskSpec{Vector::Zero(k), lambda};
            agent.mode = AgentMode::GradientStep;
            agent.mask.assign(static_cast<std::size_t>(k), false);
            agent.mask[static_cast<std::size_t>(i)] = true;
            config.agents.push_back(std::move(agent));
        }
    }
    config.stop.eps = 1e-10;
    validate_config(config);
    return config;
}

LogisticLossCost::LogisticLossCost(Dataset data) : data_(std::move(data)) {
    validate_dataset(data_);
}

double LogisticLossCost::cost(const ShareVector& w) const {
    check_dim(w);
    const Vector margins = data_.features * w;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < margins.size(); ++i)
        acc += log1pexp(-data_.labels(i) * margins(i));
    return acc / data_.num_rows();
}

ShareVector LogisticLossCost::price(const ShareVector& w) const {
    check_dim(w);
    const Vector margins = data_.features * w;
    Vector coeff(margins.size());
    for (Eigen::Index i = 0; i < margins.size(); ++i)
        coeff(i) = -data_.labels(i) * sigmoid(-data_.labels(i) * margins(i));
    return data_.features.transpose() * coeff / data_.num_rows();
}

Matrix LogisticLossCost::hessian(const ShareVector& w) const {
    check_dim(w);
    const Vector margins = data_.features * w;
    Vector weight(margins.size());
    for (Eigen::Index i = 0; i < margins.size(); ++i) {
        const double s = sigmoid(-data_.labels(i) * margins(i));
        weight(i) = s * (1.0 - s);
    }
    return data_.features.transpose() * weight.asDiagonal() * data_.features /
           data_.num_rows();
}

double regularized_logistic_objective(const Dataset& data, const Vector& w,
                                      double lambda) {
    require(w.size() == data.features.cols(), "weight length does not match dataset");
    double acc = 0.0;
    for (Eigen::Index i = 0; i < data.features.rows(); ++i)
        acc += log1pexp(-data.labels(i) * data.features.row(i).dot(w));
    return acc / static_cast<double>(data.features.rows()) +
           0.5 * lambda * w.squaredNorm();
}

Vector reference_logistic_solver(const Dataset& data, double lambda, double tol,
                                 int max_iter) {
    validate_dataset(data);
    require(lambda > 0.0, "lambda must be > 0");
    const int m = data.num_rows();
    const int k = data.num_features();
    Vector w = Vector::Zero(k);

    const auto objective = [&](const Vector& v) {
        double acc = 0.0;
        for (int i = 0; i < m; ++i)
            acc += log1pexp(-data.labels(i) * data.features.row(i).dot(v));
        return acc / m + 0.5 * lambda * v.squaredNorm();
    };
    const auto gradient = [&](const Vector& v) -> Vector {
        Vector g = lambda * v;
        for (int i = 0; i < m; ++i) {
            const double z = -data.labels(i) * data.features.row(i).dot(v);
            g -= data.labels(i) * sigmoid(z) * data.features.row(i).transpose() / m;
        }
        return g;
    };

    double fw = objective(w);
    for (int it = 0; it < max_iter; ++it) {
        const Vector g = gradient(w);
        const double gnorm = g.norm();
        if (gnorm <= tol) return w;
        double a = 1.0;
        bool stepped = false;
        while (a >= 1e-16) {
            const Vector cand = w - a * g;
            const double fc = objective(cand);
            if (fc <= fw - 1e-4 * a * gnorm * gnorm) {
                w = cand;
                fw = fc;
                stepped = true;
                break;
            }
            a *= 0.5;
        }
        if (!stepped) break;
    }
    if (gradient(w).norm() > tol)
        throw error("reference logistic solver did not reach the requested tolerance");
    return w;
}

} // namespace riskmarket
