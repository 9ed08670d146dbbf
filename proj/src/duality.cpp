#include "riskmarket/duality.hpp"

#include <cmath>

#include "riskmarket/detail/simplex_opt.hpp"

namespace riskmarket {

double PrimalProblem::value(const Vector& p) const {
    require(p.size() == dim, "primal point has the wrong dimension");
    double acc = 0.0;
    for (const auto& f : components) acc += f(p);
    return acc;
}

FenchelDomain FenchelDomain::simplex(int dim) {
    require(dim >= 1 && dim <= 8, "simplex Fenchel oracle is desk scale (dim <= 8)");
    FenchelDomain d;
    d.kind = Kind::Simplex;
    d.dim = dim;
    return d;
}

FenchelDomain FenchelDomain::box(Vector lower, Vector upper) {
    require(lower.size() == upper.size() && lower.size() >= 1,
            "box bounds must have equal, positive dimension");
    require((upper - lower).minCoeff() > 0.0, "box bounds must have positive extent");
    FenchelDomain d;
    d.kind = Kind::Box;
    d.dim = static_cast<int>(lower.size());
    d.lower = std::move(lower);
    d.upper = std::move(upper);
    return d;
}

OracleResult fenchel_transform_oracle(const std::function<double(const Vector&)>& F,
                                      const std::function<Vector(const Vector&)>* grad,
                                      const Vector& x, const FenchelDomain& domain,
                                      double tol, std::uint64_t seed) {
    require(x.size() == domain.dim, "transform point has the wrong dimension");
    if (domain.kind == FenchelDomain::Kind::Simplex) {
        detail::GradFn g;
        if (grad) g = *grad;
        return detail::maximize_linear_minus_over_simplex(x, F, grad ? &g : nullptr,
                                                          tol, seed);
    }
    const detail::ScalarFn obj = [&](const Vector& p) { return x.dot(p) - F(p); };
    detail::GradFn g;
    if (grad) {
        g = [&x, grad](const Vector& p) -> Vector { return x - (*grad)(p); };
    }
    return detail::maximize_over_box(obj, grad ? &g : nullptr, domain.lower,
                                     domain.upper, tol, seed);
}

PrimalProblem dual_objective_from_market(const std::vector<AgentSpec>& agents,
                                         const CostFunction& c) {
    for (const auto& a : agents)
        require(a.risk && a.risk->convex(),
                "primal recovery needs convex agent risk measures");

    if (const auto* lmsr = dynamic_cast<const LMSRCost*>(&c)) {
        PrimalProblem primal;
        primal.domain = PrimalProblem::Domain::Simplex;
        primal.dim = lmsr->dim();
        const double theta0 = lmsr->theta0();
        // Exact conjugate penalty of the LMSR: (1/theta0) sum_k P_k log P_k,
        // i.e. the uniform-KL penalty minus its log K constant.
        primal.components.push_back([theta0](const Vector& p) {
            double acc = 0.0;
            for (Eigen::Index i = 0; i < p.size(); ++i)
                if (p(i) > 0.0) acc += p(i) * std::log(p(i));
            return acc / theta0;
        });
        for (const auto& a : agents) {
            const auto* ent = dynamic_cast<const EntropicRisk*>(a.risk.get());
            require(ent != nullptr,
                    "LMSR primal recovery supports entropic agents only");
            require(ent->belief().size() == primal.dim,
                    "agent belief dimension does not match the market");
            const double theta = ent->theta();
            const Vector belief = ent->belief();
            primal.components.push_back([theta, belief](const Vector& p) {
                double acc = 0.0;
                for (Eigen::Index i = 0; i < p.size(); ++i) {
                    if (p(i) > 0.0) acc += p(i) * std::log(p(i) / belief(i));
                }
                return acc / theta;
            });
        }
        return primal;
    }

    if (const auto* quad = dynamic_cast<const QuadraticCost*>(&c)) {
        PrimalProblem primal;
        primal.domain = PrimalProblem::Domain::Euclidean;
        primal.dim = quad->dim();
        const double theta0 = quad->theta0();
        const Vector b = quad->linear();
        primal.components.push_back([theta0, b](const Vector& mu) {
            return (mu - b).squaredNorm() / (2.0 * theta0);
        });
        for (const auto& a : agents) {
            const auto* qr = dynamic_cast<const QuadraticRisk*>(a.risk.get());
            require(qr != nullptr,
                    "quadratic primal recovery supports quadratic-risk agents only");
            require(qr->scale() > 0.0,
                    "quadratic primal recovery needs a strictly positive scale");
            require(qr->mu().size() == primal.dim,
                    "agent mu dimension does not match the market");
            const Vector mu_n = qr->mu();
            const double scale = qr->scale();
            primal.components.push_back([mu_n, scale](const Vector& mu) {
                return (mu - mu_n).squaredNorm() / (2.0 * scale);
            });
        }
        return primal;
    }

    throw error("primal recovery supports LMSR+entropic and quadratic families only");
}

Vector analytic_log_pool(const std::vector<Vector>& beliefs,
                         const std::vector<double>& thetas, double theta0) {
    require(!beliefs.empty(), "pool needs at least one belief");
    require(beliefs.size() == thetas.size(), "one theta per belief required");
    require(theta0 > 0.0, "theta0 must be > 0 (or +infinity for the unbiased pool)");
    const Eigen::Index k = beliefs.front().size();
    double total_weight = std::isinf(theta0) ? 0.0 : 1.0 / theta0;
    for (double th : thetas) {
        require(th > 0.0 && std::isfinite(th), "agent thetas must be finite and > 0");
        total_weight += 1.0 / th;
    }
    Vector log_pool = Vector::Zero(k);
    for (std::size_t n = 0; n < beliefs.size(); ++n) {
        const Vector& b = beliefs[n];
        require(b.size() == k, "beliefs must share one outcome space");
        require(b.minCoeff() > 0.0, "pool needs strictly positive beliefs");
        require(std::abs(b.sum() - 1.0) <= 1e-12, "beliefs must sum to 1");
        const double exponent = (1.0 / thetas[n]) / total_weight;
        log_pool += exponent * b.array().log().matrix();
    }
    // The uniform market-maker belief contributes a constant per state, so
    // its exponent only matters through the deficit sum_n e_n < 1 above.
    const double m = log_pool.maxCoeff();
    Vector pool = (log_pool.array() - m).exp();
    return pool / pool.sum();
}

double weak_duality_check(double market_L, const PrimalProblem& primal,
                          const Vector& p_candidate) {
    return primal.value(p_candidate) + market_L;
}

} // namespace riskmarket
