#include "riskmarket/agent.hpp"

#include <Eigen/Cholesky>
#include <cmath>

namespace riskmarket {

namespace {

std::vector<int> masked_indices(const AgentSpec& agent, int k) {
    std::vector<int> idx;
    for (int i = 0; i < k; ++i)
        if (agent.may_trade(i)) idx.push_back(i);
    require(!idx.empty(), "agent must be allowed to trade at least one security");
    return idx;
}

ShareVector embed(const Vector& masked, const std::vector<int>& idx, int k) {
    ShareVector full = ShareVector::Zero(k);
    for (std::size_t j = 0; j < idx.size(); ++j)
        full(idx[j]) = masked(static_cast<Eigen::Index>(j));
    return full;
}

Vector restrict_to(const Vector& full, const std::vector<int>& idx) {
    Vector out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j)
        out(static_cast<Eigen::Index>(j)) = full(idx[j]);
    return out;
}

Matrix restrict_to(const Matrix& full, const std::vector<int>& idx) {
    const auto m = static_cast<Eigen::Index>(idx.size());
    Matrix out(m, m);
    for (Eigen::Index a = 0; a < m; ++a)
        for (Eigen::Index b = 0; b < m; ++b)
            out(a, b) = full(idx[static_cast<std::size_t>(a)],
                             idx[static_cast<std::size_t>(b)]);
    return out;
}

// Round objective phi(delta) = rho(s + delta) + c(Y + delta) - c(Y) on the
// masked coordinates.
struct RoundObjective {
    const AgentSpec& agent;
    const CostFunction& c;
    const ShareVector& shares;
    const ShareVector& inventory;
    const SecurityBasis* basis;
    const std::vector<int>& idx;
    double cost_at_inventory;

    double operator()(const Vector& masked) const {
        const ShareVector d = embed(masked, idx, c.dim());
        return agent.risk->risk(shares + d, basis) + c.cost(inventory + d) -
               cost_at_inventory;
    }
    Vector gradient(const Vector& masked) const {
        const ShareVector d = embed(masked, idx, c.dim());
        const Vector full =
            agent.risk->risk_gradient(shares + d, basis) + c.price(inventory + d);
        return restrict_to(full, idx);
    }
    Matrix hessian(const Vector& masked) const {
        const ShareVector d = embed(masked, idx, c.dim());
        const Matrix full = agent.risk->risk_hessian(shares + d, basis) +
                            c.hessian(inventory + d);
        return restrict_to(full, idx);
    }
};

// Armijo backtracking along `dir`; returns the accepted step (0 if none).
double backtrack(const RoundObjective& f, const Vector& at, double f_at,
                 const Vector& grad, const Vector& dir, const BacktrackParams& bt) {
    const double slope = grad.dot(dir);
    if (!(slope < 0.0)) return 0.0;
    double a = bt.a0;
    while (a >= bt.a_min) {
        const double trial = f(at + a * dir);
        if (std::isfinite(trial) && trial <= f_at + bt.sigma * a * slope) return a;
        a *= bt.beta;
    }
    return 0.0;
}

TradeProposal finish(const RoundObjective& f, Vector masked, bool converged,
                     double clip, const std::vector<int>& idx, int k,
                     const CostFunction& c, const ShareVector& inventory) {
    TradeProposal out;
    out.converged = converged;
    const double phi0 = f(Vector::Zero(masked.size()));
    const double inf_norm = masked.size() ? masked.lpNorm<Eigen::Infinity>() : 0.0;
    if (inf_norm > clip) {
        masked *= clip / inf_norm;
        out.clipped = true;
    }
    // A proposal must never worsen the agent's position; back off toward
    // zero if clipping (or a stalled solve) left it uphill.
    int guard = 0;
    while (f(masked) > phi0 && guard++ < 60) masked *= 0.5;
    if (f(masked) > phi0) masked.setZero();
    out.delta = embed(masked, idx, k);
    out.cost = incremental_cost(c, inventory, out.delta);
    return out;
}

} // namespace

TradeProposal select_exact(const Portfolio& portfolio, const AgentSpec& agent,
                           const CostFunction& c, const ShareVector& inventory,
                           const SecurityBasis* basis, const ExactSolveParams& params) {
    require(static_cast<bool>(agent.risk), "agent has no risk measure");
    require(agent.risk->convex(),
            "exact portfolio selection needs a convex risk measure");
    require(params.tol > 0.0, "solver tolerance must be > 0");
    const int k = c.dim();
    require(portfolio.shares.size() == k && inventory.size() == k,
            "portfolio/inventory dimensions do not match the cost function");
    const std::vector<int> idx = masked_indices(agent, k);
    const RoundObjective f{agent, c, portfolio.shares, inventory,
                           basis,  idx, c.cost(inventory)};

    Vector delta = Vector::Zero(static_cast<Eigen::Index>(idx.size()));
    bool converged = false;
    for (int it = 0; it < params.max_iter; ++it) {
        const Vector g = f.gradient(delta);
        if (g.norm() <= params.tol) {
            converged = true;
            break;
        }
        // Damped Newton; the Hessian may be singular along flat directions
        // (LMSR plus entropic risk is flat along the all-ones direction), so
        // keep raising the ridge until the step points downhill.
        Matrix h = f.hessian(delta);
        double lambda = 1e-12 * (1.0 + h.diagonal().cwiseAbs().maxCoeff());
        Vector dir;
        bool have_dir = false;
        for (int attempt = 0; attempt < 12; ++attempt) {
            const Matrix damped =
                h + lambda * Matrix::Identity(h.rows(), h.cols());
            Eigen::LDLT<Matrix> ldlt(damped);
            if (ldlt.info() == Eigen::Success) {
                dir = ldlt.solve(-g);
                if (dir.allFinite() && g.dot(dir) < 0.0) {
                    have_dir = true;
                    break;
                }
            }
            lambda = std::max(lambda * 100.0, 1e-10);
        }
        if (!have_dir) dir = -g;
        double a = backtrack(f, delta, f(delta), g, dir, params.bt);
        if (a == 0.0 && have_dir) {
            dir = -g;
            a = backtrack(f, delta, f(delta), g, dir, params.bt);
        }
        if (a == 0.0) break; // no admissible descent left
        delta += a * dir;
        if (delta.lpNorm<Eigen::Infinity>() > 100.0 * params.clip) break; // diverging
    }
    return finish(f, std::move(delta), converged, params.clip, idx, k, c, inventory);
}

TradeProposal select_gradient_step(const Portfolio& portfolio, const AgentSpec& agent,
                                   const CostFunction& c, const ShareVector& inventory,
                                   const SecurityBasis* basis,
                                   const BacktrackParams& params) {
    require(static_cast<bool>(agent.risk), "agent has no risk measure");
    const int k = c.dim();
    require(portfolio.shares.size() == k && inventory.size() == k,
            "portfolio/inventory dimensions do not match the cost function");
    const std::vector<int> idx = masked_indices(agent, k);
    const RoundObjective f{agent, c, portfolio.shares, inventory,
                           basis,  idx, c.cost(inventory)};

    const Vector zero = Vector::Zero(static_cast<Eigen::Index>(idx.size()));
    const Vector g = f.gradient(zero);
    require(g.allFinite(), "gradient evaluation failed");
    TradeProposal out;
    const double a = backtrack(f, zero, f(zero), g, -g, params);
    Vector masked = a > 0.0 ? Vector(-a * g) : zero;
    out.delta = embed(masked, idx, k);
    out.cost = incremental_cost(c, inventory, out.delta);
    return out;
}

} // namespace riskmarket
