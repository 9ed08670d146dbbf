#pragma once
#include <functional>
#include <vector>

#include "riskmarket/agent.hpp"
#include "riskmarket/oracle.hpp"

namespace riskmarket {

/// The machine-learning side of the bridge: minimize F_0 + ... + F_N over a
/// shared domain (the probability simplex, or a Euclidean parameter space
/// for share-space markets). F_0 comes from the market maker's pricing rule
/// and F_n from agent n's penalty functional. F_0 carries the exact
/// conjugate of the cost function, constants included, so that minus the
/// market optimum equals the primal optimum when strong duality holds.
struct PrimalProblem {
    enum class Domain { Simplex, Euclidean };

    Domain domain = Domain::Simplex;
    int dim = 0;
    std::vector<std::function<double(const Vector&)>> components;

    double value(const Vector& p) const;
};

/// Domain over which a Fenchel transform oracle searches.
struct FenchelDomain {
    enum class Kind { Simplex, Box };

    Kind kind = Kind::Simplex;
    int dim = 0;
    Vector lower, upper; // box bounds

    static FenchelDomain simplex(int dim);
    static FenchelDomain box(Vector lower, Vector upper);
};

/// Numeric Legendre-Fenchel transform: sup_P (<x,P> - F(P)) over the given
/// domain, to the stated tolerance. Desk scale only. `grad` may be null.
OracleResult fenchel_transform_oracle(const std::function<double(const Vector&)>& F,
                                      const std::function<Vector(const Vector&)>* grad,
                                      const Vector& x, const FenchelDomain& domain,
                                      double tol = 1e-6, std::uint64_t seed = 0x5eedULL);

/// Read the primal problem off a market: LMSR cost with entropic agents
/// gives the weighted-KL pooling objective over the simplex; quadratic cost
/// with quadratic-risk agents gives the Gaussian MAP objective. Throws on any
/// other family.
PrimalProblem dual_objective_from_market(const std::vector<AgentSpec>& agents,
                                         const CostFunction& c);

/// Closed-form logarithmic opinion pool: the normalized geometric mixture
/// with exponents w_n / (1/theta0 + sum w_n), w_n = 1/theta_n; the uniform
/// market-maker belief carries the leftover exponent, which is what biases
/// the pool toward uniform. Pass theta0 = +infinity for the unbiased pool.
Vector analytic_log_pool(const std::vector<Vector>& beliefs,
                         const std::vector<double>& thetas, double theta0);

/// gap = sum_n F_n(P_candidate) - (-market_L). Weak duality bounds it below
/// by zero (up to numerics); it closes at the primal optimum under strong
/// duality.
double weak_duality_check(double market_L, const PrimalProblem& primal,
                          const Vector& p_candidate);

} // namespace riskmarket
