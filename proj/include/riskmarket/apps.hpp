#pragma once
#include "riskmarket/config.hpp"
#include "riskmarket/duality.hpp"

namespace riskmarket {

/// Belief-aggregation market: Arrow-Debreu securities, one entropic agent
/// per belief (theta_n is the inverse pooling weight), an LMSR market maker
/// with liquidity theta0. At convergence the price is the biased log pool.
MarketConfig build_opinion_pool_market(const std::vector<Vector>& beliefs,
                                       const std::vector<double>& thetas,
                                       double theta0);

/// Single linear security traded by one Gaussian-belief agent against a
/// quadratic market maker. The equilibrium price is the posterior-mean
/// estimate with prior mean mu0, prior scale sigma0 and pseudo-count
/// 1/theta0; the defaults mu0 = 0, sigma0 = 1 are the ones verified against
/// the closed form below.
MarketConfig build_gaussian_map_market(double mu1, double sigma1, double theta1,
                                       double theta0, double mu0 = 0.0,
                                       double sigma0 = 1.0);

struct GaussianMapSolution {
    double s_star;  ///< equilibrium holdings of the single security
    double mu_map;  ///< posterior-mean estimate, equal to the price at s_star
};

GaussianMapSolution gaussian_map_closed_form(double mu1, double sigma1, double theta1,
                                             double theta0, double mu0 = 0.0,
                                             double sigma0 = 1.0);

/// l2-regularized logistic regression as a market: K single-security agents
/// with risk (lambda/2) s^2 take backtracked gradient steps in turn
/// (coordinate descent), or one agent trades all securities (gradient
/// descent) when `single_agent` is set. The market maker's potential is the
/// mean logistic loss of the dataset.
MarketConfig build_logistic_market(const Dataset& data, double lambda,
                                   bool single_agent = false);
MarketConfig build_logistic_market(DatasetSource source, double lambda,
                                   bool single_agent = false);

/// Mean logistic loss (1/M) sum_m log(1 + exp(-y_m w.x_m)) as a pricing
/// rule. It is used as a plain convex potential here; no claim is made that
/// it satisfies the no-arbitrage axioms of scoring-rule market makers.
class LogisticLossCost final : public CostFunction {
public:
    explicit LogisticLossCost(Dataset data);

    int dim() const override { return data_.num_features(); }
    double cost(const ShareVector& w) const override;
    ShareVector price(const ShareVector& w) const override;
    Matrix hessian(const ShareVector& w) const override;

    const Dataset& data() const { return data_; }

private:
    Dataset data_;
};

/// Independent oracle for the regression market: full-batch gradient descent
/// with backtracking on the regularized logistic objective, run to gradient
/// norm <= tol. Shares no optimizer code with the market path. Tolerances
/// much below 1e-8 sit under the rounding floor of the objective and are
/// not reachable; throws when the target is missed.
Vector reference_logistic_solver(const Dataset& data, double lambda,
                                 double tol = 1e-7, int max_iter = 200000);

/// (1/M) sum_m log(1 + exp(-y_m w.x_m)) + (lambda/2) |w|^2.
double regularized_logistic_objective(const Dataset& data, const Vector& w,
                                      double lambda);

} // namespace riskmarket
