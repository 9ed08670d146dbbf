#pragma once
#include <functional>
#include <memory>

#include "riskmarket/core.hpp"
#include "riskmarket/oracle.hpp"

namespace riskmarket {

/// A monetary risk measure rho: the agent preference functional is f = -rho.
/// Every implementation is translation invariant and monotone (exercised by
/// the property tests); convex measures additionally reward diversification.
///
/// Measures are immutable after construction and evaluation is pure, so they
/// can be shared between threads freely.
class RiskMeasure {
public:
    virtual ~RiskMeasure() = default;

    /// Risk of the risky asset implied by holding `shares`. Measures scored
    /// state-by-state need `basis` to map shares into payoffs; measures
    /// defined directly on share space ignore it (and accept nullptr).
    virtual double risk(const ShareVector& shares, const SecurityBasis* basis) const = 0;

    /// Gradient with respect to shares. Central differences unless a
    /// subclass provides the analytic form.
    virtual ShareVector risk_gradient(const ShareVector& shares,
                                      const SecurityBasis* basis) const;

    /// Hessian with respect to shares (finite differences of the gradient
    /// unless overridden). Only exact-mode agents need it.
    virtual Matrix risk_hessian(const ShareVector& shares,
                                const SecurityBasis* basis) const;

    virtual bool convex() const = 0;
    virtual bool needs_basis() const = 0;
};

/// Risk measures evaluated on the payoff vector x = B^T s over a finite
/// outcome space.
class PayoffRiskMeasure : public RiskMeasure {
public:
    virtual double payoff_risk(const PayoffVector& x) const = 0;

    double risk(const ShareVector& shares, const SecurityBasis* basis) const final;
    bool needs_basis() const final { return true; }
};

/// rho(X) = (1/theta) log E_P[exp(-theta X)]. Computed with max-subtraction
/// since theta*x can overflow the exponential.
class EntropicRisk final : public PayoffRiskMeasure {
public:
    EntropicRisk(double theta, Vector belief);

    double payoff_risk(const PayoffVector& x) const override;
    ShareVector risk_gradient(const ShareVector&, const SecurityBasis*) const override;
    Matrix risk_hessian(const ShareVector&, const SecurityBasis*) const override;
    bool convex() const override { return true; }

    /// The exponentially reweighted belief P(w) exp(-theta x(w)) / Z; this is
    /// the maximizer of the measure's dual representation at x.
    Vector tilted_belief(const PayoffVector& x) const;

    double theta() const { return theta_; }
    const Vector& belief() const { return belief_; }

private:
    double theta_;
    Vector belief_;
};

/// Value at Risk at level alpha: the smallest attained loss threshold l with
/// P(-X > l) <= 1 - alpha. This is the discrete empirical quantile of the
/// loss; VaR is not convex.
class VaRRisk final : public PayoffRiskMeasure {
public:
    VaRRisk(double alpha, Vector belief);

    double payoff_risk(const PayoffVector& x) const override;
    bool convex() const override { return false; }

    double alpha() const { return alpha_; }
    const Vector& belief() const { return belief_; }

private:
    double alpha_;
    Vector belief_;
};

/// rho(s) = -mu.s + (scale/2) |s|^2, defined directly on share space. This
/// is the closed form of entropic risk under a Gaussian belief on a single
/// linear security (mu the believed mean, scale = sigma^2 theta), and with
/// mu = 0 the plain l2 penalty agent. No outcome enumeration is involved.
class QuadraticRisk final : public RiskMeasure {
public:
    QuadraticRisk(Vector mu, double scale);
    QuadraticRisk(double mu, double scale);

    double risk(const ShareVector& shares, const SecurityBasis*) const override;
    ShareVector risk_gradient(const ShareVector&, const SecurityBasis*) const override;
    Matrix risk_hessian(const ShareVector&, const SecurityBasis*) const override;
    bool convex() const override { return true; }
    bool needs_basis() const override { return false; }

    const Vector& mu() const { return mu_; }
    double scale() const { return scale_; }

private:
    Vector mu_;
    double scale_;
};

double entropic_risk(const PayoffVector& x, const EntropicRisk& m);
double var_risk(const PayoffVector& x, const VaRRisk& m);
double quadratic_risk(const ShareVector& s, const QuadraticRisk& m);

/// Risk of a gross asset: rho(X + w) = rho(X) - w.
double gross_risk(double cash, const PayoffVector& x, const PayoffRiskMeasure& m);
double gross_risk(const Portfolio& portfolio, const RiskMeasure& m,
                  const SecurityBasis* basis);

/// Penalty functional alpha(Q) over candidate beliefs on the simplex. A
/// convex risk measure is rho(X) = sup_Q (E_Q[-X] - alpha(Q)); alpha must be
/// bounded below on the simplex and evaluable in a small nonnegative
/// neighborhood of it when no gradient is supplied.
struct PenaltyFunctional {
    int dim = 0;
    std::function<double(const Vector&)> alpha;
    std::function<Vector(const Vector&)> alpha_gradient; // optional

    bool has_gradient() const { return static_cast<bool>(alpha_gradient); }
};

/// alpha(Q) = (1/theta) KL(Q || belief): the penalty whose risk measure is
/// the entropic one. Belief must be strictly positive.
PenaltyFunctional kl_penalty(double theta, const Vector& belief);

/// Brute-force dual representation sup_Q (E_Q[-x] - alpha(Q)) over the
/// probability simplex, by dense grid seeding plus multi-start projected
/// gradient ascent. Desk scale only (|Omega| <= 8); `converged` is false
/// when the stationarity check failed, with the best value still reported.
OracleResult penalty_risk_oracle(const PayoffVector& x, const PenaltyFunctional& pen,
                                 double tol = 1e-4, std::uint64_t seed = 0x5eedULL);

} // namespace riskmarket
