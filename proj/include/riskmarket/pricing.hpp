#pragma once
#include <functional>

#include "riskmarket/oracle.hpp"
#include "riskmarket/risk.hpp"
#include "riskmarket/types.hpp"

namespace riskmarket {

/// Path-independent market-maker pricing rule: a convex potential c over the
/// outstanding inventory. A trade of delta shares against inventory Y costs
/// c(Y + delta) - c(Y); the instantaneous price vector is the gradient of c,
/// the only definition consistent with duality-based pricing.
///
/// Cost functions are immutable and evaluation is pure.
class CostFunction {
public:
    virtual ~CostFunction() = default;

    virtual int dim() const = 0;
    virtual double cost(const ShareVector& inventory) const = 0;

    /// Gradient of `cost`. Central differences with h = 1e-6 * (1 + |y_k|)
    /// unless a subclass supplies the analytic form.
    virtual ShareVector price(const ShareVector& inventory) const;

    /// Hessian of `cost` (finite differences of `price` unless overridden).
    virtual Matrix hessian(const ShareVector& inventory) const;

protected:
    void check_dim(const ShareVector& y) const;
};

/// Logarithmic market scoring rule: c(Y) = (1/theta0) log sum_k e^{theta0 Y_k},
/// computed with max-subtraction. Prices are softmax(theta0 Y) and form a
/// probability vector.
class LMSRCost final : public CostFunction {
public:
    LMSRCost(double theta0, int num_securities);

    int dim() const override { return k_; }
    double cost(const ShareVector& y) const override;
    ShareVector price(const ShareVector& y) const override;
    Matrix hessian(const ShareVector& y) const override;

    double theta0() const { return theta0_; }

private:
    double theta0_;
    int k_;
};

/// Quadratic market scoring rule: c(Y) = (theta0/2) |Y|^2, optionally with a
/// linear term b.Y (a market maker whose prior price at empty inventory is b
/// rather than zero).
class QuadraticCost final : public CostFunction {
public:
    explicit QuadraticCost(double theta0, int num_securities = 1);
    QuadraticCost(double theta0, Vector linear);

    int dim() const override { return k_; }
    double cost(const ShareVector& y) const override;
    ShareVector price(const ShareVector& y) const override;
    Matrix hessian(const ShareVector& y) const override;

    double theta0() const { return theta0_; }
    const Vector& linear() const { return linear_; }

private:
    double theta0_;
    int k_;
    Vector linear_;
};

/// Arbitrary user-supplied convex potential. Prices fall back to numeric
/// differentiation when no gradient is given.
class FunctionalCost final : public CostFunction {
public:
    FunctionalCost(int dim, std::function<double(const ShareVector&)> cost_fn,
                   std::function<ShareVector(const ShareVector&)> grad_fn = nullptr);

    int dim() const override { return k_; }
    double cost(const ShareVector& y) const override;
    ShareVector price(const ShareVector& y) const override;

private:
    int k_;
    std::function<double(const ShareVector&)> cost_fn_;
    std::function<ShareVector(const ShareVector&)> grad_fn_;
};

/// Price of buying `delta` on top of inventory `before`:
/// cost(before + delta) - cost(before).
double incremental_cost(const CostFunction& c, const ShareVector& before,
                        const ShareVector& delta);

/// Numeric duality-based pricing rule: c(Y) = sup_Q (E_Q[Y] - R(Q)) over the
/// probability simplex (the conjugate of the penalty R). Same machinery as
/// penalty_risk_oracle with the sign of the linear term flipped. Desk scale
/// only (dim <= 8).
OracleResult duality_based_cost_oracle(const PenaltyFunctional& R, const ShareVector& Y,
                                       double tol = 1e-6, std::uint64_t seed = 0x5eedULL);

} // namespace riskmarket
