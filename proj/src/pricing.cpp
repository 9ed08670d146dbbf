#include "riskmarket/pricing.hpp"

#include <cmath>

#include "riskmarket/detail/simplex_opt.hpp"

namespace riskmarket {

void CostFunction::check_dim(const ShareVector& y) const {
    require(static_cast<int>(y.size()) == dim(),
            "inventory length does not match the number of securities");
    require(y.allFinite(), "inventory must be finite");
}

ShareVector CostFunction::price(const ShareVector& inventory) const {
    check_dim(inventory);
    const int k = dim();
    ShareVector g(k);
    ShareVector p = inventory;
    for (int i = 0; i < k; ++i) {
        const double h = 1e-6 * (1.0 + std::abs(inventory(i)));
        const double yi = inventory(i);
        p(i) = yi + h;
        const double fp = cost(p);
        p(i) = yi - h;
        const double fm = cost(p);
        p(i) = yi;
        g(i) = (fp - fm) / (2.0 * h);
    }
    return g;
}

Matrix CostFunction::hessian(const ShareVector& inventory) const {
    check_dim(inventory);
    const int k = dim();
    Matrix h(k, k);
    ShareVector p = inventory;
    for (int i = 0; i < k; ++i) {
        const double step = 1e-5 * (1.0 + std::abs(inventory(i)));
        const double yi = inventory(i);
        p(i) = yi + step;
        const ShareVector gp = price(p);
        p(i) = yi - step;
        const ShareVector gm = price(p);
        p(i) = yi;
        h.col(i) = (gp - gm) / (2.0 * step);
    }
    return 0.5 * (h + h.transpose());
}

LMSRCost::LMSRCost(double theta0, int num_securities)
    : theta0_(theta0), k_(num_securities) {
    require(theta0_ > 0.0, "LMSR liquidity theta0 must be > 0");
    require(k_ >= 1, "LMSR needs at least one security");
}

double LMSRCost::cost(const ShareVector& y) const {
    check_dim(y);
    const double m = theta0_ * y.maxCoeff();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) acc += std::exp(theta0_ * y(i) - m);
    return (m + std::log(acc)) / theta0_;
}

ShareVector LMSRCost::price(const ShareVector& y) const {
    check_dim(y);
    const double m = theta0_ * y.maxCoeff();
    ShareVector p(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) p(i) = std::exp(theta0_ * y(i) - m);
    return p / p.sum();
}

Matrix LMSRCost::hessian(const ShareVector& y) const {
    const ShareVector p = price(y);
    return theta0_ * (Matrix(p.asDiagonal()) - p * p.transpose());
}

QuadraticCost::QuadraticCost(double theta0, int num_securities)
    : QuadraticCost(theta0, Vector::Zero(num_securities)) {}

QuadraticCost::QuadraticCost(double theta0, Vector linear)
    : theta0_(theta0), k_(static_cast<int>(linear.size())), linear_(std::move(linear)) {
    require(theta0_ > 0.0, "quadratic cost theta0 must be > 0");
    require(k_ >= 1, "quadratic cost needs at least one security");
    require(linear_.allFinite(), "quadratic cost linear term must be finite");
}

double QuadraticCost::cost(const ShareVector& y) const {
    check_dim(y);
    return linear_.dot(y) + 0.5 * theta0_ * y.squaredNorm();
}

ShareVector QuadraticCost::price(const ShareVector& y) const {
    check_dim(y);
    return linear_ + theta0_ * y;
}

Matrix QuadraticCost::hessian(const ShareVector& y) const {
    return theta0_ * Matrix::Identity(y.size(), y.size());
}

FunctionalCost::FunctionalCost(int dim, std::function<double(const ShareVector&)> cost_fn,
                               std::function<ShareVector(const ShareVector&)> grad_fn)
    : k_(dim), cost_fn_(std::move(cost_fn)), grad_fn_(std::move(grad_fn)) {
    require(k_ >= 1, "cost function needs at least one security");
    require(static_cast<bool>(cost_fn_), "cost function body must be callable");
}

double FunctionalCost::cost(const ShareVector& y) const {
    check_dim(y);
    return cost_fn_(y);
}

ShareVector FunctionalCost::price(const ShareVector& y) const {
    if (grad_fn_) {
        check_dim(y);
        return grad_fn_(y);
    }
    return CostFunction::price(y);
}

double incremental_cost(const CostFunction& c, const ShareVector& before,
                        const ShareVector& delta) {
    require(before.size() == delta.size(), "inventory and trade dimensions differ");
    return c.cost(before + delta) - c.cost(before);
}

OracleResult duality_based_cost_oracle(const PenaltyFunctional& R, const ShareVector& Y,
                                       double tol, std::uint64_t seed) {
    require(R.dim >= 1 && R.dim <= 8, "duality-based cost oracle is desk scale (dim <= 8)");
    require(Y.size() == R.dim, "inventory length does not match penalty dimension");
    require(Y.allFinite(), "inventory must be finite");
    const detail::GradFn grad = R.alpha_gradient;
    return detail::maximize_linear_minus_over_simplex(
        Y, R.alpha, R.has_gradient() ? &grad : nullptr, tol, seed);
}

} // namespace riskmarket
