#include "riskmarket/risk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "riskmarket/detail/simplex_opt.hpp"

namespace riskmarket {

namespace {

void check_belief(const Vector& belief) {
    require(belief.size() >= 1, "belief must have at least one state");
    require(belief.allFinite(), "belief must be finite");
    require(belief.minCoeff() >= 0.0, "belief entries must be nonnegative");
    require(std::abs(belief.sum() - 1.0) <= 1e-12, "belief must sum to 1");
}

} // namespace

ShareVector RiskMeasure::risk_gradient(const ShareVector& shares,
                                       const SecurityBasis* basis) const {
    const int k = static_cast<int>(shares.size());
    ShareVector g(k);
    ShareVector p = shares;
    for (int i = 0; i < k; ++i) {
        const double h = 1e-6 * (1.0 + std::abs(shares(i)));
        const double si = shares(i);
        p(i) = si + h;
        const double fp = risk(p, basis);
        p(i) = si - h;
        const double fm = risk(p, basis);
        p(i) = si;
        g(i) = (fp - fm) / (2.0 * h);
    }
    return g;
}

Matrix RiskMeasure::risk_hessian(const ShareVector& shares,
                                 const SecurityBasis* basis) const {
    const int k = static_cast<int>(shares.size());
    Matrix h(k, k);
    ShareVector p = shares;
    for (int i = 0; i < k; ++i) {
        const double step = 1e-5 * (1.0 + std::abs(shares(i)));
        const double si = shares(i);
        p(i) = si + step;
        const ShareVector gp = risk_gradient(p, basis);
        p(i) = si - step;
        const ShareVector gm = risk_gradient(p, basis);
        p(i) = si;
        h.col(i) = (gp - gm) / (2.0 * step);
    }
    return 0.5 * (h + h.transpose());
}

double PayoffRiskMeasure::risk(const ShareVector& shares,
                               const SecurityBasis* basis) const {
    require(basis != nullptr, "this risk measure needs a security basis");
    return payoff_risk(asset_payoff(shares, *basis));
}

EntropicRisk::EntropicRisk(double theta, Vector belief)
    : theta_(theta), belief_(std::move(belief)) {
    require(theta_ > 0.0, "entropic risk coefficient theta must be > 0");
    check_belief(belief_);
    require(belief_.maxCoeff() > 0.0, "belief cannot be zero everywhere");
}

double EntropicRisk::payoff_risk(const PayoffVector& x) const {
    require(x.size() == belief_.size(), "payoff length does not match belief");
    require(x.allFinite(), "payoff must be finite");
    // (1/theta) log sum_w P(w) exp(-theta x(w)), max-subtracted.
    double m = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (belief_(i) > 0.0) m = std::max(m, -theta_ * x(i));
    }
    double acc = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (belief_(i) > 0.0) acc += belief_(i) * std::exp(-theta_ * x(i) - m);
    }
    return (m + std::log(acc)) / theta_;
}

Vector EntropicRisk::tilted_belief(const PayoffVector& x) const {
    require(x.size() == belief_.size(), "payoff length does not match belief");
    double m = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (belief_(i) > 0.0) m = std::max(m, -theta_ * x(i));
    }
    Vector g = Vector::Zero(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (belief_(i) > 0.0) g(i) = belief_(i) * std::exp(-theta_ * x(i) - m);
    }
    return g / g.sum();
}

ShareVector EntropicRisk::risk_gradient(const ShareVector& shares,
                                        const SecurityBasis* basis) const {
    require(basis != nullptr, "entropic risk needs a security basis");
    const Vector g = tilted_belief(asset_payoff(shares, *basis));
    return -(basis->payoff_matrix() * g);
}

Matrix EntropicRisk::risk_hessian(const ShareVector& shares,
                                  const SecurityBasis* basis) const {
    require(basis != nullptr, "entropic risk needs a security basis");
    const Vector g = tilted_belief(asset_payoff(shares, *basis));
    const Matrix& b = basis->payoff_matrix();
    const Matrix middle = g.asDiagonal().toDenseMatrix() - g * g.transpose();
    return theta_ * b * middle * b.transpose();
}

VaRRisk::VaRRisk(double alpha, Vector belief)
    : alpha_(alpha), belief_(std::move(belief)) {
    require(alpha_ > 0.0 && alpha_ < 1.0, "VaR level alpha must lie in (0,1)");
    check_belief(belief_);
}

double VaRRisk::payoff_risk(const PayoffVector& x) const {
    require(x.size() == belief_.size(), "payoff length does not match belief");
    require(x.allFinite(), "payoff must be finite");
    // Candidate thresholds are the attained losses -x; return the smallest
    // one with P(-X > l) <= 1 - alpha. The largest attained loss always
    // qualifies (tail mass zero), so the scan cannot fall through.
    const std::size_t n = static_cast<std::size_t>(x.size());
    std::vector<std::pair<double, double>> losses(n); // (-x, prob), ascending
    for (std::size_t i = 0; i < n; ++i) losses[i] = {-x(static_cast<Eigen::Index>(i)),
                                                     belief_(static_cast<Eigen::Index>(i))};
    std::sort(losses.begin(), losses.end());
    std::vector<double> suffix(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] + losses[i].second;
    const double budget = 1.0 - alpha_;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && losses[j].first == losses[i].first) ++j;
        if (suffix[j] <= budget) return losses[i].first;
        i = j;
    }
    return losses.back().first;
}

QuadraticRisk::QuadraticRisk(Vector mu, double scale)
    : mu_(std::move(mu)), scale_(scale) {
    require(mu_.size() >= 1 && mu_.allFinite(), "mu must be a finite vector");
    require(scale_ >= 0.0, "scale must be >= 0");
}

QuadraticRisk::QuadraticRisk(double mu, double scale)
    : QuadraticRisk(Vector::Constant(1, mu), scale) {}

double QuadraticRisk::risk(const ShareVector& shares, const SecurityBasis*) const {
    require(shares.size() == mu_.size(), "share vector length does not match mu");
    return -mu_.dot(shares) + 0.5 * scale_ * shares.squaredNorm();
}

ShareVector QuadraticRisk::risk_gradient(const ShareVector& shares,
                                         const SecurityBasis*) const {
    return -mu_ + scale_ * shares;
}

Matrix QuadraticRisk::risk_hessian(const ShareVector& shares, const SecurityBasis*) const {
    return scale_ * Matrix::Identity(shares.size(), shares.size());
}

double entropic_risk(const PayoffVector& x, const EntropicRisk& m) {
    return m.payoff_risk(x);
}

double var_risk(const PayoffVector& x, const VaRRisk& m) { return m.payoff_risk(x); }

double quadratic_risk(const ShareVector& s, const QuadraticRisk& m) {
    return m.risk(s, nullptr);
}

double gross_risk(double cash, const PayoffVector& x, const PayoffRiskMeasure& m) {
    return m.payoff_risk(x) - cash;
}

double gross_risk(const Portfolio& portfolio, const RiskMeasure& m,
                  const SecurityBasis* basis) {
    return m.risk(portfolio.shares, basis) - portfolio.cash;
}

PenaltyFunctional kl_penalty(double theta, const Vector& belief) {
    require(theta > 0.0, "KL penalty needs theta > 0");
    check_belief(belief);
    require(belief.minCoeff() > 0.0, "KL penalty needs a strictly positive belief");
    PenaltyFunctional pen;
    pen.dim = static_cast<int>(belief.size());
    pen.alpha = [theta, belief](const Vector& q) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < q.size(); ++i) {
            if (q(i) > 0.0) acc += q(i) * std::log(q(i) / belief(i));
        }
        return acc / theta;
    };
    pen.alpha_gradient = [theta, belief](const Vector& q) -> Vector {
        Vector g(q.size());
        for (Eigen::Index i = 0; i < q.size(); ++i) {
            const double qi = std::max(q(i), 1e-300);
            g(i) = (std::log(qi / belief(i)) + 1.0) / theta;
        }
        return g;
    };
    return pen;
}

OracleResult penalty_risk_oracle(const PayoffVector& x, const PenaltyFunctional& pen,
                                 double tol, std::uint64_t seed) {
    require(pen.dim >= 1 && pen.dim <= 8, "penalty oracle is desk scale (dim <= 8)");
    require(x.size() == pen.dim, "payoff length does not match penalty dimension");
    require(x.allFinite(), "payoff must be finite");
    const detail::GradFn grad = pen.alpha_gradient;
    return detail::maximize_linear_minus_over_simplex(
        -x, pen.alpha, pen.has_gradient() ? &grad : nullptr, tol, seed);
}

} // namespace riskmarket
