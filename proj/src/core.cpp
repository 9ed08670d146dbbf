#include "riskmarket/core.hpp"

#include <Eigen/SVD>
#include <set>

namespace riskmarket {

OutcomeSpace OutcomeSpace::labeled(std::vector<std::string> labels) {
    require(!labels.empty(), "outcome space needs at least one state");
    std::set<std::string> seen(labels.begin(), labels.end());
    require(seen.size() == labels.size(), "outcome space labels must be unique");
    return OutcomeSpace{std::move(labels)};
}

OutcomeSpace OutcomeSpace::indexed(int n) {
    require(n >= 1, "outcome space needs at least one state");
    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) labels.push_back(std::to_string(i));
    return OutcomeSpace{std::move(labels)};
}

bool verify_basis(const Matrix& payoff_matrix, double rel_tol) {
    if (payoff_matrix.rows() < 1 || payoff_matrix.cols() < 1) return false;
    if (payoff_matrix.rows() > payoff_matrix.cols()) return false;
    if (!payoff_matrix.allFinite()) return false;
    Eigen::JacobiSVD<Matrix> svd(payoff_matrix);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) <= 0.0) return false;
    return sv(sv.size() - 1) > rel_tol * sv(0);
}

SecurityBasis::SecurityBasis(Matrix payoff_matrix, double rel_tol)
    : payoffs_(std::move(payoff_matrix)) {
    require(payoffs_.rows() >= 1, "basis needs at least one security");
    require(payoffs_.rows() <= payoffs_.cols(),
            "cannot have more securities than states (K <= |Omega|)");
    require(payoffs_.allFinite(), "basis payoffs must be finite");
    require(verify_basis(payoffs_, rel_tol), "securities must be linearly independent");
}

SecurityBasis SecurityBasis::arrow_debreu(int n) {
    require(n >= 1, "basis needs at least one security");
    return SecurityBasis(Matrix::Identity(n, n));
}

PayoffVector asset_payoff(const ShareVector& shares, const SecurityBasis& basis) {
    require(shares.size() == basis.num_securities(),
            "share vector length does not match the number of securities");
    require(shares.allFinite(), "share vector must be finite");
    return basis.payoff_matrix().transpose() * shares;
}

ShareVector recover_shares(const PayoffVector& payoff, const SecurityBasis& basis) {
    require(payoff.size() == basis.num_states(),
            "payoff vector length does not match the number of states");
    const Matrix bt = basis.payoff_matrix().transpose();
    return bt.colPivHouseholderQr().solve(payoff);
}

} // namespace riskmarket
