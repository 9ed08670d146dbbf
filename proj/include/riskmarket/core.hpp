#pragma once
#include <string>
#include <vector>

#include "riskmarket/types.hpp"

namespace riskmarket {

/// Finite, ordered space of future states. Labels are unique.
struct OutcomeSpace {
    std::vector<std::string> states;

    static OutcomeSpace labeled(std::vector<std::string> labels);
    /// States named "0", "1", ..., "n-1".
    static OutcomeSpace indexed(int n);

    int size() const { return static_cast<int>(states.size()); }
};

inline constexpr double kDefaultRankTol = 1e-10;

/// True iff the K x |Omega| payoff matrix has full row rank, judged by
/// singular values above `rel_tol` times the largest one.
bool verify_basis(const Matrix& payoff_matrix, double rel_tol = kDefaultRankTol);

/// K linearly independent securities over a finite outcome space. Row k of
/// the payoff matrix holds the payout of one share of security k in each
/// state (units: cash per share).
class SecurityBasis {
public:
    /// Throws if K > |Omega|, entries are non-finite, or the rows are
    /// linearly dependent under `rel_tol` (relative singular-value cutoff).
    explicit SecurityBasis(Matrix payoff_matrix, double rel_tol = kDefaultRankTol);

    /// Identity basis: security k pays one unit iff state k occurs.
    static SecurityBasis arrow_debreu(int n);

    int num_securities() const { return static_cast<int>(payoffs_.rows()); }
    int num_states() const { return static_cast<int>(payoffs_.cols()); }
    const Matrix& payoff_matrix() const { return payoffs_; }

private:
    Matrix payoffs_;
};

/// X(w) = sum_k s_k xi_k(w): the payoff of the risky asset implied by the
/// holdings `shares`.
PayoffVector asset_payoff(const ShareVector& shares, const SecurityBasis& basis);

/// Inverse of asset_payoff for a full-rank basis (least squares). The map
/// between share vectors and payoffs is a bijection, so this recovers the
/// unique holdings that produce `payoff`.
ShareVector recover_shares(const PayoffVector& payoff, const SecurityBasis& basis);

/// Cash w plus holdings s; the gross asset is w + s.xi.
struct Portfolio {
    double cash = 0.0;
    ShareVector shares;
};

} // namespace riskmarket
