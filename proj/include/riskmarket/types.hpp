#pragma once
#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace riskmarket {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Holdings across the K traded securities (units: shares).
using ShareVector = Vector;
/// State-by-state value of a risky asset (units: cash per share held).
using PayoffVector = Vector;

class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// A run configuration failed validation; the message names the offending field.
class config_error : public error {
public:
    explicit config_error(const std::string& what) : error(what) {}
};

/// A trade proposal was priced against an inventory that has since changed.
class stale_proposal : public error {
public:
    explicit stale_proposal(const std::string& what) : error(what) {}
};

inline void require(bool cond, const std::string& what) {
    if (!cond) throw error(what);
}

} // namespace riskmarket
