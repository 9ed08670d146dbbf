#pragma once
#include <memory>
#include <vector>

#include "riskmarket/pricing.hpp"
#include "riskmarket/risk.hpp"

namespace riskmarket {

enum class AgentMode {
    Exact,        ///< solve the round's portfolio choice to stationarity
    GradientStep, ///< take one backtracked gradient step per round
};

/// One market participant: a risk measure plus a trading mode and the set of
/// securities it is allowed to trade.
struct AgentSpec {
    int id = 0;
    std::shared_ptr<const RiskMeasure> risk;
    AgentMode mode = AgentMode::Exact;
    /// Which securities this agent may trade; empty means all of them.
    std::vector<bool> tradable;

    bool may_trade(int security) const {
        return tradable.empty() || tradable[static_cast<std::size_t>(security)];
    }
};

/// Backtracking line-search knobs (Armijo).
struct BacktrackParams {
    double a0 = 1.0;
    double beta = 0.5;
    double sigma = 1e-4;
    double a_min = 1e-12;
};

struct ExactSolveParams {
    double tol = 1e-10;   ///< stop when the masked gradient norm falls below this
    int max_iter = 500;
    /// Per-trade cap on |delta|_inf. A position can genuinely diverge (e.g.
    /// an agent with zero belief mass on some state against an LMSR); the
    /// cap keeps the engine total and the trade is flagged as clipped.
    double clip = 1e3;
    BacktrackParams bt{};
};

/// What an agent asks the market maker for: the share bundle and the cash it
/// pays, always equal to the incremental cost at the inventory it was priced
/// against.
struct TradeProposal {
    ShareVector delta;
    double cost = 0.0;
    bool clipped = false;
    bool converged = true;
};

/// Rational portfolio selection: minimize, over the masked coordinates,
///   rho(s + delta) + c(Y + delta) - c(Y)
/// the round objective after cash drops out by translation invariance.
/// Damped Newton with analytic derivatives where the measure provides them,
/// falling back to backtracked gradient steps. Requires a convex risk
/// measure.
TradeProposal select_exact(const Portfolio& portfolio, const AgentSpec& agent,
                           const CostFunction& c, const ShareVector& inventory,
                           const SecurityBasis* basis,
                           const ExactSolveParams& params = {});

/// Relaxed agent: one step delta = -a * gradient along the masked
/// coordinates, with a chosen by backtracking so the agent's gross risk
/// strictly decreases. Returns delta = 0 when no a >= a_min improves.
TradeProposal select_gradient_step(const Portfolio& portfolio, const AgentSpec& agent,
                                   const CostFunction& c, const ShareVector& inventory,
                                   const SecurityBasis* basis,
                                   const BacktrackParams& params = {});

} // namespace riskmarket
