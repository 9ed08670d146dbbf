#pragma once
#include <cstdint>
#include <span>
#include <vector>

#include "riskmarket/agent.hpp"

namespace riskmarket {

enum class QueueKind { RoundRobin, UniformRandom };

/// How the market maker picks the one agent a_t that trades each round.
struct QueuePolicy {
    QueueKind kind = QueueKind::RoundRobin;
    std::uint64_t seed = 0;
};

struct StopRule {
    int max_rounds = 0;  ///< 0 means 1000 * number of agents
    double eps = 1e-8;   ///< convergence threshold on |delta|_inf
    int window = 0;      ///< trades inspected; 0 means number of agents
};

/// Everything about the market at the end of round t.
struct MarketState {
    int t = 0;
    ShareVector inventory; ///< Y = sum of all agents' shares, maintained exactly
    std::vector<Portfolio> portfolios;
    double objective = 0.0; ///< L = c(Y) + sum_n rho_n(X_n)
    bool converged = false;
};

struct TradeRecord {
    int t = 0;
    int agent_id = 0;
    ShareVector delta;
    double cost_paid = 0.0;
    double objective_after = 0.0;
    ShareVector price_after;
    bool clipped = false;
    bool solver_ok = true;
};

struct MarketRun {
    std::vector<TradeRecord> trace;
    MarketState state;
};

struct EngineParams {
    ExactSolveParams select{};
    BacktrackParams backtrack{};
    double initial_cash = 0.0;
};

/// L = c(Y) + sum_n rho_n(X_n): the global objective the trading dynamics
/// minimizes.
double global_objective(const MarketState& state, const std::vector<AgentSpec>& agents,
                        const CostFunction& c, const SecurityBasis* basis);

/// Apply one trade: the trading agent pays the proposal's cost and receives
/// its shares; nobody else's portfolio changes; the round counter advances.
/// Throws stale_proposal when the proposal's cost does not price `delta`
/// against the state's current inventory.
MarketState apply_trade(const MarketState& state, const TradeProposal& proposal,
                        int agent_id, const std::vector<AgentSpec>& agents,
                        const CostFunction& c, const SecurityBasis* basis);

/// True iff the trace has at least `window` trades and every one of the last
/// `window` has |delta|_inf below eps. Rounds skipped because the solver
/// failed do not count as evidence.
bool check_convergence(std::span<const TradeRecord> trace, double eps, int window);

/// The multi-period market loop: each round the scheduled agent proposes a
/// trade against the current inventory and the trade is applied. Proposals
/// are pure functions of the round-start state and are recomputed every
/// round, so one Select per round is enough: the schedule never consults the
/// proposals of agents that are not trading. Stops on convergence or after
/// max_rounds. Solver failures are recorded and the round is skipped.
MarketRun run_market(const std::vector<AgentSpec>& agents, const CostFunction& c,
                     const SecurityBasis* basis, const QueuePolicy& queue = {},
                     const StopRule& stop = {}, const EngineParams& params = {});

} // namespace riskmarket
