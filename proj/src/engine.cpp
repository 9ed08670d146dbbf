#include "riskmarket/engine.hpp"

#include <algorithm>
#include <cmath>

#include "riskmarket/detail/rng.hpp"

namespace riskmarket {

namespace {

void validate_market(const std::vector<AgentSpec>& agents, const CostFunction& c,
                     const SecurityBasis* basis) {
    require(!agents.empty(), "market needs at least one agent");
    const int k = c.dim();
    if (basis) {
        require(basis->num_securities() == k,
                "basis securities do not match the cost function dimension");
    }
    std::vector<int> ids;
    for (const auto& a : agents) {
        require(static_cast<bool>(a.risk), "agent has no risk measure");
        require(a.tradable.empty() || static_cast<int>(a.tradable.size()) == k,
                "agent tradable mask length does not match the market");
        bool any = a.tradable.empty();
        for (bool b : a.tradable) any = any || b;
        require(any, "agent tradable mask has no true entry");
        if (a.risk->needs_basis())
            require(basis != nullptr,
                    "agent risk measure needs a security basis but none was given");
        ids.push_back(a.id);
    }
    std::sort(ids.begin(), ids.end());
    require(std::adjacent_find(ids.begin(), ids.end()) == ids.end(),
            "agent ids must be unique within a market");
}

// Y is kept equal to the sum of the agents' holdings (fixed agent order), so
// the inventory identity holds exactly rather than up to rounding.
ShareVector summed_inventory(const std::vector<Portfolio>& portfolios, int k) {
    ShareVector y = ShareVector::Zero(k);
    for (const auto& p : portfolios) y += p.shares;
    return y;
}

} // namespace

double global_objective(const MarketState& state, const std::vector<AgentSpec>& agents,
                        const CostFunction& c, const SecurityBasis* basis) {
    double total = c.cost(state.inventory);
    for (std::size_t n = 0; n < agents.size(); ++n)
        total += agents[n].risk->risk(state.portfolios[n].shares, basis);
    return total;
}

MarketState apply_trade(const MarketState& state, const TradeProposal& proposal,
                        int agent_id, const std::vector<AgentSpec>& agents,
                        const CostFunction& c, const SecurityBasis* basis) {
    require(agent_id >= 0 && agent_id < static_cast<int>(state.portfolios.size()),
            "agent id out of range");
    require(proposal.delta.size() == state.inventory.size(),
            "trade dimension does not match the market");
    const double repriced = incremental_cost(c, state.inventory, proposal.delta);
    if (std::abs(repriced - proposal.cost) >
        1e-12 * std::max(1.0, std::abs(repriced))) {
        throw stale_proposal(
            "proposal cost does not price its delta against the current inventory");
    }
    MarketState next = state;
    next.t = state.t + 1;
    auto& mine = next.portfolios[static_cast<std::size_t>(agent_id)];
    mine.shares += proposal.delta;
    mine.cash -= proposal.cost;
    next.inventory = summed_inventory(next.portfolios,
                                      static_cast<int>(state.inventory.size()));
    next.objective = global_objective(next, agents, c, basis);
    return next;
}

bool check_convergence(std::span<const TradeRecord> trace, double eps, int window) {
    require(window >= 1, "convergence window must be >= 1");
    if (static_cast<int>(trace.size()) < window) return false;
    for (std::size_t i = trace.size() - static_cast<std::size_t>(window);
         i < trace.size(); ++i) {
        // a skipped round (failed solve) is not evidence of stationarity
        if (!trace[i].solver_ok) return false;
        if (trace[i].delta.lpNorm<Eigen::Infinity>() >= eps) return false;
    }
    return true;
}

MarketRun run_market(const std::vector<AgentSpec>& agents, const CostFunction& c,
                     const SecurityBasis* basis, const QueuePolicy& queue,
                     const StopRule& stop, const EngineParams& params) {
    validate_market(agents, c, basis);
    const int k = c.dim();
    const int n = static_cast<int>(agents.size());
    const int window = stop.window > 0 ? stop.window : n;
    require(window >= n, "convergence window must cover every agent");
    const int max_rounds = stop.max_rounds > 0 ? stop.max_rounds : 1000 * n;
    require(stop.eps > 0.0, "stop rule eps must be > 0");

    MarketRun out;
    out.state.t = 0;
    out.state.portfolios.assign(static_cast<std::size_t>(n),
                                Portfolio{params.initial_cash, ShareVector::Zero(k)});
    out.state.inventory = ShareVector::Zero(k);
    out.state.objective = global_objective(out.state, agents, c, basis);
    out.trace.reserve(static_cast<std::size_t>(std::min(max_rounds, 1 << 20)));

    detail::SplitMix64 pick_rng(queue.seed ^ 0x715eedULL);
    for (int t = 1; t <= max_rounds; ++t) {
        const int who = queue.kind == QueueKind::RoundRobin
                            ? (t - 1) % n
                            : static_cast<int>(pick_rng.below(static_cast<std::uint64_t>(n)));
        const AgentSpec& agent = agents[static_cast<std::size_t>(who)];
        const Portfolio& mine = out.state.portfolios[static_cast<std::size_t>(who)];

        TradeRecord rec;
        rec.t = t;
        rec.agent_id = agent.id;
        try {
            TradeProposal proposal =
                agent.mode == AgentMode::Exact
                    ? select_exact(mine, agent, c, out.state.inventory, basis,
                                   params.select)
                    : select_gradient_step(mine, agent, c, out.state.inventory, basis,
                                           params.backtrack);
            out.state = apply_trade(out.state, proposal, who, agents, c, basis);
            rec.delta = std::move(proposal.delta);
            rec.cost_paid = proposal.cost;
            rec.clipped = proposal.clipped;
            rec.solver_ok = proposal.converged;
        } catch (const error&) {
            // solver failure: record a skipped round, market state unchanged
            rec.delta = ShareVector::Zero(k);
            rec.cost_paid = 0.0;
            rec.solver_ok = false;
            out.state.t = t;
        }
        rec.objective_after = out.state.objective;
        rec.price_after = c.price(out.state.inventory);
        out.trace.push_back(std::move(rec));

        if (check_convergence(out.trace, stop.eps, window)) {
            out.state.converged = true;
            break;
        }
    }
    return out;
}

} // namespace riskmarket
