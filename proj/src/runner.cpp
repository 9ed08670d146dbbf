#include "riskmarket/runner.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "riskmarket/apps.hpp"
#include "riskmarket/detail/rng.hpp"

namespace riskmarket {

namespace {

// 17 significant digits round-trip doubles exactly.
std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

RunOutput run_config(const MarketConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    MaterializedMarket market = materialize(config);
    RunOutput out;
    out.num_securities = market.num_securities;
    out.run = run_market(market.agents, *market.cost, market.basis_ptr(), market.queue,
                         market.stop, market.params);

    RunSummary& summary = out.summary;
    summary.rounds = out.run.state.t;
    summary.converged = out.run.state.converged;
    summary.final_objective = out.run.state.objective;
    summary.final_price = market.cost->price(out.run.state.inventory);
    summary.avg_price = Vector::Zero(market.num_securities);
    for (const auto& rec : out.run.trace) summary.avg_price += rec.price_after;
    if (!out.run.trace.empty())
        summary.avg_price /= static_cast<double>(out.run.trace.size());

    std::optional<PrimalProblem> primal;
    try {
        primal = dual_objective_from_market(market.agents, *market.cost);
    } catch (const error&) {
        // Not a built-in family; no recovered primal.
    }
    if (primal) {
        summary.primal_value = primal->value(summary.final_price);
        summary.duality_gap =
            weak_duality_check(summary.final_objective, *primal, summary.final_price);
        // weak duality: anything below this is a bug, not noise
        require(*summary.duality_gap >= -1e-9,
                "duality gap fell below -1e-9 at the recovered primal point");
    }

    summary.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

void write_trace_csv(std::ostream& out, const MarketRun& run, int num_securities) {
    out << "t,agent";
    for (int k = 1; k <= num_securities; ++k) out << ",delta_" << k;
    out << ",cost_paid,objective";
    for (int k = 1; k <= num_securities; ++k) out << ",price_" << k;
    out << "\n";
    for (const auto& rec : run.trace) {
        out << rec.t << "," << rec.agent_id;
        for (int k = 0; k < num_securities; ++k) out << "," << fmt17(rec.delta(k));
        out << "," << fmt17(rec.cost_paid) << "," << fmt17(rec.objective_after);
        for (int k = 0; k < num_securities; ++k) out << "," << fmt17(rec.price_after(k));
        out << "\n";
    }
}

void write_summary_json(std::ostream& out, const RunSummary& summary) {
    nlohmann::json j;
    j["rounds"] = summary.rounds;
    j["converged"] = summary.converged;
    j["final_objective"] = summary.final_objective;
    j["final_price"] = std::vector<double>(summary.final_price.data(),
                                           summary.final_price.data() +
                                               summary.final_price.size());
    j["avg_price"] = std::vector<double>(summary.avg_price.data(),
                                         summary.avg_price.data() +
                                             summary.avg_price.size());
    if (summary.primal_value) j["primal_value"] = *summary.primal_value;
    else j["primal_value"] = nullptr;
    if (summary.duality_gap) j["duality_gap"] = *summary.duality_gap;
    else j["duality_gap"] = nullptr;
    j["wall_clock_seconds"] = summary.wall_seconds;
    out << j.dump(2) << "\n";
}

int run_and_write(const MarketConfig& config, const std::string& out_prefix) {
    RunOutput out = run_config(config);
    {
        std::ofstream trace(out_prefix + ".trace.csv");
        if (!trace) throw error("cannot write " + out_prefix + ".trace.csv");
        write_trace_csv(trace, out.run, out.num_securities);
    }
    {
        std::ofstream summary(out_prefix + ".summary.json");
        if (!summary) throw error("cannot write " + out_prefix + ".summary.json");
        write_summary_json(summary, out.summary);
    }
    return out.summary.converged ? 0 : 2;
}

std::vector<std::string> preset_names() {
    return {"opinion_pool_fig1", "opinion_pool_fig2", "gaussian_map", "logistic_cd",
            "logistic_gd"};
}

namespace {

// Biased-coin belief pool: every agent starts from a uniform prior and
// forms its posterior from 5 private draws of an unfair coin, so its belief
// on heads is (1 + heads) / 7 (Laplace smoothing).
MarketConfig coin_pool_preset(int num_agents, std::uint64_t seed, int max_rounds,
                              int window) {
    constexpr double kCoinBias = 0.7;
    constexpr int kDrawsPerAgent = 5;
    detail::SplitMix64 root(seed);
    std::vector<Vector> beliefs;
    std::vector<double> thetas(static_cast<std::size_t>(num_agents), 1.0);
    for (int n = 0; n < num_agents; ++n) {
        detail::SplitMix64 stream = root.fork();
        int heads = 0;
        for (int d = 0; d < kDrawsPerAgent; ++d)
            if (stream.bernoulli(kCoinBias)) ++heads;
        Vector belief(2);
        belief(0) = (1.0 + heads) / (2.0 + kDrawsPerAgent);
        belief(1) = 1.0 - belief(0);
        beliefs.push_back(std::move(belief));
    }
    MarketConfig config = build_opinion_pool_market(beliefs, thetas, 1.0);
    config.seed = seed;
    config.stop.max_rounds = max_rounds;
    config.stop.window = window;
    return config;
}

} // namespace

MarketConfig make_preset(const std::string& name, std::optional<std::uint64_t> seed) {
    if (name == "opinion_pool_fig1") {
        return coin_pool_preset(10, seed.value_or(20250214), 10000, 10);
    }
    if (name == "opinion_pool_fig2") {
        return coin_pool_preset(100, seed.value_or(20250214), 500, 100);
    }
    if (name == "gaussian_map") {
        MarketConfig config = build_gaussian_map_market(1.0, 1.0, 1.0, 1.0);
        config.seed = seed.value_or(1);
        return config;
    }
    if (name == "logistic_cd" || name == "logistic_gd") {
        SyntheticDatasetSpec data;
        data.m = 50;
        data.k = 3;
        data.seed = seed.value_or(11);
        MarketConfig config =
            build_logistic_market(DatasetSource{data}, 0.1, name == "logistic_gd");
        config.seed = seed.value_or(11);
        return config;
    }
    throw config_error("unknown preset '" + name + "'");
}

} // namespace riskmarket
