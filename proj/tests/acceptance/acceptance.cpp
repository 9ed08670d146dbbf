// Acceptance suite: runs every release criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "riskmarket/apps.hpp"
#include "riskmarket/detail/rng.hpp"
#include "riskmarket/runner.hpp"

using namespace riskmarket;
namespace fs = std::filesystem;

namespace {

struct Check {
    int failures = 0;
    std::vector<std::string> notes;

    void expect(bool ok, const std::string& what) {
        if (!ok) {
            ++failures;
            notes.push_back(what);
        }
    }
};

Vector random_belief(detail::SplitMix64& rng, int n) {
    Vector b(n);
    for (int i = 0; i < n; ++i) b(i) = -std::log(std::max(rng.u01(), 1e-12));
    return b / b.sum();
}

Vector random_payoff(detail::SplitMix64& rng, int n, double scale) {
    Vector x(n);
    for (int i = 0; i < n; ++i) x(i) = scale * rng.normal();
    return x;
}

// Every engine run made by the suite lands here so the global-objective and
// weak-duality criteria can sweep all of them.
struct RegisteredRun {
    std::string label;
    MarketConfig config;
    RunOutput out;
};
std::vector<RegisteredRun> g_runs;

const RunOutput& register_run(const std::string& label, const MarketConfig& config) {
    g_runs.push_back({label, config, run_config(config)});
    return g_runs.back().out;
}

// --- criteria -------------------------------------------------------------

void criterion_risk_axioms(Check& c) {
    const auto start = std::chrono::steady_clock::now();
    detail::SplitMix64 rng(0xA1);
    const int cases = 10000;
    int ti_fail = 0, mono_fail = 0, convex_fail = 0;
    for (int trial = 0; trial < cases; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(4));
        const Vector belief = random_belief(rng, n);
        const EntropicRisk ent(rng.uniform(0.2, 3.0), belief);
        const VaRRisk var(rng.uniform(0.05, 0.95), belief);
        const Vector x = random_payoff(rng, n, 3.0);
        const Vector ones = Vector::Ones(n);
        const double m = rng.uniform(-5.0, 5.0);

        if (std::abs(entropic_risk(x + m * ones, ent) - (entropic_risk(x, ent) - m)) >
            1e-9)
            ++ti_fail;
        if (std::abs(var_risk(x + m * ones, var) - (var_risk(x, var) - m)) > 1e-9)
            ++ti_fail;

        Vector delta(n);
        for (int i = 0; i < n; ++i) delta(i) = std::abs(rng.normal());
        if (entropic_risk(x + delta, ent) > entropic_risk(x, ent) + 1e-9) ++mono_fail;
        if (var_risk(x + delta, var) > var_risk(x, var) + 1e-9) ++mono_fail;

        const Vector x2 = random_payoff(rng, n, 3.0);
        const double lam = rng.u01();
        if (entropic_risk(lam * x + (1 - lam) * x2, ent) >
            lam * entropic_risk(x, ent) + (1 - lam) * entropic_risk(x2, ent) + 1e-9)
            ++convex_fail;

        Vector mu(n), s1(n), s2(n);
        for (int i = 0; i < n; ++i) {
            mu(i) = rng.normal();
            s1(i) = rng.normal();
            s2(i) = rng.normal();
        }
        const QuadraticRisk quad(mu, rng.uniform(0.0, 3.0));
        if (quadratic_risk(lam * s1 + (1 - lam) * s2, quad) >
            lam * quadratic_risk(s1, quad) + (1 - lam) * quadratic_risk(s2, quad) + 1e-9)
            ++convex_fail;
        // quadratic risk lives on share space; translation acts through cash
        const Portfolio pf{m, s1};
        if (std::abs(gross_risk(pf, quad, nullptr) - (quad.risk(s1, nullptr) - m)) >
            1e-9)
            ++ti_fail;
    }
    c.expect(ti_fail == 0, "translation invariance violations: " + std::to_string(ti_fail));
    c.expect(mono_fail == 0, "monotonicity violations: " + std::to_string(mono_fail));
    c.expect(convex_fail == 0, "convexity violations: " + std::to_string(convex_fail));
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.expect(secs < 10.0, "runtime " + std::to_string(secs) + "s exceeds 10s");
}

void criterion_dual_representation(Check& c) {
    const auto start = std::chrono::steady_clock::now();
    detail::SplitMix64 rng(0xA2);
    double worst = 0.0;
    int done = 0;
    for (int n = 2; n <= 4; ++n) {
        const int trials = n == 2 ? 34 : 33;
        for (int trial = 0; trial < trials; ++trial) {
            const Vector belief = random_belief(rng, n);
            const double theta = rng.uniform(0.3, 2.5);
            const EntropicRisk ent(theta, belief);
            const Vector x = random_payoff(rng, n, 2.0);
            const auto res = penalty_risk_oracle(x, kl_penalty(theta, belief), 1e-4);
            worst = std::max(worst, std::abs(res.value - entropic_risk(x, ent)));
            ++done;
        }
    }
    c.expect(done == 100, "expected 100 payoffs");
    c.expect(worst <= 1e-4, "worst oracle deviation " + std::to_string(worst));
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.expect(secs < 60.0, "runtime " + std::to_string(secs) + "s exceeds 60s");
}

void criterion_path_independence(Check& c) {
    detail::SplitMix64 rng(0xA3);
    for (int rep = 0; rep < 20; ++rep) {
        const int k = 2 + static_cast<int>(rng.below(3));
        const LMSRCost lmsr(rng.uniform(0.4, 2.0), k);
        const QuadraticCost quad(rng.uniform(0.4, 2.0), k);
        for (const CostFunction* cost :
             std::initializer_list<const CostFunction*>{&lmsr, &quad}) {
            Vector y = Vector::Zero(k);
            double total = 0.0;
            for (int t = 0; t < 100; ++t) {
                const Vector d = random_payoff(rng, k, 0.5);
                total += incremental_cost(*cost, y, d);
                y += d;
            }
            const double direct = cost->cost(y) - cost->cost(Vector::Zero(k));
            c.expect(std::abs(total - direct) <= 1e-9,
                     "path dependence " + std::to_string(std::abs(total - direct)));
        }
    }
}

// Shared fixture: pool presets and the analytic pool they target.
Vector preset_pool(const MarketConfig& config, double theta0_override = 0.0) {
    std::vector<Vector> beliefs;
    std::vector<double> thetas;
    for (const auto& agent : config.agents) {
        const auto& ent = std::get<EntropicSpec>(agent.risk);
        beliefs.push_back(ent.belief);
        thetas.push_back(ent.theta);
    }
    const double theta0 = theta0_override > 0.0
                              ? theta0_override
                              : std::get<LMSRSpec>(config.cost).theta0;
    return analytic_log_pool(beliefs, thetas, theta0);
}

void criterion_opinion_pool(Check& c) {
    const auto start = std::chrono::steady_clock::now();

    const MarketConfig single = build_opinion_pool_market(
        {(Vector(2) << 0.8, 0.2).finished()}, {1.0}, 1.0);
    const RunOutput& single_out = register_run("pool_single", single);
    c.expect(single_out.summary.converged, "single-agent market did not converge");
    c.expect(std::abs(single_out.summary.final_price(0) - 2.0 / 3.0) <= 1e-5 &&
                 std::abs(single_out.summary.final_price(1) - 1.0 / 3.0) <= 1e-5,
             "single-agent price missed (2/3, 1/3)");

    const MarketConfig fig1 = make_preset("opinion_pool_fig1");
    const RunOutput& out = register_run("fig1", fig1);
    c.expect(out.summary.converged, "figure-1 preset did not converge");
    const Vector pool = preset_pool(fig1);
    c.expect((out.summary.final_price - pool).lpNorm<Eigen::Infinity>() <= 1e-4,
             "figure-1 price is not within 1e-4 of the analytic pool");

    const PrimalProblem primal = [&] {
        const MaterializedMarket market = materialize(fig1);
        return dual_objective_from_market(market.agents, *market.cost);
    }();
    const double gap = weak_duality_check(out.summary.final_objective, primal, pool);
    c.expect(gap <= 1e-5 && gap >= -1e-9,
             "duality gap at the analytic pool: " + std::to_string(gap));

    // bias direction: the maker's uniform belief pulls the pool toward 0.5
    const Vector unbiased =
        preset_pool(fig1, std::numeric_limits<double>::infinity());
    c.expect(std::abs(pool(0) - 0.5) < std::abs(unbiased(0) - 0.5),
             "pool is not biased toward 0.5 relative to the unbiased pool");
    c.expect((pool(0) - 0.5) * (unbiased(0) - 0.5) > 0.0,
             "pool crossed to the other side of 0.5");

    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.expect(secs < 30.0, "runtime " + std::to_string(secs) + "s exceeds 30s");
}

void criterion_fig2_oscillation(Check& c) {
    const auto start = std::chrono::steady_clock::now();
    const MarketConfig fig2 = make_preset("opinion_pool_fig2");
    const RunOutput& out = register_run("fig2", fig2);
    c.expect(!out.summary.converged, "figure-2 preset converged unexpectedly");
    c.expect(out.summary.rounds == 500, "figure-2 preset did not run 500 rounds");
    const Vector pool = preset_pool(fig2);
    c.expect((out.summary.avg_price - pool).lpNorm<Eigen::Infinity>() <= 2e-2,
             "running-mean price is not within 2e-2 of the analytic pool");
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.expect(secs < 120.0, "runtime " + std::to_string(secs) + "s exceeds 2min");
}

void criterion_gaussian_map(Check& c) {
    for (double theta0 : {0.5, 1.0, 2.0}) {
        for (double s1sq : {0.5, 1.0, 2.0}) {
            const double mu1 = 1.0, sigma1 = std::sqrt(s1sq), theta1 = 1.0;
            const MarketConfig config =
                build_gaussian_map_market(mu1, sigma1, theta1, theta0);
            const RunOutput& out = register_run("gaussian", config);
            const auto sol = gaussian_map_closed_form(mu1, sigma1, theta1, theta0);
            c.expect(out.summary.converged, "gaussian market did not converge");
            c.expect(std::abs(out.run.state.inventory(0) - sol.s_star) <= 1e-8,
                     "equilibrium shares missed the closed form");
            c.expect(std::abs(out.summary.final_price(0) - sol.mu_map) <= 1e-8,
                     "recovered price missed the MAP mean");
        }
    }
}

void criterion_logistic_regression(Check& c) {
    const auto start = std::chrono::steady_clock::now();
    const MarketConfig cd = make_preset("logistic_cd");
    const MarketConfig gd = make_preset("logistic_gd");
    const RunOutput& cd_out = register_run("logistic_cd", cd);
    const RunOutput& gd_out = register_run("logistic_gd", gd);
    c.expect(cd_out.summary.converged, "coordinate-descent market did not converge");
    c.expect(gd_out.summary.converged, "gradient market did not converge");

    const auto& spec = std::get<LogisticCostSpec>(cd.cost);
    const Dataset data =
        make_synthetic_dataset(std::get<SyntheticDatasetSpec>(spec.source));
    const double lambda = spec.lambda;
    const Vector w_ref = reference_logistic_solver(data, lambda);

    const Vector w_cd = cd_out.run.state.inventory;
    const Vector w_gd = gd_out.run.state.inventory;
    c.expect((w_cd - w_ref).lpNorm<Eigen::Infinity>() <= 1e-4,
             "coordinate-descent weights differ from the reference");
    c.expect((w_gd - w_ref).lpNorm<Eigen::Infinity>() <= 1e-4,
             "gradient-descent weights differ from the reference");
    c.expect((w_cd - w_gd).lpNorm<Eigen::Infinity>() <= 1e-4,
             "the two market solvers disagree");

    const double f_ref = regularized_logistic_objective(data, w_ref, lambda);
    const double f_cd = regularized_logistic_objective(data, w_cd, lambda);
    const double f_gd = regularized_logistic_objective(data, w_gd, lambda);
    c.expect(std::abs(f_cd - f_ref) <= 1e-6, "cd objective differs from reference");
    c.expect(std::abs(f_gd - f_ref) <= 1e-6, "gd objective differs from reference");
    c.expect(std::abs(f_cd - f_gd) <= 1e-6, "market objectives differ");

    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.expect(secs < 30.0, "runtime " + std::to_string(secs) + "s exceeds 30s");
}

void criterion_objective_monotone(Check& c) {
    // A couple of dedicated random markets join everything already run.
    detail::SplitMix64 rng(0xA4);
    for (int rep = 0; rep < 3; ++rep) {
        std::vector<Vector> beliefs;
        std::vector<double> thetas;
        const int n = 3 + static_cast<int>(rng.below(4));
        for (int i = 0; i < n; ++i) {
            Vector b(3);
            for (int j = 0; j < 3; ++j) b(j) = 0.05 + rng.u01();
            beliefs.push_back(b / b.sum());
            thetas.push_back(rng.uniform(0.5, 2.0));
        }
        MarketConfig config =
            build_opinion_pool_market(beliefs, thetas, rng.uniform(0.5, 2.0));
        config.stop.max_rounds = 400;
        if (rep == 1) config.queue.kind = QueueKind::UniformRandom;
        config.seed = rng.next();
        register_run("random_pool", config);
    }

    for (const auto& reg : g_runs) {
        const MaterializedMarket market = materialize(reg.config);
        const int k = market.num_securities;

        // objective trace is non-increasing, starting from L(t=0)
        MarketState initial;
        initial.inventory = Vector::Zero(k);
        initial.portfolios.assign(market.agents.size(),
                                  Portfolio{0.0, ShareVector::Zero(k)});
        double prev = global_objective(initial, market.agents, *market.cost,
                                       market.basis_ptr());
        bool monotone = true;
        for (const auto& rec : reg.out.run.trace) {
            if (rec.objective_after > prev + 1e-9) monotone = false;
            prev = rec.objective_after;
        }
        c.expect(monotone, reg.label + ": objective trace increased");

        // replaying the trace reproduces the final state exactly, and the
        // inventory identity Y = sum_n X_n holds bit for bit
        std::vector<Portfolio> pfs(market.agents.size(),
                                   Portfolio{0.0, ShareVector::Zero(k)});
        for (const auto& rec : reg.out.run.trace)
            pfs[static_cast<std::size_t>(rec.agent_id)].shares += rec.delta;
        ShareVector y = ShareVector::Zero(k);
        for (const auto& pf : pfs) y += pf.shares;
        c.expect(y == reg.out.run.state.inventory,
                 reg.label + ": inventory identity broken");
        ShareVector held = ShareVector::Zero(k);
        for (const auto& pf : reg.out.run.state.portfolios) held += pf.shares;
        c.expect(held == reg.out.run.state.inventory,
                 reg.label + ": final portfolios do not sum to the inventory");

        // cash conservation with the market maker
        double paid = 0.0;
        for (const auto& rec : reg.out.run.trace) paid += rec.cost_paid;
        const double minted = market.cost->cost(reg.out.run.state.inventory) -
                              market.cost->cost(Vector::Zero(k));
        c.expect(std::abs(paid - minted) <= 1e-9,
                 reg.label + ": cash is not conserved against the maker");
    }
}

void criterion_weak_duality(Check& c) {
    detail::SplitMix64 rng(0xA5);
    int primal_runs = 0;
    for (const auto& reg : g_runs) {
        const MaterializedMarket market = materialize(reg.config);
        PrimalProblem primal;
        try {
            primal = dual_objective_from_market(market.agents, *market.cost);
        } catch (const error&) {
            continue; // not a built-in family
        }
        ++primal_runs;
        const double market_L = reg.out.summary.final_objective;

        if (reg.out.summary.converged) {
            const Vector recovered = reg.out.summary.final_price;
            const double gap = weak_duality_check(market_L, primal, recovered);
            c.expect(gap >= -1e-9, reg.label + ": gap below -1e-9 at the recovered point");
            c.expect(gap <= 1e-5, reg.label + ": gap above 1e-5 at the recovered point");
        }

        // weak duality holds at arbitrary primal points too
        for (int probe = 0; probe < 5; ++probe) {
            Vector p;
            if (primal.domain == PrimalProblem::Domain::Simplex) {
                p = random_belief(rng, primal.dim);
            } else {
                p = random_payoff(rng, primal.dim, 2.0);
            }
            c.expect(weak_duality_check(market_L, primal, p) >= -1e-9,
                     reg.label + ": weak duality violated at a probe point");
        }
    }
    c.expect(primal_runs > 0, "no run exercised the built-in primal families");
}

void criterion_determinism(Check& c) {
    // in-process: identical configs give byte-identical traces
    const MarketConfig fig1 = make_preset("opinion_pool_fig1");
    const RunOutput a = run_config(fig1);
    const RunOutput b = run_config(fig1);
    std::ostringstream ca, cb;
    write_trace_csv(ca, a.run, a.num_securities);
    write_trace_csv(cb, b.run, b.num_securities);
    c.expect(ca.str() == cb.str(), "in-process traces differ");

#ifdef RISKMARKET_CLI_PATH
    // end to end through the binary
    const fs::path dir = fs::temp_directory_path() / "riskmarket_acceptance";
    fs::create_directories(dir);
    const std::string cli = RISKMARKET_CLI_PATH;
    for (const std::string preset : {"gaussian_map", "opinion_pool_fig1"}) {
        const fs::path out1 = dir / (preset + "_1");
        const fs::path out2 = dir / (preset + "_2");
        const std::string cmd1 = cli + " run --preset " + preset + " --seed 33 --out " +
                                 out1.string() + " > /dev/null 2>&1";
        const std::string cmd2 = cli + " run --preset " + preset + " --seed 33 --out " +
                                 out2.string() + " > /dev/null 2>&1";
        c.expect(std::system(cmd1.c_str()) == 0, preset + ": cli run failed");
        c.expect(std::system(cmd2.c_str()) == 0, preset + ": cli rerun failed");
        std::ifstream f1(out1.string() + ".trace.csv", std::ios::binary);
        std::ifstream f2(out2.string() + ".trace.csv", std::ios::binary);
        std::stringstream s1, s2;
        s1 << f1.rdbuf();
        s2 << f2.rdbuf();
        c.expect(s1.str().size() > 0 && s1.str() == s2.str(),
                 preset + ": cli traces are not byte-identical");
    }
    fs::remove_all(dir);
#endif
}

struct Criterion {
    int id;
    const char* name;
    void (*fn)(Check&);
};

} // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "risk-measure axioms (1e4 random cases each)", criterion_risk_axioms},
        {2, "entropic risk matches the KL-penalty oracle", criterion_dual_representation},
        {3, "path independence over 100-trade sequences", criterion_path_independence},
        {4, "global objective monotone + inventory identity", criterion_objective_monotone},
        {5, "opinion pool converges to the analytic pool", criterion_opinion_pool},
        {6, "N=100 pool oscillates without converging", criterion_fig2_oscillation},
        {7, "gaussian MAP equilibrium across a 3x3 grid", criterion_gaussian_map},
        {8, "logistic market matches the reference solver", criterion_logistic_regression},
        {9, "weak duality on every recovered primal", criterion_weak_duality},
        {10, "seeded runs produce byte-identical traces", criterion_determinism},
    };
    // 5-8 populate the run registry consumed by 4 and 9
    const std::vector<int> order{1, 2, 3, 5, 6, 7, 8, 4, 9, 10};

    std::map<int, std::pair<bool, std::string>> results;
    for (int id : order) {
        const auto& crit = *std::find_if(criteria.begin(), criteria.end(),
                                         [&](const Criterion& c) { return c.id == id; });
        Check check;
        try {
            crit.fn(check);
        } catch (const std::exception& e) {
            check.expect(false, std::string("exception: ") + e.what());
        }
        results[id] = {check.failures == 0,
                       check.notes.empty() ? std::string() : check.notes.front()};
    }

    int failures = 0;
    for (const auto& crit : criteria) {
        const auto& [ok, detail] = results[crit.id];
        std::printf("%s %2d  %s%s%s\n", ok ? "PASS" : "FAIL", crit.id, crit.name,
                    detail.empty() ? "" : " -- ", detail.c_str());
        if (!ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
