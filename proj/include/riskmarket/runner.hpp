#pragma once
#include <iosfwd>
#include <optional>
#include <string>

#include "riskmarket/config.hpp"
#include "riskmarket/duality.hpp"

namespace riskmarket {

/// End-of-run report. The primal fields are filled for the built-in
/// convex families (LMSR + entropic, quadratic + quadratic); for other
/// markets there is no recovered primal and they stay unset. The duality
/// gap satisfies gap >= -1e-9 whenever it is defined.
struct RunSummary {
    int rounds = 0;
    bool converged = false;
    double final_objective = 0.0;
    Vector final_price;
    /// Running mean of the price over all rounds (implementation choice:
    /// the averaging window is the whole trace).
    Vector avg_price;
    std::optional<double> primal_value;
    std::optional<double> duality_gap;
    double wall_seconds = 0.0;
};

struct RunOutput {
    MarketRun run;
    RunSummary summary;
    int num_securities = 0;
};

/// Materialize and run one market, then evaluate the recovered primal point
/// P* = price(Y_final) when the market belongs to a built-in family.
RunOutput run_config(const MarketConfig& config);

/// Columns: t,agent,delta_1..K,cost_paid,objective,price_1..K. Floats carry
/// 17 significant digits so the file round-trips doubles exactly.
void write_trace_csv(std::ostream& out, const MarketRun& run, int num_securities);

void write_summary_json(std::ostream& out, const RunSummary& summary);

/// Run and write <prefix>.trace.csv and <prefix>.summary.json.
/// Returns 0 on a converged run, 2 on non-convergence (outputs are still
/// written). Configuration and I/O problems throw.
int run_and_write(const MarketConfig& config, const std::string& out_prefix);

/// Built-in configurations: opinion_pool_fig1, opinion_pool_fig2,
/// gaussian_map, logistic_cd, logistic_gd.
std::vector<std::string> preset_names();

/// Build a preset by name; `seed` reseeds everything derived from the
/// default seed (private beliefs included).
MarketConfig make_preset(const std::string& name,
                         std::optional<std::uint64_t> seed = std::nullopt);

} // namespace riskmarket
