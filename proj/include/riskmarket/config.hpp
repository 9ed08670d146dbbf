#pragma once
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "riskmarket/dataset.hpp"
#include "riskmarket/engine.hpp"

namespace riskmarket {

struct EntropicSpec {
    double theta = 1.0;
    Vector belief;
};

struct VaRSpec {
    double alpha = 0.95;
    Vector belief;
};

struct QuadraticRiskSpec {
    Vector mu;
    double scale = 0.0;
};

using RiskSpec = std::variant<EntropicSpec, VaRSpec, QuadraticRiskSpec>;

struct AgentConfig {
    RiskSpec risk;
    AgentMode mode = AgentMode::Exact;
    std::vector<bool> mask; // empty means all securities
};

struct CsvSource {
    std::string path;
};
using DatasetSource = std::variant<CsvSource, Dataset, SyntheticDatasetSpec>;

struct LMSRSpec {
    double theta0 = 1.0;
};

struct QuadraticCostSpec {
    double theta0 = 1.0;
    int k = 1;
    Vector linear; // empty means zero
};

struct LogisticCostSpec {
    double lambda = 0.1;
    DatasetSource source;
};

using CostSpec = std::variant<LMSRSpec, QuadraticCostSpec, LogisticCostSpec>;

enum class BasisKind {
    ArrowDebreu, ///< identity payoffs over the outcome space
    Explicit,    ///< payoff matrix given in full
    Linear,      ///< share-space market, no finite outcome enumeration
};

struct BasisConfig {
    BasisKind kind = BasisKind::ArrowDebreu;
    Matrix matrix; // Explicit only
};

/// Everything needed to run one market. Validates against the module-level
/// invariants before a run starts; all validation errors name the offending
/// field.
struct MarketConfig {
    std::optional<OutcomeSpace> outcomes;
    BasisConfig basis;
    CostSpec cost;
    std::vector<AgentConfig> agents;
    QueuePolicy queue;
    StopRule stop;
    std::uint64_t seed = 0;
    double initial_cash = 0.0;
};

/// Ready-to-run pieces built from a validated config.
struct MaterializedMarket {
    std::vector<AgentSpec> agents;
    std::shared_ptr<const CostFunction> cost;
    std::optional<SecurityBasis> basis;
    QueuePolicy queue;
    StopRule stop;
    EngineParams params;
    int num_securities = 0;

    const SecurityBasis* basis_ptr() const { return basis ? &*basis : nullptr; }
};

/// Throws config_error (naming the field) on any invariant violation.
void validate_config(const MarketConfig& config);

/// Validates, resolves dataset sources, and instantiates agents, cost
/// function and basis. The queue's random stream is derived from the
/// config seed.
MaterializedMarket materialize(const MarketConfig& config);

MarketConfig parse_config(const nlohmann::json& j);
nlohmann::json config_to_json(const MarketConfig& config);
MarketConfig load_config_file(const std::string& path);

int num_securities(const MarketConfig& config);

} // namespace riskmarket
