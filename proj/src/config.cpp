#include "riskmarket/config.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "riskmarket/apps.hpp"
#include "riskmarket/detail/rng.hpp"

namespace riskmarket {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw config_error(field + ": " + what);
}

const json& member(const json& j, const std::string& field, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    auto it = j.find(field);
    if (it == j.end()) fail(path + "." + field, "missing field");
    return *it;
}

double number_at(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

double number_field(const json& j, const std::string& field, const std::string& path) {
    return number_at(member(j, field, path), path + "." + field);
}

Vector vector_field(const json& j, const std::string& field, const std::string& path) {
    const json& arr = member(j, field, path);
    const std::string p = path + "." + field;
    if (!arr.is_array() || arr.empty()) fail(p, "expected a non-empty array of numbers");
    Vector v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number()) fail(p + "[" + std::to_string(i) + "]", "expected a number");
        v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
    }
    return v;
}

json vector_to_json(const Vector& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

RiskSpec parse_risk(const json& j, const std::string& path) {
    const json& type = member(j, "type", path);
    if (!type.is_string()) fail(path + ".type", "expected a string");
    const std::string t = type.get<std::string>();
    if (t == "entropic") {
        return EntropicSpec{number_field(j, "theta", path), vector_field(j, "belief", path)};
    }
    if (t == "var") {
        return VaRSpec{number_field(j, "alpha", path), vector_field(j, "belief", path)};
    }
    if (t == "quadratic") {
        return QuadraticRiskSpec{vector_field(j, "mu", path), number_field(j, "scale", path)};
    }
    fail(path + ".type", "unknown risk type '" + t + "' (entropic|var|quadratic)");
}

DatasetSource parse_dataset_source(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    if (j.contains("csv")) {
        const json& p = j["csv"];
        if (!p.is_string()) fail(path + ".csv", "expected a file path string");
        return CsvSource{p.get<std::string>()};
    }
    if (j.contains("synthetic")) {
        const json& s = j["synthetic"];
        const std::string sp = path + ".synthetic";
        SyntheticDatasetSpec spec;
        spec.m = static_cast<int>(number_field(s, "m", sp));
        spec.k = static_cast<int>(number_field(s, "k", sp));
        spec.seed = static_cast<std::uint64_t>(number_field(s, "seed", sp));
        if (s.contains("weight_scale"))
            spec.weight_scale = number_at(s["weight_scale"], sp + ".weight_scale");
        return spec;
    }
    if (j.contains("features")) {
        const json& f = member(j, "features", path);
        const std::string fp = path + ".features";
        if (!f.is_array() || f.empty()) fail(fp, "expected a non-empty array of rows");
        const std::size_t cols = f[0].is_array() ? f[0].size() : 0;
        if (cols == 0) fail(fp + "[0]", "expected a non-empty array of numbers");
        Dataset data;
        data.features.resize(static_cast<Eigen::Index>(f.size()),
                             static_cast<Eigen::Index>(cols));
        for (std::size_t r = 0; r < f.size(); ++r) {
            if (!f[r].is_array() || f[r].size() != cols)
                fail(fp + "[" + std::to_string(r) + "]", "rows must have equal length");
            for (std::size_t c = 0; c < cols; ++c)
                data.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    number_at(f[r][c], fp);
        }
        data.labels = vector_field(j, "labels", path);
        return data;
    }
    fail(path, "expected one of csv|synthetic|features");
}

CostSpec parse_cost(const json& j, const std::string& path) {
    const json& type = member(j, "type", path);
    if (!type.is_string()) fail(path + ".type", "expected a string");
    const std::string t = type.get<std::string>();
    if (t == "lmsr") return LMSRSpec{number_field(j, "theta0", path)};
    if (t == "quadratic") {
        QuadraticCostSpec spec;
        spec.theta0 = number_field(j, "theta0", path);
        spec.k = j.contains("k") ? static_cast<int>(number_at(j["k"], path + ".k")) : 1;
        if (j.contains("linear")) spec.linear = vector_field(j, "linear", path);
        return spec;
    }
    if (t == "logistic") {
        LogisticCostSpec spec;
        spec.lambda = number_field(j, "lambda", path);
        spec.source = parse_dataset_source(member(j, "dataset", path), path + ".dataset");
        return spec;
    }
    fail(path + ".type", "unknown cost type '" + t + "' (lmsr|quadratic|logistic)");
}

Dataset resolve_dataset(const DatasetSource& source) {
    if (const auto* csv = std::get_if<CsvSource>(&source))
        return load_dataset_csv(csv->path);
    if (const auto* inline_data = std::get_if<Dataset>(&source)) return *inline_data;
    return make_synthetic_dataset(std::get<SyntheticDatasetSpec>(source));
}

int dataset_features(const DatasetSource& source) {
    if (const auto* inline_data = std::get_if<Dataset>(&source))
        return inline_data->num_features();
    if (const auto* synth = std::get_if<SyntheticDatasetSpec>(&source)) return synth->k;
    return resolve_dataset(source).num_features();
}

int num_states(const MarketConfig& config) {
    switch (config.basis.kind) {
        case BasisKind::ArrowDebreu:
            return config.outcomes ? config.outcomes->size() : 0;
        case BasisKind::Explicit:
            return static_cast<int>(config.basis.matrix.cols());
        case BasisKind::Linear:
            return 0;
    }
    return 0;
}

void check_belief_field(const Vector& belief, int states, const std::string& path) {
    if (states > 0 && belief.size() != states)
        fail(path, "length " + std::to_string(belief.size()) +
                       " does not match the outcome space size " + std::to_string(states));
    if (!belief.allFinite() || belief.minCoeff() < 0.0)
        fail(path, "entries must be finite and nonnegative");
    if (std::abs(belief.sum() - 1.0) > 1e-12) fail(path, "must sum to 1");
}

} // namespace

int num_securities(const MarketConfig& config) {
    switch (config.basis.kind) {
        case BasisKind::ArrowDebreu: {
            if (!config.outcomes)
                fail("outcome_space", "required by an arrow_debreu basis");
            return config.outcomes->size();
        }
        case BasisKind::Explicit:
            return static_cast<int>(config.basis.matrix.rows());
        case BasisKind::Linear: {
            if (const auto* quad = std::get_if<QuadraticCostSpec>(&config.cost))
                return quad->linear.size() > 0 ? static_cast<int>(quad->linear.size())
                                               : quad->k;
            if (const auto* logi = std::get_if<LogisticCostSpec>(&config.cost))
                return dataset_features(logi->source);
            fail("basis", "a linear basis requires a quadratic or logistic cost");
        }
    }
    fail("basis", "unknown basis kind");
}

void validate_config(const MarketConfig& config) {
    if (config.outcomes) {
        if (config.outcomes->size() < 1) fail("outcome_space", "needs at least one state");
        try {
            OutcomeSpace::labeled(config.outcomes->states);
        } catch (const error& e) {
            fail("outcome_space", e.what());
        }
    }

    if (config.basis.kind == BasisKind::Explicit) {
        if (config.basis.matrix.rows() < 1) fail("basis.matrix", "needs at least one row");
        if (config.basis.matrix.rows() > config.basis.matrix.cols())
            fail("basis.matrix", "cannot have more securities than states");
        if (!verify_basis(config.basis.matrix))
            fail("basis.matrix", "rows must be linearly independent");
        if (config.outcomes &&
            config.outcomes->size() != static_cast<int>(config.basis.matrix.cols()))
            fail("basis.matrix", "column count does not match outcome_space");
    }

    const int k = num_securities(config);
    const int states = num_states(config);

    if (const auto* lmsr = std::get_if<LMSRSpec>(&config.cost)) {
        if (lmsr->theta0 <= 0.0) fail("cost.theta0", "must be > 0");
        if (config.basis.kind == BasisKind::Linear)
            fail("cost.type", "lmsr requires a state-backed basis");
    } else if (const auto* quad = std::get_if<QuadraticCostSpec>(&config.cost)) {
        if (quad->theta0 <= 0.0) fail("cost.theta0", "must be > 0");
        if (quad->k < 1) fail("cost.k", "must be >= 1");
        if (quad->linear.size() > 0 && static_cast<int>(quad->linear.size()) != k)
            fail("cost.linear", "length does not match the number of securities");
        if (config.basis.kind != BasisKind::Linear && quad->k != k)
            fail("cost.k", "does not match the basis");
    } else if (const auto* logi = std::get_if<LogisticCostSpec>(&config.cost)) {
        if (logi->lambda <= 0.0) fail("cost.lambda", "must be > 0");
        if (config.basis.kind != BasisKind::Linear)
            fail("cost.type", "logistic requires basis \"linear\"");
        if (const auto* inline_data = std::get_if<Dataset>(&logi->source)) {
            try {
                validate_dataset(*inline_data);
            } catch (const error& e) {
                fail("cost.dataset", e.what());
            }
        } else if (const auto* synth = std::get_if<SyntheticDatasetSpec>(&logi->source)) {
            if (synth->m < 1) fail("cost.dataset.synthetic.m", "must be >= 1");
            if (synth->k < 1) fail("cost.dataset.synthetic.k", "must be >= 1");
        }
    }

    if (config.agents.empty()) fail("agents", "market needs at least one agent");
    for (std::size_t n = 0; n < config.agents.size(); ++n) {
        const std::string path = "agents[" + std::to_string(n) + "]";
        const AgentConfig& agent = config.agents[n];
        if (const auto* ent = std::get_if<EntropicSpec>(&agent.risk)) {
            if (ent->theta <= 0.0) fail(path + ".risk.theta", "must be > 0");
            check_belief_field(ent->belief, states, path + ".risk.belief");
            if (config.basis.kind == BasisKind::Linear)
                fail(path + ".risk.type", "entropic risk needs a state-backed basis");
        } else if (const auto* var = std::get_if<VaRSpec>(&agent.risk)) {
            if (var->alpha <= 0.0 || var->alpha >= 1.0)
                fail(path + ".risk.alpha", "must lie in (0,1)");
            check_belief_field(var->belief, states, path + ".risk.belief");
            if (config.basis.kind == BasisKind::Linear)
                fail(path + ".risk.type", "var risk needs a state-backed basis");
            if (agent.mode == AgentMode::Exact)
                fail(path + ".mode", "var risk is not convex; use gradient_step");
        } else if (const auto* quad = std::get_if<QuadraticRiskSpec>(&agent.risk)) {
            if (quad->scale < 0.0) fail(path + ".risk.scale", "must be >= 0");
            if (static_cast<int>(quad->mu.size()) != k)
                fail(path + ".risk.mu", "length does not match the number of securities");
        }
        if (!agent.mask.empty()) {
            if (static_cast<int>(agent.mask.size()) != k)
                fail(path + ".mask", "length does not match the number of securities");
            bool any = false;
            for (bool b : agent.mask) any = any || b;
            if (!any) fail(path + ".mask", "needs at least one tradable security");
        }
    }

    if (config.stop.eps <= 0.0) fail("stop.eps", "must be > 0");
    if (config.stop.max_rounds < 0) fail("stop.max_rounds", "must be >= 0 (0 = auto)");
    if (config.stop.window < 0) fail("stop.window", "must be >= 0 (0 = auto)");
    if (config.stop.window > 0 &&
        config.stop.window < static_cast<int>(config.agents.size()))
        fail("stop.window", "must cover every agent");
}

MaterializedMarket materialize(const MarketConfig& config) {
    validate_config(config);
    MaterializedMarket market;
    market.num_securities = num_securities(config);
    const int k = market.num_securities;

    switch (config.basis.kind) {
        case BasisKind::ArrowDebreu:
            market.basis = SecurityBasis::arrow_debreu(k);
            break;
        case BasisKind::Explicit:
            market.basis = SecurityBasis(config.basis.matrix);
            break;
        case BasisKind::Linear:
            break;
    }

    if (const auto* lmsr = std::get_if<LMSRSpec>(&config.cost)) {
        market.cost = std::make_shared<LMSRCost>(lmsr->theta0, k);
    } else if (const auto* quad = std::get_if<QuadraticCostSpec>(&config.cost)) {
        if (quad->linear.size() > 0)
            market.cost = std::make_shared<QuadraticCost>(quad->theta0, quad->linear);
        else
            market.cost = std::make_shared<QuadraticCost>(quad->theta0, k);
    } else {
        const auto& logi = std::get<LogisticCostSpec>(config.cost);
        market.cost = std::make_shared<LogisticLossCost>(resolve_dataset(logi.source));
    }

    for (std::size_t n = 0; n < config.agents.size(); ++n) {
        const AgentConfig& spec = config.agents[n];
        AgentSpec agent;
        agent.id = static_cast<int>(n);
        agent.mode = spec.mode;
        agent.tradable = spec.mask;
        if (const auto* ent = std::get_if<EntropicSpec>(&spec.risk)) {
            agent.risk = std::make_shared<EntropicRisk>(ent->theta, ent->belief);
        } else if (const auto* var = std::get_if<VaRSpec>(&spec.risk)) {
            agent.risk = std::make_shared<VaRRisk>(var->alpha, var->belief);
        } else {
            const auto& quad = std::get<QuadraticRiskSpec>(spec.risk);
            agent.risk = std::make_shared<QuadraticRisk>(quad.mu, quad.scale);
        }
        market.agents.push_back(std::move(agent));
    }

    market.queue = config.queue;
    detail::SplitMix64 root(config.seed);
    market.queue.seed = root.next();
    market.stop = config.stop;
    market.params.initial_cash = config.initial_cash;
    return market;
}

MarketConfig parse_config(const json& j) {
    if (!j.is_object()) fail("config", "expected a JSON object");
    MarketConfig config;

    if (j.contains("outcome_space")) {
        const json& os = j["outcome_space"];
        if (os.contains("states")) {
            const json& st = os["states"];
            if (!st.is_array() || st.empty())
                fail("outcome_space.states", "expected a non-empty array of labels");
            std::vector<std::string> labels;
            for (const auto& s : st) {
                if (!s.is_string()) fail("outcome_space.states", "labels must be strings");
                labels.push_back(s.get<std::string>());
            }
            config.outcomes = OutcomeSpace{std::move(labels)};
        } else if (os.contains("size")) {
            const int n = static_cast<int>(number_at(os["size"], "outcome_space.size"));
            if (n < 1) fail("outcome_space.size", "must be >= 1");
            config.outcomes = OutcomeSpace::indexed(n);
        } else {
            fail("outcome_space", "expected states or size");
        }
    }

    const json& basis = member(j, "basis", "config");
    if (basis.is_string()) {
        const std::string b = basis.get<std::string>();
        if (b == "arrow_debreu") config.basis.kind = BasisKind::ArrowDebreu;
        else if (b == "linear") config.basis.kind = BasisKind::Linear;
        else fail("basis", "unknown basis '" + b + "' (arrow_debreu|linear|{matrix})");
    } else if (basis.is_object() && basis.contains("matrix")) {
        const json& rows = basis["matrix"];
        if (!rows.is_array() || rows.empty() || !rows[0].is_array())
            fail("basis.matrix", "expected an array of rows");
        const std::size_t cols = rows[0].size();
        Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (!rows[r].is_array() || rows[r].size() != cols)
                fail("basis.matrix[" + std::to_string(r) + "]", "rows must have equal length");
            for (std::size_t c = 0; c < cols; ++c)
                m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    number_at(rows[r][c], "basis.matrix");
        }
        config.basis.kind = BasisKind::Explicit;
        config.basis.matrix = std::move(m);
    } else {
        fail("basis", "expected arrow_debreu, linear, or {matrix: [[...]]}");
    }

    config.cost = parse_cost(member(j, "cost", "config"), "cost");

    const json& agents = member(j, "agents", "config");
    if (!agents.is_array()) fail("agents", "expected an array");
    for (std::size_t n = 0; n < agents.size(); ++n) {
        const std::string path = "agents[" + std::to_string(n) + "]";
        const json& a = agents[n];
        AgentConfig agent;
        agent.risk = parse_risk(member(a, "risk", path), path + ".risk");
        if (a.contains("mode")) {
            const json& mode = a["mode"];
            if (!mode.is_string()) fail(path + ".mode", "expected a string");
            const std::string m = mode.get<std::string>();
            if (m == "exact") agent.mode = AgentMode::Exact;
            else if (m == "gradient_step") agent.mode = AgentMode::GradientStep;
            else fail(path + ".mode", "unknown mode '" + m + "' (exact|gradient_step)");
        }
        if (a.contains("mask")) {
            const json& mask = a["mask"];
            if (!mask.is_array()) fail(path + ".mask", "expected an array of booleans");
            for (const auto& b : mask) {
                if (!b.is_boolean()) fail(path + ".mask", "expected an array of booleans");
                agent.mask.push_back(b.get<bool>());
            }
        }
        config.agents.push_back(std::move(agent));
    }

    if (j.contains("queue")) {
        const json& q = j["queue"];
        const json& policy = member(q, "policy", "queue");
        if (!policy.is_string()) fail("queue.policy", "expected a string");
        const std::string p = policy.get<std::string>();
        if (p == "round_robin") config.queue.kind = QueueKind::RoundRobin;
        else if (p == "random") config.queue.kind = QueueKind::UniformRandom;
        else fail("queue.policy", "unknown policy '" + p + "' (round_robin|random)");
    }

    if (j.contains("stop")) {
        const json& s = j["stop"];
        if (s.contains("max_rounds"))
            config.stop.max_rounds = static_cast<int>(number_at(s["max_rounds"], "stop.max_rounds"));
        if (s.contains("eps")) config.stop.eps = number_at(s["eps"], "stop.eps");
        if (s.contains("window"))
            config.stop.window = static_cast<int>(number_at(s["window"], "stop.window"));
    }

    if (j.contains("seed"))
        config.seed = static_cast<std::uint64_t>(number_at(j["seed"], "seed"));
    if (j.contains("initial_cash"))
        config.initial_cash = number_at(j["initial_cash"], "initial_cash");

    validate_config(config);
    return config;
}

json config_to_json(const MarketConfig& config) {
    json j;
    if (config.outcomes) j["outcome_space"] = {{"states", config.outcomes->states}};
    switch (config.basis.kind) {
        case BasisKind::ArrowDebreu: j["basis"] = "arrow_debreu"; break;
        case BasisKind::Linear: j["basis"] = "linear"; break;
        case BasisKind::Explicit: {
            json rows = json::array();
            for (Eigen::Index r = 0; r < config.basis.matrix.rows(); ++r)
                rows.push_back(vector_to_json(config.basis.matrix.row(r)));
            j["basis"] = {{"matrix", rows}};
            break;
        }
    }
    if (const auto* lmsr = std::get_if<LMSRSpec>(&config.cost)) {
        j["cost"] = {{"type", "lmsr"}, {"theta0", lmsr->theta0}};
    } else if (const auto* quad = std::get_if<QuadraticCostSpec>(&config.cost)) {
        j["cost"] = {{"type", "quadratic"}, {"theta0", quad->theta0}, {"k", quad->k}};
        if (quad->linear.size() > 0) j["cost"]["linear"] = vector_to_json(quad->linear);
    } else {
        const auto& logi = std::get<LogisticCostSpec>(config.cost);
        json cost = {{"type", "logistic"}, {"lambda", logi.lambda}};
        if (const auto* csv = std::get_if<CsvSource>(&logi.source)) {
            cost["dataset"] = {{"csv", csv->path}};
        } else if (const auto* synth = std::get_if<SyntheticDatasetSpec>(&logi.source)) {
            cost["dataset"] = {{"synthetic",
                                {{"m", synth->m},
                                 {"k", synth->k},
                                 {"seed", synth->seed},
                                 {"weight_scale", synth->weight_scale}}}};
        } else {
            const auto& data = std::get<Dataset>(logi.source);
            json rows = json::array();
            for (Eigen::Index r = 0; r < data.features.rows(); ++r)
                rows.push_back(vector_to_json(data.features.row(r)));
            cost["dataset"] = {{"features", rows}, {"labels", vector_to_json(data.labels)}};
        }
        j["cost"] = std::move(cost);
    }
    json agents = json::array();
    for (const auto& agent : config.agents) {
        json a;
        if (const auto* ent = std::get_if<EntropicSpec>(&agent.risk)) {
            a["risk"] = {{"type", "entropic"},
                         {"theta", ent->theta},
                         {"belief", vector_to_json(ent->belief)}};
        } else if (const auto* var = std::get_if<VaRSpec>(&agent.risk)) {
            a["risk"] = {{"type", "var"},
                         {"alpha", var->alpha},
                         {"belief", vector_to_json(var->belief)}};
        } else {
            const auto& quad = std::get<QuadraticRiskSpec>(agent.risk);
            a["risk"] = {{"type", "quadratic"},
                         {"mu", vector_to_json(quad.mu)},
                         {"scale", quad.scale}};
        }
        a["mode"] = agent.mode == AgentMode::Exact ? "exact" : "gradient_step";
        if (!agent.mask.empty()) {
            json mask = json::array();
            for (bool b : agent.mask) mask.push_back(b);
            a["mask"] = std::move(mask);
        }
        agents.push_back(std::move(a));
    }
    j["agents"] = std::move(agents);
    j["queue"] = {{"policy", config.queue.kind == QueueKind::RoundRobin ? "round_robin"
                                                                        : "random"}};
    j["stop"] = {{"max_rounds", config.stop.max_rounds},
                 {"eps", config.stop.eps},
                 {"window", config.stop.window}};
    j["seed"] = config.seed;
    j["initial_cash"] = config.initial_cash;
    return j;
}

MarketConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw config_error("config parse error in " + path + ": " + e.what());
    }
    return parse_config(j);
}

} // namespace riskmarket
