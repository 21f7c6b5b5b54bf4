#include "cdac/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cdac/errors.hpp"

namespace cdac {

TaskModel EnvironmentConfig::build_model() const {
    if (task == "simple") {
        return SimpleTaskModel(beta).build();
    }
    if (task == "peripheral") {
        return PeripheralTaskModel(betas).build();
    }
    throw ConfigError("unknown task kind '" + task + "' (expected simple or peripheral)");
}

TrialSetup EnvironmentConfig::trial_setup() const {
    TrialSetup setup;
    if (prior.size() > 0) {
        if (prior.size() != build_model().k) {
            throw ConfigError("prior must have one entry per location");
        }
        validate_belief(prior);
    }
    setup.prior = prior;
    setup.step_cap = trial_cap;
    if (initial_fixation == 0) {
        setup.initial_fixation = task == "peripheral" ? l123 : 0;
    } else {
        const TaskModel model = build_model();
        if (initial_fixation < 1 || initial_fixation > model.num_actions) {
            throw ConfigError("initial fixation out of range for this task");
        }
        setup.initial_fixation = initial_fixation - 1;
    }
    return setup;
}

EnvironmentConfig parse_config_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");

    static const std::set<std::string> known = {
        "task",      "c",     "cs",      "beta",       "betas",
        "grid_n",    "prior", "seed",    "trials",     "trial_cap",
        "tol",       "max_sweeps",       "initial_fixation", "infomax_horizon"};
    for (const auto& [key, value] : doc.items()) {
        if (!known.count(key)) {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }

    EnvironmentConfig cfg;
    try {
        if (doc.contains("task")) cfg.task = doc["task"].get<std::string>();
        if (doc.contains("c")) cfg.c = doc["c"].get<double>();
        if (doc.contains("cs")) cfg.cs = doc["cs"].get<double>();
        if (doc.contains("beta")) cfg.beta = doc["beta"].get<double>();
        if (doc.contains("betas")) {
            const auto arr = doc["betas"].get<std::vector<double>>();
            if (arr.size() != 4) throw ConfigError("betas must hold exactly 4 values");
            for (int i = 0; i < 4; ++i) cfg.betas[i] = arr[i];
        }
        if (doc.contains("grid_n")) cfg.grid_n = doc["grid_n"].get<int>();
        if (doc.contains("prior")) {
            const auto arr = doc["prior"].get<std::vector<double>>();
            cfg.prior.resize(static_cast<Eigen::Index>(arr.size()));
            for (std::size_t i = 0; i < arr.size(); ++i) cfg.prior[i] = arr[i];
        }
        if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
        if (doc.contains("trials")) cfg.trials = doc["trials"].get<int>();
        if (doc.contains("trial_cap")) cfg.trial_cap = doc["trial_cap"].get<int>();
        if (doc.contains("tol")) cfg.tol = doc["tol"].get<double>();
        if (doc.contains("max_sweeps")) cfg.max_sweeps = doc["max_sweeps"].get<int>();
        if (doc.contains("initial_fixation")) {
            cfg.initial_fixation = doc["initial_fixation"].get<int>();
        }
        if (doc.contains("infomax_horizon")) {
            cfg.infomax_horizon = doc["infomax_horizon"].get<int>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config field has the wrong type: ") + e.what());
    }

    // Fail fast on anything the models would reject later.
    cfg.build_model();
    cfg.cost_params();
    cfg.trial_setup();
    if (cfg.grid_n < 1) throw ConfigError("grid_n must be >= 1");
    if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
    if (cfg.trial_cap < 1) throw ConfigError("trial_cap must be >= 1");
    if (!(cfg.tol > 0.0)) throw ConfigError("tol must be positive");
    if (cfg.max_sweeps < 1) throw ConfigError("max_sweeps must be >= 1");
    if (cfg.infomax_horizon < 1) throw ConfigError("infomax_horizon must be >= 1");
    return cfg;
}

EnvironmentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_json(buf.str());
}

} // namespace cdac
