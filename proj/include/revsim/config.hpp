#pragma once

#include <cstdint>
#include <string>

#include "revsim/bellman.hpp"
#include "revsim/params.hpp"

#include "json.hpp"

namespace revsim {

struct SimBatchConfig {
    std::int64_t episodes = 10000;
    int horizon = 0;  // 0 = auto: smallest T with a value tail below 1e-3
    std::uint64_t master_seed = 12345;
};

struct OutputConfig {
    std::string dir = ".";
    std::string format = "csv";  // csv | json
};

// Full run configuration.  Defaults are the worked-example parameterization
// (H = 3, L = 0, c = 1, sigma = 4) with beta = 0.9 and p1 = 0.5.
struct RunConfig {
    ModelParams model;
    std::string signal_family = "gaussian";
    double sigma = 4.0;
    Numerics numerics;
    SimBatchConfig sim;
    OutputConfig output;

    static RunConfig defaults() { return RunConfig{}; }

    // Throws ConfigError naming the offending field; unknown keys are errors.
    static RunConfig from_json(const nlohmann::json& j);
    static RunConfig load_file(const std::string& path);

    nlohmann::json to_json() const;

    // Applies a "section.key=value" override (the --set mechanism).
    void apply_override(const std::string& spec);

    // Validates every field; throws ConfigError on the first violation.
    void validate() const;
};

}  // namespace revsim
