#include "revsim/config.hpp"

#include <fstream>

namespace revsim {

namespace {

void check_keys(const nlohmann::json& j, const char* section,
                std::initializer_list<const char*> allowed) {
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) { ok = true; break; }
        if (!ok)
            throw ConfigError(std::string(section) + "." + key + ": unknown field");
    }
}

template <typename T>
void read(const nlohmann::json& j, const char* section, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        j.at(key).get_to(out);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string(section) + "." + key + ": " + e.what());
    }
}

}  // namespace

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    RunConfig cfg;
    check_keys(j, "config", {"model", "signal", "numerics", "sim", "output"});
    if (j.contains("model")) {
        const auto& m = j.at("model");
        check_keys(m, "model", {"H", "L", "c", "beta", "p1"});
        read(m, "model", "H", cfg.model.H);
        read(m, "model", "L", cfg.model.L);
        read(m, "model", "c", cfg.model.c);
        read(m, "model", "beta", cfg.model.beta);
        read(m, "model", "p1", cfg.model.p1);
    }
    if (j.contains("signal")) {
        const auto& s = j.at("signal");
        check_keys(s, "signal", {"family", "sigma"});
        read(s, "signal", "family", cfg.signal_family);
        read(s, "signal", "sigma", cfg.sigma);
    }
    if (j.contains("numerics")) {
        const auto& n = j.at("numerics");
        check_keys(n, "numerics",
                   {"grid_n", "tol_value", "tol_root", "quad_nodes", "quad_panels",
                    "max_iters"});
        read(n, "numerics", "grid_n", cfg.numerics.grid_n);
        read(n, "numerics", "tol_value", cfg.numerics.tol_value);
        read(n, "numerics", "tol_root", cfg.numerics.tol_root);
        read(n, "numerics", "quad_nodes", cfg.numerics.quad_nodes);
        read(n, "numerics", "quad_panels", cfg.numerics.quad_panels);
        read(n, "numerics", "max_iters", cfg.numerics.max_iters);
    }
    if (j.contains("sim")) {
        const auto& s = j.at("sim");
        check_keys(s, "sim", {"episodes", "horizon", "master_seed"});
        read(s, "sim", "episodes", cfg.sim.episodes);
        read(s, "sim", "horizon", cfg.sim.horizon);
        read(s, "sim", "master_seed", cfg.sim.master_seed);
    }
    if (j.contains("output")) {
        const auto& o = j.at("output");
        check_keys(o, "output", {"dir", "format"});
        read(o, "output", "dir", cfg.output.dir);
        read(o, "output", "format", cfg.output.format);
    }
    return cfg;
}

RunConfig RunConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config file not readable: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file " + path + ": " + e.what());
    }
    return from_json(j);
}

nlohmann::json RunConfig::to_json() const {
    return nlohmann::json{
        {"model",
         {{"H", model.H}, {"L", model.L}, {"c", model.c}, {"beta", model.beta},
          {"p1", model.p1}}},
        {"signal", {{"family", signal_family}, {"sigma", sigma}}},
        {"numerics",
         {{"grid_n", numerics.grid_n},
          {"tol_value", numerics.tol_value},
          {"tol_root", numerics.tol_root},
          {"quad_nodes", numerics.quad_nodes},
          {"quad_panels", numerics.quad_panels},
          {"max_iters", numerics.max_iters}}},
        {"sim",
         {{"episodes", sim.episodes},
          {"horizon", sim.horizon},
          {"master_seed", sim.master_seed}}},
        {"output", {{"dir", output.dir}, {"format", output.format}}}};
}

void RunConfig::apply_override(const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
        throw ConfigError("--set expects key=value, got: " + spec);
    std::string key = spec.substr(0, eq);
    const std::string value = spec.substr(eq + 1);

    nlohmann::json j = to_json();
    std::string pointer = "/";
    for (char ch : key) pointer += (ch == '.') ? '/' : ch;
    const nlohmann::json::json_pointer ptr(pointer);

    nlohmann::json current;
    try {
        current = j.at(ptr);
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("--set " + key + ": unknown field");
    }
    // parse the value with the type of the existing field
    try {
        if (current.is_string()) {
            j[ptr] = value;
        } else if (current.is_boolean()) {
            j[ptr] = (value == "true" || value == "1");
        } else if (current.is_number_integer() || current.is_number_unsigned()) {
            j[ptr] = nlohmann::json::parse(value);
            if (!j[ptr].is_number())
                throw ConfigError("--set " + key + ": expected a number");
        } else {
            j[ptr] = std::stod(value);
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("--set " + key + ": cannot parse value '" + value + "'");
    }
    *this = from_json(j);
}

void RunConfig::validate() const {
    model.validate();
    if (signal_family != "gaussian")
        throw ConfigError("signal.family: only 'gaussian' is supported");
    if (!(sigma > 0.0)) throw ConfigError("signal.sigma: must be > 0");
    numerics.validate();
    if (sim.episodes < 1) throw ConfigError("sim.episodes: must be >= 1");
    if (sim.horizon < 0) throw ConfigError("sim.horizon: must be >= 0 (0 = auto)");
    if (output.format != "csv" && output.format != "json")
        throw ConfigError("output.format: must be 'csv' or 'json'");
}

}  // namespace revsim
