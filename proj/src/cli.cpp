#include "revsim/cli.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "revsim/sim.hpp"
#include "revsim/threeperiod.hpp"

namespace revsim::cli {

namespace {

namespace fs = std::filesystem;

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);  // locale-independent
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

fs::path out_path(const RunConfig& cfg, const std::string& name) {
    fs::path dir(cfg.output.dir);
    if (!dir.empty()) fs::create_directories(dir);
    return dir / name;
}

struct CsvWriter {
    explicit CsvWriter(std::string header) { rows.push_back(std::move(header)); }
    void row(std::initializer_list<std::string> cells) {
        std::string line;
        for (const auto& c : cells) {
            if (!line.empty()) line += ',';
            line += c;
        }
        rows.push_back(std::move(line));
    }
    void raw(std::string line) { rows.push_back(std::move(line)); }
    std::string str() const {
        std::string all;
        for (const auto& r : rows) { all += r; all += '\n'; }
        return all;
    }
    std::vector<std::string> rows;
};

ValueSolution solve_from_config(const RunConfig& cfg) {
    GaussianSignal sig(cfg.model, cfg.sigma);
    return solve_commitment(cfg.model, sig, cfg.numerics);
}

bool solution_matches(const ValueSolution& sol, const RunConfig& cfg) {
    const auto& m = sol.params;
    return m.H == cfg.model.H && m.L == cfg.model.L && m.c == cfg.model.c &&
           m.beta == cfg.model.beta && m.p1 == cfg.model.p1 && sol.sigma == cfg.sigma &&
           sol.grid.size() == static_cast<std::size_t>(cfg.numerics.grid_n);
}

// fig3 partition preference: the pinned family (m1 = p_bar) with two
// buy messages; fall back to the smallest-K unpinned family.
std::optional<CheapTalkPartition> fig3_partition(const ThreePeriodModel& tp, double p1) {
    auto pinned = tp.solve_cheaptalk_pinned(p1, 2);
    if (pinned.found) return pinned.partition;
    for (int K = 2; K <= 8; ++K) {
        auto res = tp.solve_cheaptalk(p1, K);
        if (res.found) return res.partition;
    }
    return std::nullopt;
}

int run_guarded(const char* what, const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        std::cerr << what << ": invalid config: " << e.what() << "\n";
        return kBadConfig;
    } catch (const SolveError& e) {
        std::cerr << what << ": " << e.what() << " (residual " << e.residual() << ")\n";
        return kNumericalFailure;
    } catch (const std::exception& e) {
        std::cerr << what << ": " << e.what() << "\n";
        return kNumericalFailure;
    }
}

}  // namespace

std::string solution_summary(const ValueSolution& sol) {
    std::string s = "      p        V*        l*        r*\n";
    const double p_bar = sol.params.p_bar();
    for (int k = 0; k <= 10; ++k) {
        const double p = p_bar + (1.0 - p_bar) * k / 10.0;
        char line[128];
        std::snprintf(line, sizeof line, "%9.6f %9.5f %9.6f %9.6f\n", p, sol.value_at(p),
                      sol.lstar_at(p), sol.rstar_at(p));
        s += line;
    }
    return s;
}

int cmd_solve(const RunConfig& cfg) {
    return run_guarded("solve", [&] {
        cfg.validate();
        const auto sol = solve_from_config(cfg);
        write_text(out_path(cfg, "solution.json"), sol.to_json().dump(2) + "\n");
        std::cout << "solved in " << sol.iterations
                  << " iterations, residual " << fmt(sol.residual) << "\n"
                  << "diagnostics: V^H nondecreasing = "
                  << (sol.vh_nondecreasing ? "yes" : "no")
                  << ", V^L nonincreasing = "
                  << (sol.vl_nonincreasing ? "yes" : "no") << "\n"
                  << solution_summary(sol);
        return kOk;
    });
}

int cmd_figure(const RunConfig& cfg, const std::string& which) {
    return run_guarded("figure", [&] {
        cfg.validate();
        if (which != "fig1" && which != "fig2" && which != "fig3")
            throw ConfigError("figure: expected fig1, fig2 or fig3");
        ThreePeriodModel tp(cfg.model, cfg.sigma, cfg.numerics.quad_nodes,
                            cfg.numerics.quad_panels);
        const int n = 500;
        const auto grid_point = [&](int k) {
            return 0.001 + (0.999 - 0.001) * k / (n - 1);
        };

        if (which == "fig1") {
            CsvWriter csv("p2,vhat_b_half,vhat_b_third,vhat_b_fifth");
            for (int k = 0; k < n; ++k) {
                const double p2 = grid_point(k);
                csv.row({fmt(p2), fmt(tp.vhat(p2, 0.5)), fmt(tp.vhat(p2, 1.0 / 3.0)),
                         fmt(tp.vhat(p2, 0.2))});
            }
            write_text(out_path(cfg, "fig1.csv"), csv.str());
            return kOk;
        }

        const double p1 = cfg.model.p1;
        const auto commit = tp.solve_commitment(p1, cfg.numerics.tol_root);
        if (which == "fig2") {
            CsvWriter csv("b1,vhat_diag,v_truthful,v_commit");
            for (int k = 0; k < n; ++k) {
                const double b1 = grid_point(k);
                const double diag = tp.vhat(b1, b1);
                const double truthful = b1 >= tp.p_bar() ? diag : 0.0;
                csv.row({fmt(b1), fmt(diag), fmt(truthful),
                         fmt(tp.commitment_value_at(commit, b1))});
            }
            write_text(out_path(cfg, "fig2.csv"), csv.str());
            return kOk;
        }

        CsvWriter csv("b1,v_cheaptalk,v_commit");
        const auto part = fig3_partition(tp, p1);
        if (!part) csv.raw("# no cheap-talk equilibrium closes for K <= 8");
        for (int k = 0; k < n; ++k) {
            const double b1 = grid_point(k);
            csv.row({fmt(b1),
                     part ? fmt(tp.cheaptalk_value_at(*part, b1)) : std::string(),
                     fmt(tp.commitment_value_at(commit, b1))});
        }
        write_text(out_path(cfg, "fig3.csv"), csv.str());
        return kOk;
    });
}

int cmd_simulate(const RunConfig& cfg, const std::string& policy_name, bool dump_traces,
                 bool no_auto_solve) {
    return run_guarded("simulate", [&] {
        cfg.validate();
        GaussianSignal sig(cfg.model, cfg.sigma);
        const int horizon =
            cfg.sim.horizon > 0 ? cfg.sim.horizon : auto_horizon(cfg.model);

        // policy construction; owners keep the referenced data alive
        std::optional<ValueSolution> solution;
        std::optional<CheapTalkPartition> partition;
        Policy policy;
        if (policy_name == "truthful") {
            policy = Policy::truthful();
        } else if (policy_name == "babbling") {
            policy = Policy::babbling();
        } else if (policy_name == "commitment") {
            const auto path = out_path(cfg, "solution.json");
            if (fs::exists(path)) {
                std::ifstream in(path);
                nlohmann::json j;
                in >> j;
                auto loaded = ValueSolution::from_json(j);
                if (solution_matches(loaded, cfg)) solution = std::move(loaded);
            }
            if (!solution) {
                if (no_auto_solve)
                    throw ConfigError(
                        "simulate commitment: no matching solution.json and "
                        "--no-auto-solve given");
                solution = solve_from_config(cfg);
                write_text(out_path(cfg, "solution.json"),
                           solution->to_json().dump(2) + "\n");
            }
            policy = Policy::commitment(*solution);
        } else if (policy_name == "cheaptalk3p") {
            ThreePeriodModel tp(cfg.model, cfg.sigma, cfg.numerics.quad_nodes,
                            cfg.numerics.quad_panels);
            partition = fig3_partition(tp, cfg.model.p1);
            if (!partition) {
                // report non-existence rather than failing
                nlohmann::json j{{"policy", policy_name},
                                 {"no_equilibrium", true},
                                 {"note", "no cheap-talk partition closes for K <= 8"}};
                write_text(out_path(cfg, "sim_" + policy_name + ".json"),
                           j.dump(2) + "\n");
                std::cout << "cheaptalk3p: no equilibrium for K <= 8; nothing to simulate\n";
                return kOk;
            }
            policy = Policy::cheaptalk3p(*partition);
        } else {
            throw ConfigError(
                "simulate: policy must be commitment|truthful|babbling|cheaptalk3p");
        }

        const auto stats = run_batch(policy, cfg.model, sig, horizon, cfg.sim.episodes,
                                     cfg.sim.master_seed);
        nlohmann::json j = stats.to_json();
        j["policy"] = policy_name;
        j["params"] = cfg.to_json();
        if (partition) {
            j["partition"] = {{"thresholds", partition->thresholds},
                              {"messages", partition->messages},
                              {"residual", partition->residual},
                              {"pinned_m1", partition->pinned_m1}};
        }
        write_text(out_path(cfg, "sim_" + policy_name + ".json"), j.dump(2) + "\n");
        std::cout << "policy " << policy_name << ": mean welfare "
                  << fmt(stats.mean_welfare) << " +/- " << fmt(stats.std_error)
                  << " (SE), stop-cascade freq " << fmt(stats.stop_cascade_freq) << "\n";

        if (dump_traces) {
            const std::int64_t cap = std::min<std::int64_t>(cfg.sim.episodes, 10000);
            CsvWriter csv("episode,t,theta,p,bought,v,b,next_p");
            for (std::int64_t k = 0; k < cap; ++k) {
                std::mt19937_64 rng(episode_seed(cfg.sim.master_seed, k));
                const auto trace = run_episode(policy, cfg.model, sig, horizon, rng);
                for (std::size_t t = 0; t < trace.records.size(); ++t) {
                    const auto& rec = trace.records[t];
                    csv.row({std::to_string(k), std::to_string(t + 1),
                             to_string(trace.theta), fmt(rec.p),
                             rec.bought ? "1" : "0",
                             rec.bought ? fmt(rec.v) : std::string(),
                             rec.bought ? fmt(rec.b) : std::string(),
                             rec.bought ? fmt(rec.next_p) : std::string()});
                }
            }
            write_text(out_path(cfg, "traces_" + policy_name + ".csv"), csv.str());
        }
        return kOk;
    });
}

int cmd_sweep(const RunConfig& cfg, const std::string& param,
              const std::vector<double>& values) {
    return run_guarded("sweep", [&] {
        cfg.validate();
        if (param != "beta" && param != "sigma" && param != "c" && param != "p1")
            throw ConfigError("sweep: parameter must be beta|sigma|c|p1");
        CsvWriter csv(param + ",vstar_p1,lstar_p1,rstar_p1,pooling_width");
        for (double v : values) {
            RunConfig swept = cfg;
            if (param == "beta") swept.model.beta = v;
            else if (param == "sigma") swept.sigma = v;
            else if (param == "c") swept.model.c = v;
            else swept.model.p1 = v;
            try {
                swept.validate();
            } catch (const ConfigError& e) {
                std::cerr << "sweep: skipping " << param << "=" << fmt(v) << ": "
                          << e.what() << "\n";
                continue;
            }
            const auto sol = solve_from_config(swept);
            const double p1 = swept.model.p1;
            if (p1 < swept.model.p_bar()) {
                std::cerr << "sweep: " << param << "=" << fmt(v)
                          << ": p1 below threshold, market closed at the prior\n";
                csv.row({fmt(v), fmt(0.0), "", "", ""});
                continue;
            }
            const double l = sol.lstar_at(p1), r = sol.rstar_at(p1);
            csv.row({fmt(v), fmt(sol.value_at(p1)), fmt(l), fmt(r), fmt(r - l)});
        }
        write_text(out_path(cfg, "sweep_" + param + ".csv"), csv.str());
        return kOk;
    });
}

int cmd_config(const RunConfig& cfg, bool print_defaults) {
    return run_guarded("config", [&] {
        const RunConfig& shown = print_defaults ? RunConfig{} : cfg;
        std::cout << shown.to_json().dump(2) << "\n";
        return kOk;
    });
}

}  // namespace revsim::cli
