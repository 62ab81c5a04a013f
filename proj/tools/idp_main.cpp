// Command-line frontend: solve instances, replicate the simulation study,
// verify the sequential suboptimality bound, and benchmark planning time.
//
// Exit codes: 0 success, 2 configuration error, 3 internal invariant
// violation (e.g. a bound check failing).

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "idp/baselines.hpp"
#include "idp/config.hpp"
#include "idp/oracle.hpp"
#include "idp/sim.hpp"
#include "idp/solver_exact.hpp"
#include "idp/solver_seq.hpp"

namespace {

using namespace idp;
using nlohmann::json;

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

/// Offers are printed with 1-based labels, matching the a_n / delta_k naming.
std::string format_offer(Offer offer) {
    return "a" + std::to_string(offer.action + 1) + ":d" +
           std::to_string(offer.incentive + 1);
}

std::string format_decision(const Decision& d) {
    return std::string(d.commit ? "commit " : "probe ") + format_offer(d.offer);
}

void log_resolved_config(const ExperimentConfig& config) {
    std::cerr << "# resolved config\n" << serialize_config(config) << "# end config\n";
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open output file: " + path);
    out << content;
}

bool has_algorithm(const ExperimentConfig& config, const std::string& name) {
    for (const auto& a : config.algorithms)
        if (a == name) return true;
    return false;
}

void check_algorithms(const ExperimentConfig& config) {
    for (const auto& a : config.algorithms)
        if (a != "exact" && a != "seq" && a != "greedy" && a != "daa" && a != "descend")
            throw ValidationError("unknown algorithm: " + a);
    if (config.algorithms.empty()) throw ValidationError("algorithms must be nonempty");
}

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                     t0)
        .count();
}

struct SolvedAlgorithm {
    std::string name;
    double value = 0.0;
    Decision first{};
    std::size_t states = 0;
    double plan_ms = 0.0;
    DeciderFactory factory;
};

/// Plans one algorithm for one horizon (or the discounted infinite horizon)
/// and wraps it as an episode decider factory.
SolvedAlgorithm plan_algorithm(const std::string& name, const IdpModel& model,
                               const JointPrior& prior, int horizon) {
    SolvedAlgorithm out;
    out.name = name;
    const bool infinite = model.discount() < 1.0;
    const auto t0 = std::chrono::steady_clock::now();
    if (name == "exact") {
        if (infinite) {
            auto sol = std::make_shared<const ExactInfiniteSolution>(
                solve_infinite(model, prior));
            out.plan_ms = ms_since(t0);
            out.value = sol->root().value;
            out.first = sol->root().decision;
            out.states = sol->state_count();
            out.factory = [sol] { return std::make_unique<ExactInfinitePolicy>(sol); };
        } else {
            auto sol = std::make_shared<const ExactFiniteSolution>(
                solve_finite(model, prior, horizon));
            out.plan_ms = ms_since(t0);
            out.value = sol->root().value;
            out.first = sol->root().decision;
            out.states = sol->state_count();
            out.factory = [sol] { return std::make_unique<ExactFinitePolicy>(sol); };
        }
    } else if (name == "seq") {
        if (infinite) {
            auto sol = std::make_shared<const SeqInfiniteSolution>(
                solve_seq_infinite(model, prior));
            out.plan_ms = ms_since(t0);
            out.value = sol->root().value;
            out.first = sol->root().decision;
            out.states = sol->state_count();
            out.factory = [sol] { return std::make_unique<SeqInfinitePolicy>(sol); };
        } else {
            auto sol = std::make_shared<const SeqFiniteSolution>(
                solve_seq_finite(model, prior, horizon));
            out.plan_ms = ms_since(t0);
            out.value = sol->root().value;
            out.first = sol->root().decision;
            out.states = sol->state_count();
            out.factory = [sol] { return std::make_unique<SeqFinitePolicy>(sol); };
        }
    } else if (name == "greedy") {
        out.factory = [model, prior] {
            return std::make_unique<GreedyPolicy>(model, prior);
        };
    } else if (name == "daa") {
        out.factory = [model] { return std::make_unique<DaaPolicy>(model); };
    } else if (name == "descend") {
        out.factory = [] { return std::make_unique<DescendProbePolicy>(); };
    } else {
        throw ValidationError("unknown algorithm: " + name);
    }
    return out;
}

int cmd_solve(const ExperimentConfig& config) {
    log_resolved_config(config);
    check_algorithms(config);
    const IdpModel model = config_model(config);
    const JointPrior prior = config_prior(config);
    const bool infinite = config.gamma < 1.0;
    if (!infinite && config.horizons.empty())
        throw ValidationError("horizons must be nonempty");

    json summary = json::array();
    for (const auto& name : config.algorithms) {
        if (name != "exact" && name != "seq") continue;
        const std::vector<int> horizons =
            infinite ? std::vector<int>{0} : config.horizons;
        for (int h : horizons) {
            const SolvedAlgorithm solved = plan_algorithm(name, model, prior, h);
            const std::string horizon_label = infinite ? "inf" : std::to_string(h);
            std::cout << name << " H=" << horizon_label
                      << " value=" << format_number(solved.value)
                      << " first=" << format_decision(solved.first)
                      << " states=" << solved.states
                      << " plan_ms=" << format_number(solved.plan_ms) << "\n";
            summary.push_back({{"algorithm", name},
                               {"horizon", horizon_label},
                               {"value", solved.value},
                               {"first_offer", format_decision(solved.first)},
                               {"states", solved.states},
                               {"plan_ms", solved.plan_ms}});
        }
    }
    if (!config.output.empty()) write_text_file(config.output, summary.dump(2) + "\n");
    return 0;
}

int cmd_compare(const ExperimentConfig& config) {
    log_resolved_config(config);
    check_algorithms(config);
    if (config.horizons.empty()) throw ValidationError("horizons must be nonempty");
    const IdpModel model = config_model(config);
    const JointPrior prior = config_prior(config);

    std::ostringstream rounds_csv;
    std::ostringstream summary_csv;
    rounds_csv << "algorithm,N,K,eta,H,round,mean_cost,plan_time_ms\n";
    summary_csv << "algorithm,H,grand_mean,stderr,ratio_to_exact\n";

    for (int h : config.horizons) {
        double exact_mean = 0.0;
        bool have_exact = false;
        std::vector<std::pair<std::string, McStats>> results;
        std::vector<double> plan_times;
        for (const auto& name : config.algorithms) {
            const SolvedAlgorithm solved = plan_algorithm(name, model, prior, h);
            const McStats stats = monte_carlo(model, prior, solved.factory, h,
                                              config.runs, config.rounds, config.seed);
            if (name == "exact") {
                exact_mean = stats.grand_mean;
                have_exact = true;
            }
            results.emplace_back(name, stats);
            plan_times.push_back(solved.plan_ms);
        }
        for (std::size_t i = 0; i < results.size(); ++i) {
            const auto& [name, stats] = results[i];
            for (int r = 0; r < stats.rounds; ++r) {
                rounds_csv << name << ',' << config.n_actions << ',' << config.n_incentives
                           << ',' << format_number(config.eta) << ',' << h << ',' << r
                           << ',' << format_number(stats.round_means[r]) << ','
                           << format_number(plan_times[i]) << "\n";
            }
            summary_csv << name << ',' << h << ',' << format_number(stats.grand_mean)
                        << ',' << format_number(stats.std_error()) << ',';
            if (have_exact && exact_mean > 0.0)
                summary_csv << format_number(stats.grand_mean / exact_mean);
            summary_csv << "\n";
        }
    }

    if (config.output.empty()) {
        std::cout << summary_csv.str();
    } else {
        write_text_file(config.output + "_rounds.csv", rounds_csv.str());
        write_text_file(config.output + "_summary.csv", summary_csv.str());
        std::cerr << "wrote " << config.output << "_rounds.csv and " << config.output
                  << "_summary.csv\n";
    }
    return 0;
}

int cmd_bound(const ExperimentConfig& config) {
    log_resolved_config(config);
    const IdpModel model = config_model(config);
    const JointPrior prior = config_prior(config);
    const double forward = seq_bound(model).slack;
    const double reverse = seq_bound_alt(model).slack;
    const bool infinite = config.gamma < 1.0;
    if (!infinite && config.horizons.empty())
        throw ValidationError("horizons must be nonempty");

    json report = json::array();
    const std::vector<int> horizons = infinite ? std::vector<int>{0} : config.horizons;
    for (int h : horizons) {
        double v_exact, v_seq;
        if (infinite) {
            v_exact = solve_infinite(model, prior).root().value;
            v_seq = solve_seq_infinite(model, prior).root().value;
        } else {
            v_exact = solve_finite(model, prior, h).root().value;
            v_seq = solve_seq_finite(model, prior, h).root().value;
        }
        const double gap = v_seq - v_exact;
        const std::string horizon_label = infinite ? "inf" : std::to_string(h);
        std::cout << "H=" << horizon_label << " V_exact=" << format_number(v_exact)
                  << " V_seq=" << format_number(v_seq) << " gap=" << format_number(gap)
                  << " forward_slack=" << format_number(forward)
                  << " reverse_slack=" << format_number(reverse) << "\n";
        report.push_back({{"horizon", horizon_label},
                          {"v_exact", v_exact},
                          {"v_seq", v_seq},
                          {"gap", gap},
                          {"forward_slack", forward},
                          {"reverse_slack", reverse}});
        if (gap < -1e-9 || gap > forward + 1e-9)
            throw BoundViolation("sequential bound violated at H=" + horizon_label +
                                 ": gap " + format_number(gap) + " vs slack " +
                                 format_number(forward));
    }
    std::cout << "bound holds: 0 <= gap <= forward slack\n";
    if (!config.output.empty()) write_text_file(config.output, report.dump(2) + "\n");
    return 0;
}

int cmd_bench(const ExperimentConfig& config) {
    log_resolved_config(config);
    check_algorithms(config);
    const int horizon = config.horizons.empty() ? 20 : config.horizons.front();

    std::vector<std::pair<IdpModel, JointPrior>> grid;
    for (int n : config.grid_actions) {
        for (int k : config.grid_incentives) {
            ExperimentConfig cell = config;
            cell.n_actions = n;
            cell.n_incentives = k;
            grid.emplace_back(config_model(cell), uniform_monotone_prior(n, k));
        }
    }

    std::vector<std::pair<std::string, Planner>> algorithms;
    const bool infinite = config.gamma < 1.0;
    if (has_algorithm(config, "exact"))
        algorithms.emplace_back("exact", [=](const IdpModel& m, const JointPrior& p) {
            if (infinite)
                solve_infinite(m, p);
            else
                solve_finite(m, p, horizon);
        });
    if (has_algorithm(config, "seq"))
        algorithms.emplace_back("seq", [=](const IdpModel& m, const JointPrior& p) {
            if (infinite)
                solve_seq_infinite(m, p);
            else
                solve_seq_finite(m, p, horizon);
        });

    std::ostringstream csv;
    csv << "algorithm,N,K,median_plan_time_ms\n";
    for (const auto& row : bench_planning(grid, algorithms, 5))
        csv << row.algorithm << ',' << row.n_actions << ',' << row.n_incentives << ','
            << format_number(row.median_ms) << "\n";

    if (config.output.empty())
        std::cout << csv.str();
    else
        write_text_file(config.output, csv.str());
    return 0;
}

int cmd_simulate(const ExperimentConfig& config, const std::string& algorithm,
                 const std::string& truth_spec) {
    log_resolved_config(config);
    if (config.horizons.empty()) throw ValidationError("horizons must be nonempty");
    const int horizon = config.horizons.front();
    const IdpModel model = config_model(config);
    const JointPrior prior = config_prior(config);

    TrueIncentives truth{};
    if (truth_spec.empty()) {
        SplitMix64 rng(derive_stream_seed(config.seed, 0, 0));
        truth = sample_true_incentives(prior, rng);
    } else {
        std::vector<int> thresholds = parse_int_list(truth_spec);
        for (int& t : thresholds) --t; // CLI uses 1-based rungs
        truth = make_true_incentives(std::move(thresholds), config.n_incentives);
    }

    const SolvedAlgorithm solved = plan_algorithm(algorithm, model, prior, horizon);
    auto decider = solved.factory();
    decider->reset(model, prior);
    const EpisodeTrace trace = run_episode(model, *decider, truth, horizon);

    std::cout << "true thresholds:";
    for (int t : truth.thresholds) std::cout << " d" << t + 1;
    std::cout << "\nstep,offer,outcome,cost\n";
    for (const auto& step : trace.steps)
        std::cout << step.step + 1 << ',' << format_offer(step.offer) << ','
                  << (step.outcome == Outcome::Accept ? "accept" : "reject") << ','
                  << format_number(step.cost) << "\n";
    std::cout << "total cost: " << format_number(trace.total_cost) << "\n";
    return 0;
}

/// Pre-scan for --config so file values become the defaults that explicit
/// flags then override.
ExperimentConfig load_base_config(int argc, char** argv) {
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            std::ifstream in(argv[i + 1]);
            if (!in) throw ValidationError(std::string("cannot read config file: ") +
                                           argv[i + 1]);
            std::ostringstream text;
            text << in.rdbuf();
            return parse_config(text.str());
        }
    }
    return ExperimentConfig{};
}

} // namespace

int main(int argc, char** argv) {
    try {
        ExperimentConfig config = load_base_config(argc, argv);

        CLI::App app{"Planning and simulation toolkit for incentive decision processes"};
        app.require_subcommand(1);

        std::string config_path, horizons_spec, grid_n_spec, grid_k_spec;
        std::string algorithms_spec, algorithm = "exact", truth_spec;

        auto add_common = [&](CLI::App* cmd) {
            cmd->add_option("--config", config_path, "config file (flat key = value)");
            cmd->add_option("--n,--n-actions", config.n_actions, "alternate actions");
            cmd->add_option("--k,--n-incentives", config.n_incentives, "incentive rungs");
            cmd->add_option("--eta", config.eta, "action cost exponent");
            cmd->add_option("--default-cost", config.default_cost, "default action cost");
            cmd->add_option("--gamma", config.gamma, "discount factor");
            cmd->add_option("--horizon,--horizons", horizons_spec,
                            "horizon list, e.g. 1-20 or 1,5,20");
            cmd->add_option("--prior", config.prior, "uniform or inline table");
            cmd->add_option("--algorithms", algorithms_spec,
                            "subset of exact,seq,greedy,daa,descend");
            cmd->add_option("--runs", config.runs, "episodes per round");
            cmd->add_option("--rounds", config.rounds, "rounds");
            cmd->add_option("--seed", config.seed, "master seed");
            cmd->add_option("--output,-o", config.output, "output path or prefix");
        };

        CLI::App* solve = app.add_subcommand("solve", "plan and report root values");
        add_common(solve);
        CLI::App* compare =
            app.add_subcommand("compare", "Monte Carlo comparison across horizons");
        add_common(compare);
        CLI::App* bound =
            app.add_subcommand("bound", "verify the sequential suboptimality bound");
        add_common(bound);
        CLI::App* bench = app.add_subcommand("bench", "planning-time benchmark grid");
        add_common(bench);
        bench->add_option("--grid-n", grid_n_spec, "N grid, e.g. 1-6");
        bench->add_option("--grid-k", grid_k_spec, "K grid, e.g. 2-8");
        CLI::App* simulate = app.add_subcommand("simulate", "trace one episode");
        add_common(simulate);
        simulate->add_option("--algorithm", algorithm,
                             "exact, seq, greedy, daa or descend");
        simulate->add_option("--true", truth_spec, "1-based thresholds, e.g. 3,1");

        try {
            app.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            const int code = app.exit(e);
            return code == 0 ? 0 : 2;
        }

        if (!horizons_spec.empty()) config.horizons = parse_int_list(horizons_spec);
        if (!algorithms_spec.empty()) {
            config.algorithms.clear();
            std::istringstream is(algorithms_spec);
            std::string item;
            while (std::getline(is, item, ',')) config.algorithms.push_back(item);
        }
        if (!grid_n_spec.empty()) config.grid_actions = parse_int_list(grid_n_spec);
        if (!grid_k_spec.empty()) config.grid_incentives = parse_int_list(grid_k_spec);

        if (solve->parsed()) return cmd_solve(config);
        if (compare->parsed()) return cmd_compare(config);
        if (bound->parsed()) return cmd_bound(config);
        if (bench->parsed()) return cmd_bench(config);
        if (simulate->parsed()) return cmd_simulate(config, algorithm, truth_spec);
        return 2;
    } catch (const idp::BoundViolation& e) {
        std::cerr << "bound violation: " << e.what() << "\n";
        return 3;
    } catch (const idp::UnreachableNode& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    } catch (const idp::InstanceTooLarge& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const idp::ValidationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::runtime_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
