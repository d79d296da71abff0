// fpp: first-passage-percolation experiments on sparse random graphs.
// Subcommands: params, wbank, moments, renewal, simulate, limits, verify-all.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "fpp/cox.hpp"
#include "fpp/harness.hpp"
#include "fpp/renewal.hpp"
#include "fpp/verify.hpp"
#include "fpp/w_process.hpp"

namespace {

using namespace fpp;

// "exp:1", "uniform:0:1", "finite:1=0.5,2=0.5", "zeromix:0.25:exp:1"
WeightModel parse_weights(const std::string& spec) {
    auto next = [](std::string& s) {
        auto pos = s.find(':');
        std::string head = s.substr(0, pos);
        s = pos == std::string::npos ? "" : s.substr(pos + 1);
        return head;
    };
    std::string rest = spec;
    std::string kind = next(rest);
    if (kind == "exp") return WeightModel::exponential(std::stod(rest));
    if (kind == "uniform") {
        double lo = std::stod(next(rest));
        return WeightModel::uniform_interval(lo, std::stod(rest));
    }
    if (kind == "finite") {
        std::vector<std::pair<double, double>> support;
        std::stringstream ss(rest);
        std::string item;
        while (std::getline(ss, item, ',')) {
            auto eq = item.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("finite support entries look like value=prob");
            support.emplace_back(std::stod(item.substr(0, eq)), std::stod(item.substr(eq + 1)));
        }
        return WeightModel::finite_support(support);
    }
    if (kind == "zeromix") {
        double q = std::stod(next(rest));
        return WeightModel::zero_mix(q, parse_weights(rest));
    }
    throw std::invalid_argument("unknown weight spec \"" + spec + "\"");
}

int default_threads() {
    if (const char* env = std::getenv("FPP_THREADS")) {
        int t = std::atoi(env);
        if (t >= 1) return t;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

std::vector<double> parse_grid(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

std::ofstream open_fresh(const std::string& path, bool force) {
    if (!force && std::filesystem::exists(path))
        throw std::invalid_argument(path + " exists (use --force to overwrite)");
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    return os;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"first passage percolation on sparse random graphs"};
    app.require_subcommand(1);

    std::string weights = "exp:1", config_path, out_path, bank_path, grid_spec;
    double lambda = 2.0;
    long long n = 10000;
    int rmax = 5, depth = 40, threads = 0;
    std::size_t count = 100000;
    std::uint64_t seed = 1;
    bool force = false, quick = false, single = false;

    auto add_model_flags = [&](CLI::App* cmd) {
        cmd->add_option("--lambda", lambda, "mean degree, > 1");
        cmd->add_option("--weights", weights, "weight law, e.g. exp:1, finite:1=0.5,2=0.5");
    };

    auto* cmd_params = app.add_subcommand("params", "print the derived limit constants");
    add_model_flags(cmd_params);

    auto* cmd_wbank = app.add_subcommand("wbank", "sample and persist a W bank");
    add_model_flags(cmd_wbank);
    cmd_wbank->add_option("--depth", depth, "fixed-point iteration depth");
    cmd_wbank->add_option("--count", count, "bank size");
    cmd_wbank->add_option("--seed", seed, "master seed");
    cmd_wbank->add_option("--out", out_path, "output file")->required();
    cmd_wbank->add_flag("--single", single, "one value per line instead of (W1,W2) pairs");
    cmd_wbank->add_flag("--force", force, "overwrite an existing file");

    auto* cmd_moments = app.add_subcommand("moments", "exact moments of W");
    add_model_flags(cmd_moments);
    cmd_moments->add_option("--rmax", rmax, "highest moment order");

    auto* cmd_renewal = app.add_subcommand("renewal", "renewal function ratio table (CSV)");
    add_model_flags(cmd_renewal);
    cmd_renewal->add_option("--grid", grid_spec, "comma-separated x values")->required();
    cmd_renewal->add_option("--out", out_path, "output file (default stdout)");
    cmd_renewal->add_flag("--force", force, "overwrite an existing file");

    auto* cmd_sim = app.add_subcommand("simulate", "run a replicated experiment");
    cmd_sim->add_option("--config", config_path, "experiment config JSON")->required();
    cmd_sim->add_option("--out", out_path, "report directory")->required();
    auto* sim_seed = cmd_sim->add_option("--seed", seed, "override the config seed");
    cmd_sim->add_option("--threads", threads, "worker threads (default: FPP_THREADS or cores)");
    cmd_sim->add_flag("--force", force, "overwrite an existing report");

    auto* cmd_limits = app.add_subcommand("limits", "limit-law CDF/PMF table from a W bank (CSV)");
    add_model_flags(cmd_limits);
    cmd_limits->add_option("--bank", bank_path, "persisted (W1,W2) bank")->required();
    cmd_limits->add_option("--n", n, "graph size fixing the lattice offset");
    cmd_limits->add_option("--grid", grid_spec, "comma-separated u values")->required();
    cmd_limits->add_option("--out", out_path, "output file (default stdout)");
    cmd_limits->add_flag("--force", force, "overwrite an existing file");

    auto* cmd_verify = app.add_subcommand("verify-all", "run the full acceptance suite");
    cmd_verify->add_option("--seed", seed, "master seed");
    cmd_verify->add_option("--out", out_path, "work/report directory");
    cmd_verify->add_option("--threads", threads, "worker threads");
    cmd_verify->add_flag("--quick", quick, "reduced replication counts (smoke run)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (threads == 0) threads = default_threads();

        if (*cmd_params) {
            WeightModel model = parse_weights(weights);
            LimitParams p = build_params(model, lambda);
            std::cout << p.to_json().dump(2) << "\n";
            return 0;
        }

        if (*cmd_wbank) {
            WeightModel model = parse_weights(weights);
            LimitParams p = build_params(model, lambda);
            auto os = open_fresh(out_path, force);
            if (single) {
                RandomStream rng = RandomStream::derive(seed, "wbank1", 0);
                auto bank = sample_w_bank(p, model, depth, count, rng);
                char buf[40];
                for (double w : bank) {
                    std::snprintf(buf, sizeof(buf), "%.17g\n", w);
                    os << buf;
                }
            } else {
                RandomStream r1 = RandomStream::derive(seed, "wbank1", 0);
                RandomStream r2 = RandomStream::derive(seed, "wbank2", 0);
                auto b1 = sample_w_bank(p, model, depth, count, r1);
                auto b2 = sample_w_bank(p, model, depth, count, r2);
                std::vector<std::pair<double, double>> bank(count);
                for (std::size_t i = 0; i < count; ++i) bank[i] = {b1[i], b2[i]};
                save_w_pairs(bank, os);
            }
            std::cerr << "wrote " << count << " samples to " << out_path << "\n";
            return 0;
        }

        if (*cmd_moments) {
            WeightModel model = parse_weights(weights);
            LimitParams p = build_params(model, lambda);
            MomentTable t = moment_table(p, model, rmax);
            nlohmann::json j{{"r_max", t.r_max}, {"ew", t.ew}, {"mr", t.mr}};
            std::cout << j.dump(2) << "\n";
            return 0;
        }

        if (*cmd_renewal) {
            WeightModel model = parse_weights(weights);
            LimitParams p = build_params(model, lambda);
            auto grid = parse_grid(grid_spec);
            if (out_path.empty()) {
                ratio_table(model, lambda, p.alpha, grid, std::cout);
            } else {
                auto os = open_fresh(out_path, force);
                ratio_table(model, lambda, p.alpha, grid, os);
            }
            return 0;
        }

        if (*cmd_sim) {
            std::ifstream is(config_path);
            if (!is) throw std::invalid_argument("cannot read config " + config_path);
            nlohmann::json j = nlohmann::json::parse(is);
            ExperimentConfig c = ExperimentConfig::from_json(j);
            if (sim_seed->count() > 0) c.seed = seed;
            c.threads = threads;
            std::cerr << "running " << c.replications << " replications at n=" << c.n << "\n";
            ExperimentReport rep = run_experiment(c);
            write_report(rep, out_path, force);
            std::cerr << "report written to " << out_path << "\n";
            return 0;
        }

        if (*cmd_limits) {
            WeightModel model = parse_weights(weights);
            LimitParams p = build_params(model, lambda);
            std::ifstream is(bank_path);
            if (!is) throw std::invalid_argument("cannot read bank " + bank_path);
            auto bank = load_w_pairs(is);
            auto grid = parse_grid(grid_spec);
            std::ostringstream table;
            table << "z,u,value,mc_stderr\n";
            char buf[160];
            if (p.span) {
                IntensitySpec spec = IntensitySpec::lattice(p, subsequence_offset(p, n));
                for (double u : grid) {
                    auto r = pmf_arithmetic_min(
                        spec, u, 1, {std::numeric_limits<double>::infinity()}, bank);
                    std::snprintf(buf, sizeof(buf), "inf,%.17g,%.17g,%.17g\n", u, r.mean,
                                  r.stderr_);
                    table << buf;
                }
            } else {
                IntensitySpec spec = IntensitySpec::nonarithmetic(p);
                for (double u : grid) {
                    auto r = cdf_joint_min(spec, std::numeric_limits<double>::infinity(), u, bank);
                    std::snprintf(buf, sizeof(buf), "inf,%.17g,%.17g,%.17g\n", u, r.mean,
                                  r.stderr_);
                    table << buf;
                }
            }
            if (out_path.empty()) {
                std::cout << table.str();
            } else {
                auto os = open_fresh(out_path, force);
                os << table.str();
            }
            return 0;
        }

        if (*cmd_verify) {
            AcceptanceOptions opt;
            opt.seed = seed;
            opt.threads = threads;
            opt.quick = quick;
            if (!out_path.empty()) opt.work_dir = out_path;
            std::filesystem::create_directories(opt.work_dir);
            auto results = run_acceptance(opt, std::cout);
            nlohmann::json j = nlohmann::json::array();
            for (auto& r : results)
                j.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass},
                             {"detail", r.detail}});
            std::ofstream os(std::filesystem::path(opt.work_dir) / "acceptance.json");
            os << j.dump(2) << "\n";
            return all_passed(results) ? 0 : 2;
        }
    } catch (const BudgetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
