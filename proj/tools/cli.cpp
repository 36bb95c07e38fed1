#include "cli.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "qnes/analysis.hpp"
#include "qnes/error.hpp"

namespace qnes::cli
{
    std::filesystem::path default_output_dir()
    {
        if (const char *env = std::getenv("QNES_OUTPUT_DIR"); env && *env)
            return env;
        return ".";
    }

    StrategyParams resolve_params(const ExperimentConfig &cfg, const Cell &cell)
    {
        const int d = cell.dim;
        StrategyParams base = default_params(d, cell.kind);
        const int lambda = cfg.lambda_tilde.value_or(base.lambda_tilde);
        if (cell.kind == Algorithm::qnes && lambda % d != 0)
            throw InvalidInput("--lambda must be a multiple of the dimension for qnes");

        StrategyParams p = params_for(d, lambda, cfg.kappa.value_or(base.kappa), cfg.eta_a.value_or(base.eta_a));
        if (cfg.c_s)
        {
            if (!(*cfg.c_s > 0.0 && *cfg.c_s <= 1.0))
                throw InvalidInput("--cs must lie in (0, 1]");
            p.c_s = *cfg.c_s;
        }
        if (cfg.d_s)
        {
            if (!(*cfg.d_s > 0.0))
                throw InvalidInput("--ds must be positive");
            p.d_s = *cfg.d_s;
        }
        p.gradient_mode = parse_gradient_mode(cfg.gradient_mode);
        p.csa_mode = parse_csa_mode(cfg.csa_mode);
        return p;
    }

    StoppingCriteria resolve_stopping(const ExperimentConfig &cfg, int d)
    {
        StoppingCriteria stop = StoppingCriteria::defaults(d);
        if (!(cfg.target > 0.0))
            throw InvalidInput("--target must be positive");
        stop.target_gap = cfg.target;
        if (cfg.budget)
        {
            if (*cfg.budget < 1)
                throw InvalidInput("--budget must be positive");
            stop.max_evals = *cfg.budget;
        }
        if (cfg.stagnation_window)
        {
            if (*cfg.stagnation_window < 1)
                throw InvalidInput("--stagnation-window must be positive");
            stop.stagnation_window = *cfg.stagnation_window;
        }
        stop.stagnation_tol = cfg.stagnation_tol;
        return stop;
    }

    RunLog execute(const ExperimentConfig &cfg, const Cell &cell)
    {
        const Objective obj = make_benchmark(cell.benchmark, cell.dim);
        const StrategyParams params = resolve_params(cfg, cell);
        const StoppingCriteria stop = resolve_stopping(cfg, cell.dim);
        if (!(cfg.sigma0 > 0.0) || !(cfg.box_low < cfg.box_high))
            throw InvalidInput("need --sigma0 > 0 and --box-low < --box-high");
        InitialConditions init;
        init.sigma0 = cfg.sigma0;
        init.box_low = cfg.box_low;
        init.box_high = cfg.box_high;

        if (cfg.restart)
        {
            RestartPolicy policy;
            policy.max_restarts = cfg.max_restarts;
            return ipop_run(cell.kind, obj, params, stop, policy, cell.seed, init);
        }
        return run(cell.kind, obj, params, stop, cell.seed, init);
    }

    std::string cell_filename(const Cell &cell)
    {
        return cell.benchmark + "-d" + std::to_string(cell.dim) + "-" + std::string(to_string(cell.kind)) + "-s" +
               std::to_string(cell.seed) + ".csv";
    }

    namespace
    {
        void add_config_options(CLI::App &app, ExperimentConfig &cfg, bool single)
        {
            if (single)
            {
                app.add_option("--benchmark", cfg.benchmarks[0], "Benchmark function")->required();
                app.add_option("--dim", cfg.dims[0], "Search space dimension")->required();
                app.add_option("--algo", cfg.algorithms[0], "hees or qnes")->check(CLI::IsMember({"hees", "qnes"}));
                app.add_option("--seed", cfg.seeds[0], "Random seed");
                app.add_option("--out", cfg.output, "CSV output file");
            }
            else
            {
                cfg.benchmarks.assign(benchmark_names().begin(), benchmark_names().end());
                cfg.algorithms = {"hees", "qnes"};
                cfg.seeds = {1, 2, 3, 4, 5};
                app.add_option("--benchmarks", cfg.benchmarks, "Benchmark functions")->delimiter(',');
                app.add_option("--dims", cfg.dims, "Dimensions")->delimiter(',');
                app.add_option("--algos", cfg.algorithms, "Algorithms")
                    ->delimiter(',')
                    ->check(CLI::IsMember({"hees", "qnes"}));
                app.add_option("--seeds", cfg.seeds, "Seeds")->delimiter(',');
                app.add_option("--out-dir", cfg.output, "Directory for per-run CSVs and summary.csv");
                app.add_option("--jobs", cfg.jobs, "Parallel runs")->check(CLI::PositiveNumber);
            }
            app.add_option("--target", cfg.target, "Stop at f - f* <= target");
            app.add_option("--budget", cfg.budget, "Evaluation budget (default 1e5 * d)");
            app.add_option("--kappa", cfg.kappa, "Curvature truncation ratio (> 1)");
            app.add_option("--eta-a", cfg.eta_a, "Transformation learning rate in (0, 1]");
            app.add_option("--cs", cfg.c_s, "CSA cumulation constant in (0, 1]");
            app.add_option("--ds", cfg.d_s, "CSA damping (> 0)");
            app.add_option("--lambda", cfg.lambda_tilde, "Number of mirrored pairs");
            app.add_option("--gradient-mode", cfg.gradient_mode, "norm or exact")
                ->check(CLI::IsMember({"norm", "exact"}));
            app.add_option("--csa-mode", cfg.csa_mode, "grouped or literal")
                ->check(CLI::IsMember({"grouped", "literal"}));
            app.add_flag("--restart,!--no-restart", cfg.restart, "IPOP restarts");
            app.add_option("--max-restarts", cfg.max_restarts, "Restart limit");
            app.add_option("--stagnation-window", cfg.stagnation_window, "Iterations (default 50 + 10 d)");
            app.add_option("--stagnation-tol", cfg.stagnation_tol, "Relative improvement threshold");
            app.add_option("--sigma0", cfg.sigma0, "Initial step size");
            app.add_option("--box-low", cfg.box_low, "Lower bound of the initialization box");
            app.add_option("--box-high", cfg.box_high, "Upper bound of the initialization box");
        }

        Cell single_cell(const ExperimentConfig &cfg)
        {
            return {cfg.benchmarks[0], cfg.dims[0], parse_algorithm(cfg.algorithms[0]), cfg.seeds[0]};
        }

        void print_outcome(std::ostream &os, const Cell &cell, const RunLog &log)
        {
            const double gap = log.records.empty() ? log.initial_gap : log.records.back().gap;
            os << cell.benchmark << " d=" << cell.dim << " " << to_string(cell.kind) << " seed=" << cell.seed << ": "
               << to_string(log.termination) << " after " << log.evaluations << " evaluations, gap " << gap << "\n";
        }

        int do_run(const ExperimentConfig &cfg)
        {
            const Cell cell = single_cell(cfg);
            const RunLog log = execute(cfg, cell);
            const auto path = cfg.output.empty() ? default_output_dir() / cell_filename(cell) : cfg.output;
            write_csv(log, path);
            print_outcome(std::cout, cell, log);
            std::cout << "wrote " << path.string() << "\n";
            return 0;
        }

        int do_suite(const ExperimentConfig &cfg)
        {
            std::vector<Cell> cells;
            for (const auto &b : cfg.benchmarks)
                for (const int d : cfg.dims)
                    for (const auto &a : cfg.algorithms)
                        for (const auto s : cfg.seeds)
                            cells.push_back({b, d, parse_algorithm(a), s});

            // Validate every cell before spending any compute.
            for (const auto &c : cells)
            {
                (void)make_benchmark(c.benchmark, c.dim);
                (void)resolve_params(cfg, c);
            }

            const auto dir = cfg.output.empty() ? default_output_dir() : cfg.output;
            std::filesystem::create_directories(dir);

            std::vector<RunLog> logs(cells.size());
            std::atomic<std::size_t> next{0};
            std::mutex io;
            std::exception_ptr failure;
            const auto worker = [&]
            {
                for (std::size_t i = next++; i < cells.size(); i = next++)
                {
                    try
                    {
                        logs[i] = execute(cfg, cells[i]);
                        write_csv(logs[i], dir / cell_filename(cells[i]));
                        std::lock_guard lock(io);
                        print_outcome(std::cout, cells[i], logs[i]);
                    }
                    catch (...)
                    {
                        std::lock_guard lock(io);
                        if (!failure)
                            failure = std::current_exception();
                    }
                }
            };
            {
                std::vector<std::jthread> pool;
                for (int j = 0; j < std::max(1, cfg.jobs); ++j)
                    pool.emplace_back(worker);
            }
            if (failure)
                std::rethrow_exception(failure);

            struct Group
            {
                int runs = 0;
                std::vector<double> evals_to_target;
            };
            std::map<std::tuple<std::string, int, std::string>, Group> groups;
            for (std::size_t i = 0; i < cells.size(); ++i)
            {
                auto &g = groups[{cells[i].benchmark, cells[i].dim, std::string(to_string(cells[i].kind))}];
                ++g.runs;
                if (logs[i].termination == Termination::target_reached)
                    g.evals_to_target.push_back(static_cast<double>(logs[i].evaluations));
            }

            std::ofstream summary(dir / "summary.csv");
            summary << "benchmark,dim,algo,runs,successes,median_evals_to_target\n";
            std::printf("\n%-24s %4s %5s %5s %9s %14s\n", "benchmark", "dim", "algo", "runs", "successes",
                        "median evals");
            for (const auto &[key, g] : groups)
            {
                const auto &[bench, d, algo] = key;
                const double med = median(g.evals_to_target);
                summary << bench << ',' << d << ',' << algo << ',' << g.runs << ',' << g.evals_to_target.size()
                        << ',' << (g.evals_to_target.empty() ? std::string() : std::to_string(med)) << '\n';
                std::printf("%-24s %4d %5s %5d %9zu %14.0f\n", bench.c_str(), d, algo.c_str(), g.runs,
                            g.evals_to_target.size(), med);
            }
            if (!summary)
                throw std::runtime_error("write to '" + (dir / "summary.csv").string() + "' failed");
            return 0;
        }

        struct RateOptions
        {
            std::filesystem::path input;
            long early_begin = 50;
            long early_end = 100;
            std::size_t late = 20;
            bool series = false;
        };

        int do_rate(const RateOptions &opt)
        {
            const RunLog log = read_csv(opt.input);
            const ProgressSeries s = progress_factors(log);
            if (opt.series)
            {
                std::cout << "iter,factor\n";
                for (std::size_t i = 0; i < s.factor.size(); ++i)
                    std::printf("%ld,%.17e\n", s.iteration[i], s.factor[i]);
            }
            const RateSummary r = summarize_rate(s, opt.early_begin, opt.early_end, opt.late);
            std::printf("factors: %zu\n", r.count);
            std::printf("max_factor: %.6e (iteration %ld)\n", r.max_factor, r.max_factor_iteration);
            std::printf("early_median[%ld-%ld]: %.6e\n", opt.early_begin, opt.early_end, r.early_median);
            std::printf("late_median[last %zu]: %.6e\n", opt.late, r.late_median);
            std::printf("acceleration: %.6e\n", r.acceleration());
            return 0;
        }
    }

    int cli_main(int argc, char **argv)
    {
        CLI::App app{"Hessian estimation and quasi-Newton evolution strategies"};
        app.set_config("--config", "", "TOML/INI configuration file (flags take precedence)");
        app.require_subcommand(1);

        ExperimentConfig run_cfg;
        auto *run_cmd = app.add_subcommand("run", "Single optimization run, written as CSV");
        add_config_options(*run_cmd, run_cfg, true);

        ExperimentConfig suite_cfg;
        auto *suite_cmd = app.add_subcommand("suite", "Benchmarks x dimensions x algorithms x seeds");
        add_config_options(*suite_cmd, suite_cfg, false);

        RateOptions rate_opt;
        auto *rate_cmd = app.add_subcommand("rate", "Progress-factor analysis of a run CSV");
        rate_cmd->add_option("csv", rate_opt.input, "Run CSV")->required()->check(CLI::ExistingFile);
        rate_cmd->add_option("--early-begin", rate_opt.early_begin, "First iteration of the early window");
        rate_cmd->add_option("--early-end", rate_opt.early_end, "Last iteration of the early window");
        rate_cmd->add_option("--late", rate_opt.late, "Number of final factors in the late window");
        rate_cmd->add_flag("--series", rate_opt.series, "Print the full factor series");

        try
        {
            app.parse(argc, argv);
        }
        catch (const CLI::ParseError &e)
        {
            return app.exit(e);
        }

        try
        {
            if (*run_cmd)
                return do_run(run_cfg);
            if (*suite_cmd)
                return do_suite(suite_cfg);
            return do_rate(rate_opt);
        }
        catch (const InvalidInput &e)
        {
            std::cerr << "error: " << e.what() << "\n" << app.help();
            return 2;
        }
        catch (const std::exception &e)
        {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
    }
}
