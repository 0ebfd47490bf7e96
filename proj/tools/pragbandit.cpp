// Command-line front end for the experiment harness.

#include "pragbandit/error.hpp"
#include "pragbandit/harness/config.hpp"
#include "pragbandit/harness/dataset.hpp"
#include "pragbandit/harness/experiments.hpp"
#include "pragbandit/harness/repl.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>

namespace fs = std::filesystem;
using namespace pragbandit;

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) out.push_back(item);
    if (out.empty()) throw InvalidArgument("empty list '" + s + "'");
    return out;
}

double parse_beta(const std::string& s) {
    if (s == "inf" || s == "argmax") return std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size()) throw ParseError("bad beta '" + s + "'");
    return v;
}

int parse_int(const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size()) throw ParseError("bad integer '" + s + "'");
    return v;
}

template <class T, class F>
std::vector<T> map_list(const std::string& s, F f) {
    std::vector<T> out;
    for (const auto& item : split_list(s)) out.push_back(f(item));
    return out;
}

void write_file(const fs::path& dir, const std::string& name, const std::function<void(std::ostream&)>& body) {
    fs::create_directories(dir);
    const fs::path path = dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write '" + path.string() + "'");
    body(out);
    if (!out) throw InvalidArgument("failed writing '" + path.string() + "'");
    std::cout << "wrote " << path.string() << '\n';
}

struct DataSource {
    std::string path;
    bool any_horizon = false;
    std::string horizons = "1,2,4";
    int samples = 0;

    void add_to(CLI::App* cmd, int default_samples) {
        samples = default_samples;
        cmd->add_option("--data", path, "Dataset CSV; without it a simulated dataset is used");
        cmd->add_flag("--any-horizon", any_horizon, "Accept horizons outside 1, 2, 4");
        cmd->add_option("--horizons", horizons, "Horizons for the simulated dataset")->capture_default_str();
        cmd->add_option("--samples", samples,
                        "Simulated utterances per (horizon, state); 0 weights every utterance by its probability")
            ->capture_default_str();
    }

    std::vector<DatasetRecord> load(const HarnessConfig& cfg) const {
        if (!path.empty()) return load_dataset(path, LoadOptions{any_horizon});
        SimulationOptions sim;
        sim.horizons = map_list<int>(horizons, parse_int);
        sim.samples_per_state = samples;
        return simulate_dataset(cfg, sim);
    }
};

void print_eval_summary(const EvalResult& r) {
    std::cout << "listener     horizon  mean_future_reward  mean_gain     n\n";
    for (const auto& s : r.summary) {
        if (s.kind != UtteranceKind::All) continue;
        std::printf("%-12s %-8s %18.4f %10.4f %5zu\n", std::string(listener_name(s.listener)).c_str(),
                    s.horizon == 0 ? "all" : std::to_string(s.horizon).c_str(), s.mean_future_reward, s.mean_gain,
                    s.n);
    }
}

void print_error(const std::string& kind, const std::string& message) {
    std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reward inference from instructions and descriptions, with social bandit learning"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    std::string config_path, out_dir;
    int threads = 0;
    std::vector<std::string> settings;
    auto* seed_opt = app.add_option("--seed", seed, "Master random seed");
    app.add_option("--config", config_path, "key = value config file");
    auto* out_opt = app.add_option("--out", out_dir, "Output directory");
    auto* threads_opt = app.add_option("--threads", threads, "Worker threads (0: all cores)");
    app.add_option("--set", settings, "Override a config key: --set beta_s1=4")->allow_extra_args(false);

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Speaker rewards over horizons, state sizes and utterance sets");
    std::string sweep_horizons = "1,2,3,5,10", sweep_sizes = "3", sweep_sets = "instructions,descriptions,full",
                sweep_betas = "10";
    sweep->add_option("--horizons", sweep_horizons)->capture_default_str();
    sweep->add_option("--sizes", sweep_sizes, "State sizes")->capture_default_str();
    sweep->add_option("--sets", sweep_sets, "Utterance set presets")->capture_default_str();
    sweep->add_option("--betas", sweep_betas, "Speaker betas; 'inf' is the argmax speaker")->capture_default_str();

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Generate a simulated speaker dataset");
    std::string sim_horizons = "1,2,4";
    int sim_samples = 0;
    simulate->add_option("--horizons", sim_horizons)->capture_default_str();
    simulate->add_option("--samples", sim_samples, "Sampled utterances per (horizon, state); 0 writes every utterance "
                                                   "weighted by its probability")
        ->capture_default_str();

    // eval
    auto* eval = app.add_subcommand("eval", "Future rewards of literal and pragmatic listeners");
    DataSource eval_src;
    eval_src.add_to(eval, 0);
    std::string eval_listeners_text = "literal,known_h,h1,h4,latent_h";
    eval->add_option("--listeners", eval_listeners_text)->capture_default_str();

    // regret
    auto* regret = app.add_subcommand("regret", "Thompson-sampling regret with social priors");
    DataSource regret_src;
    regret_src.add_to(regret, 1);
    std::string regret_listeners_text = "individual,literal,known_h,h1,h4,latent_h";
    bool traces = false;
    regret->add_option("--listeners", regret_listeners_text)->capture_default_str();
    regret->add_flag("--traces", traces, "Also write per-step traces");

    // calibrate
    auto* calibrate = app.add_subcommand("calibrate", "Grid search over the speaker beta assumed by listeners");
    DataSource cal_src;
    cal_src.add_to(calibrate, 0);
    std::string grid = "1,2,3,4,5,6,7,8,9,10";
    calibrate->add_option("--grid", grid)->capture_default_str();

    // posterior
    auto* posterior = app.add_subcommand("posterior", "Pragmatic posterior report for one utterance and state");
    std::string utterance_text, state_text;
    posterior->add_option("--utterance", utterance_text, "e.g. 'TAKE spotted red' or 'DESC spotted +1'")->required();
    posterior->add_option("--state", state_text, "e.g. 'spotted red/solid blue/striped blue'")->required();

    // repl
    auto* repl = app.add_subcommand("repl", "Interactive session: you speak, the listeners act");
    std::string repl_state;
    int repl_horizon = 0;
    bool no_prompt = false;
    repl->add_option("--state", repl_state, "Fixed start state");
    repl->add_option("--horizon", repl_horizon, "Fixed horizon");
    repl->add_flag("--no-prompt", no_prompt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        HarnessConfig cfg;
        if (!config_path.empty()) cfg = load_config(config_path);
        for (const auto& kv : settings) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw ParseError("--set expects key=value, got '" + kv + "'");
            apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (seed_opt->count()) cfg.seed = seed;
        if (out_opt->count()) cfg.out_dir = out_dir;
        if (threads_opt->count()) cfg.threads = threads;
        cfg.validate();

        if (*sweep) {
            SweepOptions opts;
            opts.horizons = map_list<Horizon>(sweep_horizons, [](const std::string& s) { return Horizon::parse(s); });
            opts.state_sizes = map_list<int>(sweep_sizes, parse_int);
            opts.utterance_sets = split_list(sweep_sets);
            opts.betas = map_list<double>(sweep_betas, parse_beta);
            const auto rows = speaker_sweep(cfg, opts);
            write_file(cfg.out_dir, "sweep.csv", [&](std::ostream& o) { write_sweep(o, rows); });
        } else if (*simulate) {
            SimulationOptions opts;
            opts.horizons = map_list<int>(sim_horizons, parse_int);
            opts.samples_per_state = sim_samples;
            const auto records = simulate_dataset(cfg, opts);
            write_file(cfg.out_dir, "simulated.csv", [&](std::ostream& o) { write_dataset(o, records); });
        } else if (*eval) {
            const auto records = eval_src.load(cfg);
            const auto listeners = map_list<ListenerId>(eval_listeners_text, parse_listener);
            const auto result = eval_listeners(records, cfg, listeners);
            write_file(cfg.out_dir, "eval_rows.csv", [&](std::ostream& o) { write_eval_rows(o, records, result); });
            write_file(cfg.out_dir, "eval_summary.csv", [&](std::ostream& o) { write_eval_summary(o, result); });
            print_eval_summary(result);
        } else if (*regret) {
            const auto records = regret_src.load(cfg);
            RegretOptions opts;
            opts.listeners = map_list<ListenerId>(regret_listeners_text, parse_listener);
            opts.keep_traces = traces;
            const auto result = regret_suite(records, cfg, opts);
            write_file(cfg.out_dir, "regret_episodes.csv",
                       [&](std::ostream& o) { write_regret_episodes(o, records, result); });
            write_file(cfg.out_dir, "regret_curves.csv", [&](std::ostream& o) { write_regret_curves(o, result); });
            write_file(cfg.out_dir, "regret_summary.csv", [&](std::ostream& o) { write_regret_summary(o, result); });
            if (traces)
                write_file(cfg.out_dir, "regret_traces.csv", [&](std::ostream& o) { write_regret_traces(o, result); });
            for (const auto& l : result.listeners)
                std::printf("%-12s mean cumulative regret %.3f (sd %.3f, %zu episodes)\n",
                            std::string(listener_name(l.listener)).c_str(), l.mean_total, l.sd_total, l.episodes);
        } else if (*calibrate) {
            const auto records = cal_src.load(cfg);
            const auto result = calibrate_beta(records, map_list<double>(grid, parse_beta), cfg);
            write_file(cfg.out_dir, "calibration.csv", [&](std::ostream& o) { write_calibration(o, result); });
            for (std::size_t j = 0; j < result.listeners.size(); ++j)
                std::printf("%-12s best beta %g\n", std::string(listener_name(result.listeners[j])).c_str(),
                            result.best_beta[j]);
        } else if (*posterior) {
            const auto report = posterior_report(Utterance::parse(utterance_text), State::parse(state_text), cfg);
            write_file(cfg.out_dir, "posterior.json", [&](std::ostream& o) { o << report.dump(2) << '\n'; });
            std::cout << report.dump(2) << '\n';
        } else if (*repl) {
            ReplOptions opts;
            if (!repl_state.empty()) opts.state = State::parse(repl_state);
            if (repl_horizon > 0) opts.horizon = repl_horizon;
            opts.prompt = !no_prompt;
            return run_repl(cfg, std::cin, std::cout, opts);
        }
    } catch (const Error& e) {
        print_error(e.kind(), e.what());
        return 1;
    } catch (const std::exception& e) {
        print_error("internal", e.what());
        return 1;
    }
    return 0;
}
