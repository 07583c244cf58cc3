#include "pmlab/cli.hpp"

#include "pmlab/dp_games.hpp"
#include "pmlab/harness.hpp"
#include "pmlab/structure.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

namespace pmlab {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct GameOptions {
    std::string kind = "dp-easy";
    std::size_t n = 3;
    std::size_t m = 3;
    double c = 2.0;
    std::string file;
    std::string opponent;
};

struct PolicyOptions {
    std::string name = "tspm";
    double R = 1.0;
    double lambda = 0.001;
    std::optional<std::size_t> init_n;
    double c_gamma = 1.0;
    double c_eta = 1.0;
};

struct RunOptions {
    std::size_t horizon = 10000;
    std::size_t trials = 100;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
    std::size_t window = 100;
    bool no_rejections = false;
};

std::size_t default_jobs() {
    if (const char* env = std::getenv("PM_LAB_JOBS")) {
        std::size_t v = 0;
        const auto res = std::from_chars(env, env + std::char_traits<char>::length(env), v);
        if (res.ec == std::errc() && v > 0) return v;
    }
    return 1;
}

void add_game_options(CLI::App& app, GameOptions& g) {
    app.add_option("--game", g.kind, "Built-in game")
        ->check(CLI::IsMember({"dp-easy", "dp-hard"}));
    app.add_option("--n", g.n, "Number of prices (actions)");
    app.add_option("--m", g.m, "Number of valuations (outcomes)");
    app.add_option("--c", g.c, "No-sale penalty");
    app.add_option("--game-file", g.file, "JSON game {\"loss\": [[...]], \"feedback\": [[...]]}");
    app.add_option("--opponent", g.opponent, "Opponent strategy p1,p2,...");
}

void add_policy_options(CLI::App& app, PolicyOptions& p, bool with_name) {
    if (with_name) {
        app.add_option("--policy", p.name, "tspm | tspm-gaussian | bpm-ts | feedexp3 | random");
    }
    app.add_option("--R", p.R, "Accept-reject constant for tspm, in [0, 1]");
    app.add_option("--lambda", p.lambda, "Prior precision");
    app.add_option("--init-n", p.init_n, "Warm-up plays per action (default 10*A)");
    app.add_option("--cgamma", p.c_gamma, "FeedExp3 exploration constant");
    app.add_option("--ceta", p.c_eta, "FeedExp3 learning-rate constant");
}

void add_run_options(CLI::App& app, RunOptions& r) {
    app.add_option("--horizon", r.horizon, "Rounds per trial");
    app.add_option("--trials", r.trials, "Independent trials");
    app.add_option("--seed", r.seed, "Master seed");
    app.add_option("--jobs", r.jobs, "Worker threads (default $PM_LAB_JOBS or 1)");
    app.add_option("--window", r.window, "Moving-average window for rejection counts");
    app.add_flag("--no-rejections", r.no_rejections, "Write zero rejection counts");
}

Game build_game(const GameOptions& g) {
    if (!g.file.empty()) return load_game_file(g.file);
    const DpSpec spec{g.n, g.m, g.c};
    return g.kind == "dp-hard" ? dp_hard(spec) : dp_easy(spec);
}

std::optional<Vector> parse_opponent(const std::string& text) {
    if (text.empty()) return std::nullopt;
    std::vector<double> values;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find(',', start), text.size());
        double v = 0.0;
        const auto res = std::from_chars(text.data() + start, text.data() + end, v);
        if (res.ec != std::errc() || res.ptr != text.data() + end) {
            throw std::invalid_argument("cannot parse opponent entry '" +
                                        text.substr(start, end - start) + "'");
        }
        values.push_back(v);
        start = end + 1;
    }
    return Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Vector resolve_opponent(const GameOptions& g, const Game& game) {
    if (auto p = parse_opponent(g.opponent)) {
        check_strategy(game, *p);
        return *p;
    }
    return default_opponent(game.n_outcomes());
}

PolicyConfig build_policy(const PolicyOptions& p, PolicyKind kind) {
    PolicyConfig cfg;
    cfg.kind = kind;
    cfg.R = p.R;
    cfg.lambda = p.lambda;
    cfg.init_rounds_per_action = p.init_n;
    cfg.c_gamma = p.c_gamma;
    cfg.c_eta = p.c_eta;
    return cfg;
}

ExperimentConfig build_experiment(const GameOptions& g, const PolicyConfig& policy,
                                  const RunOptions& r) {
    Game game = build_game(g);
    Vector opp = resolve_opponent(g, game);
    ExperimentConfig cfg{std::move(game), std::move(opp), policy};
    cfg.horizon = r.horizon;
    cfg.trials = r.trials;
    cfg.seed = r.seed;
    cfg.jobs = r.jobs;
    cfg.window = r.window;
    cfg.record_rejections = !r.no_rejections;
    cfg.validate();
    return cfg;
}

void write_outputs(const ExperimentConfig& cfg, const fs::path& raw, const fs::path& agg,
                   std::ostream& out) {
    const auto results = run_experiment(cfg);
    if (raw.has_parent_path()) fs::create_directories(raw.parent_path());
    if (agg.has_parent_path()) fs::create_directories(agg.parent_path());
    {
        std::ofstream f(raw, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write '" + raw.string() + "'");
        write_raw_csv(f, results);
    }
    const Aggregate summary = aggregate(results, cfg.window);
    {
        std::ofstream f(agg, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write '" + agg.string() + "'");
        write_aggregate_csv(f, summary);
    }
    out << policy_name(cfg.policy.kind) << ": " << cfg.trials << " trials x " << cfg.horizon
        << " rounds, mean final regret " << summary.mean_regret.back() << " (stderr "
        << summary.stderr_regret.back() << ") -> " << raw.string() << ", " << agg.string()
        << '\n';
}

json indices(const std::vector<std::size_t>& idx, const std::vector<std::size_t>& reps) {
    json arr = json::array();
    for (std::size_t k : idx) arr.push_back(reps[k] + 1);
    return arr;
}

json classify_report(const GameOptions& g) {
    const Game original = build_game(g);
    const DuplicateCollapse collapsed = collapse_duplicates(original);
    const Game& game = collapsed.game;
    const auto& reps = collapsed.representatives;

    json rep;
    rep["n_actions"] = original.n_actions();
    rep["n_outcomes"] = original.n_outcomes();
    rep["n_symbols"] = original.n_symbols();
    rep["warnings"] = json::array();
    rep["duplicate_groups"] = json::array();
    for (const auto& group : collapsed.duplicate_groups) {
        json members = json::array();
        for (std::size_t a : group) members.push_back(a + 1);
        rep["duplicate_groups"].push_back(members);
        rep["warnings"].push_back("actions " + members.dump() +
                                  " have identical loss and feedback rows; analysed as one");
    }

    std::vector<std::size_t> pareto;
    std::vector<std::size_t> strict;
    for (std::size_t i = 0; i < game.n_actions(); ++i) {
        const CellStatus s = cell_status(game, i);
        if (s.pareto_optimal) pareto.push_back(i);
        if (s.strictly_pareto_optimal) strict.push_back(i);
    }
    rep["pareto_optimal"] = indices(pareto, reps);
    rep["strictly_pareto_optimal"] = indices(strict, reps);

    json neighbors = json::array();
    json hoods = json::array();
    for (std::size_t x = 0; x < pareto.size(); ++x) {
        for (std::size_t y = x + 1; y < pareto.size(); ++y) {
            const std::size_t i = pareto[x];
            const std::size_t j = pareto[y];
            if (!are_neighbors(game, i, j)) continue;
            neighbors.push_back({reps[i] + 1, reps[j] + 1});
            hoods.push_back({{"pair", {reps[i] + 1, reps[j] + 1}},
                             {"actions", indices(neighborhood_action_set(game, i, j), reps)}});
        }
    }
    rep["neighbors"] = neighbors;
    rep["neighborhood_action_sets"] = hoods;
    rep["strongly_locally_observable"] = is_strongly_locally_observable(game);
    rep["locally_observable"] = is_locally_observable(game);

    json diff = nullptr;
    try {
        const Vector p_star = resolve_opponent(g, original);
        const DifficultyReport d = difficulty_report(game, p_star);
        diff = json::object();
        diff["opponent"] = std::vector<double>(p_star.data(), p_star.data() + p_star.size());
        diff["optimal_action"] = reps[d.optimal_action] + 1;
        diff["gaps"] = std::vector<double>(d.gaps.data(), d.gaps.data() + d.gaps.size());
        diff["z_norms"] = std::vector<double>(d.z_norms.data(), d.z_norms.data() + d.z_norms.size());
        diff["lambda_per_action"] =
            std::vector<double>(d.per_action.data(), d.per_action.data() + d.per_action.size());
        diff["lambda_min"] = d.lambda_min;
        diff["epsilon"] = d.epsilon;
        diff["epsilon_prime"] = d.epsilon_prime;
        diff["epsilon_approximate"] = d.epsilon_approximate;
    } catch (const std::exception& e) {
        rep["difficulty_error"] = e.what();
    }
    rep["difficulty"] = diff;
    return rep;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Partial-monitoring simulation and benchmark tool", "pmlab"};
    app.require_subcommand(1);

    GameOptions game_opts;
    PolicyOptions policy_opts;
    RunOptions run_opts;
    run_opts.jobs = default_jobs();
    std::string out_path;
    std::string agg_path;
    std::string out_dir;
    std::string policies = "tspm,tspm-gaussian,bpm-ts,feedexp3,random";
    std::string report_path;

    auto* run = app.add_subcommand("run", "Run trials of one policy and write CSV files");
    add_game_options(*run, game_opts);
    add_policy_options(*run, policy_opts, true);
    add_run_options(*run, run_opts);
    run->add_option("--out", out_path, "Raw per-round CSV")->required();
    run->add_option("--aggregate-out", agg_path, "Aggregate CSV (default <out>_aggregate.csv)");

    auto* sweep = app.add_subcommand("sweep", "Run several policies on one game");
    add_game_options(*sweep, game_opts);
    add_policy_options(*sweep, policy_opts, false);
    add_run_options(*sweep, run_opts);
    sweep->add_option("--policies", policies, "Comma-separated policy list");
    sweep->add_option("--out-dir", out_dir, "Directory for <policy>.csv files")->required();

    auto* classify = app.add_subcommand("classify", "Print a JSON structure report");
    add_game_options(*classify, game_opts);
    classify->add_option("--out", report_path, "Write the report here instead of stdout");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }

    try {
        if (*run) {
            const auto kind = parse_policy_kind(policy_opts.name);
            const auto cfg = build_experiment(game_opts, build_policy(policy_opts, kind), run_opts);
            const fs::path raw(out_path);
            fs::path agg(agg_path);
            if (agg_path.empty()) {
                agg = raw.parent_path() / (raw.stem().string() + "_aggregate.csv");
            }
            write_outputs(cfg, raw, agg, out);
        } else if (*sweep) {
            std::vector<PolicyKind> kinds;
            std::size_t start = 0;
            while (start <= policies.size()) {
                const std::size_t end = std::min(policies.find(',', start), policies.size());
                kinds.push_back(parse_policy_kind(policies.substr(start, end - start)));
                start = end + 1;
            }
            for (PolicyKind kind : kinds) {
                const auto cfg =
                    build_experiment(game_opts, build_policy(policy_opts, kind), run_opts);
                const fs::path dir(out_dir);
                write_outputs(cfg, dir / (policy_name(kind) + ".csv"),
                              dir / (policy_name(kind) + "_aggregate.csv"), out);
            }
        } else if (*classify) {
            const std::string text = classify_report(game_opts).dump(2) + "\n";
            if (report_path.empty()) {
                out << text;
            } else {
                std::ofstream f(report_path, std::ios::binary);
                if (!f) throw std::runtime_error("cannot write '" + report_path + "'");
                f << text;
            }
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace pmlab
