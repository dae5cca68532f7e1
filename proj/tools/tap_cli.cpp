// Batch front-end: generate/ingest graphs, build and persist sketch
// oracles, run STAB or CELF over threshold sweeps, evaluate seed sets by
// Monte Carlo, and emit experiment CSV/JSON artifacts.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tap/baselines.hpp"
#include "tap/graph_io.hpp"
#include "tap/json_io.hpp"
#include "tap/parallel.hpp"

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string hash_hex(std::uint64_t h) {
    std::ostringstream out;
    out << std::hex << h;
    return out.str();
}

json load_json_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in)
        throw tap::InputError("cannot open JSON file: " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception &e) {
        throw tap::InputError("invalid JSON in " + path.string() + ": " + e.what());
    }
    return doc;
}

void write_text_file(const std::filesystem::path &path, const std::string &content,
                     bool append = false) {
    std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
    if (!out)
        throw tap::InputError("cannot write: " + path.string());
    out << content;
}

void append_csv_row(const std::filesystem::path &path, const std::string &header,
                    const std::string &row) {
    const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
    std::ofstream out(path, std::ios::app);
    if (!out)
        throw tap::InputError("cannot write: " + path.string());
    if (fresh)
        out << header << '\n';
    out << row << '\n';
}

std::vector<double> parse_double_list(const std::string &text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            values.push_back(std::stod(item));
    if (values.empty())
        throw tap::InputError("empty list: '" + text + "'");
    return values;
}

std::vector<tap::NodeId> parse_id_list(const std::string &text) {
    std::vector<tap::NodeId> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            values.push_back(static_cast<tap::NodeId>(std::stoul(item)));
    return values;
}

// Seed streams derived from the master seed; echoed into every artifact.
struct SeedBundle {
    std::uint64_t master;
    std::uint64_t param() const { return tap::hash_combine(master, 100); }
    std::uint64_t worlds() const { return tap::hash_combine(master, 101); }
    std::uint64_t ranks() const { return tap::hash_combine(master, 102); }
    std::uint64_t eval() const { return tap::hash_combine(master, 103); }
    json echo() const {
        return {{"master_seed", master},
                {"param_seed", param()},
                {"world_seed", worlds()},
                {"rank_seed", ranks()},
                {"eval_seed", eval()}};
    }
};

tap::DirectedGraph load_graph_any(const std::filesystem::path &path, bool symmetrize) {
    if (path.extension() == ".tapg")
        return tap::load_graph_cache(path);
    return tap::load_snap_edgelist(path, symmetrize).graph;
}

// Shared influence-model options; a full spec document wins over the
// shorthand flags.
struct ModelArgs {
    std::string influence_file;
    std::string model = "ic";
    double ip_max = 1.0;
    std::string ext_kind = "none";
    double ep_max = 0.0;

    void attach(CLI::App *cmd) {
        cmd->add_option("--influence", influence_file,
                        "Influence spec JSON file (overrides the shorthand flags)");
        cmd->add_option("--model", model, "Triggering model: ic|lt")
            ->check(CLI::IsMember({"ic", "lt"}));
        cmd->add_option("--ip-max", ip_max, "Edge parameters drawn from U[0, ip_max]");
        cmd->add_option("--ext", ext_kind, "External influence: none|bernoulli")
            ->check(CLI::IsMember({"none", "bernoulli"}));
        cmd->add_option("--ep-max", ep_max, "External probabilities drawn from U[0, ep_max]");
    }

    json spec_json(std::uint64_t param_seed) const {
        if (!influence_file.empty())
            return load_json_file(influence_file);
        json doc;
        doc["model"] = model;
        doc["ip_max"] = ip_max;
        doc["param_seed"] = param_seed;
        if (ext_kind == "bernoulli")
            doc["ext"] = {{"kind", "bernoulli"}, {"ep_max", ep_max}};
        else
            doc["ext"] = {{"kind", "none"}};
        return doc;
    }
};

// Stab options resolved with precedence flag > config file > default.
struct StabArgs {
    CLI::App *cmd = nullptr;
    std::string config_file;
    tap::StabConfig cfg;
    std::string estimator = "c2";

    void attach(CLI::App *command) {
        cmd = command;
        cmd->add_option("--config", config_file, "JSON config file (flags override it)");
        cmd->add_option("--alpha", cfg.alpha, "Fractional error alpha in (0,1)");
        cmd->add_option("--delta", cfg.delta, "Estimation failure probability");
        cmd->add_option("--eta", [this](const CLI::results_t &res) {
            cfg.eta = std::stod(res[0]);
            return true;
        }, "Strict mode: delta = eta / n^3");
        cmd->add_option("--c", cfg.c, "Sketch concentration constant");
        cmd->add_option("--eps-sketch", cfg.eps_sketch, "Sketch size preset epsilon");
        cmd->add_flag("--k-alpha-t", cfg.k_alpha_t_preset, "Size sketches with eps = alpha*T");
        cmd->add_flag("--alg1-ell", cfg.conservative_ell,
                      "Use the conservative ell = log(2/delta)/alpha^2");
        cmd->add_option("--ell", [this](const CLI::results_t &res) {
            cfg.ell_override = static_cast<std::uint32_t>(std::stoul(res[0]));
            return true;
        }, "Override the number of sampled worlds");
        cmd->add_option("--k", [this](const CLI::results_t &res) {
            cfg.k_override = static_cast<std::uint32_t>(std::stoul(res[0]));
            return true;
        }, "Override the sketch size");
        cmd->add_flag("--lazy", cfg.lazy_eval, "Lazy-greedy (CELF-style) evaluation order");
        cmd->add_option("--estimator", estimator, "Reachability estimator: c1|c2")
            ->check(CLI::IsMember({"c1", "c2"}));
    }

    // Apply config-file values beneath any explicitly passed flags.
    tap::StabConfig resolve() {
        tap::StabConfig out = cfg;
        out.estimator = estimator == "c1" ? tap::Estimator::C1 : tap::Estimator::C2;
        if (config_file.empty())
            return out;
        const json file = load_json_file(config_file);
        const json stab = file.contains("stab") ? file.at("stab") : file;
        tap::StabConfig from_file = tap::stab_config_from_json(stab);
        auto given = [this](const std::string &name) { return cmd->count(name) > 0; };
        if (!given("--alpha"))
            out.alpha = from_file.alpha;
        if (!given("--delta"))
            out.delta = from_file.delta;
        if (!given("--eta") && from_file.eta)
            out.eta = from_file.eta;
        if (!given("--c"))
            out.c = from_file.c;
        if (!given("--eps-sketch"))
            out.eps_sketch = from_file.eps_sketch;
        if (!given("--k-alpha-t"))
            out.k_alpha_t_preset = from_file.k_alpha_t_preset;
        if (!given("--alg1-ell"))
            out.conservative_ell = from_file.conservative_ell;
        if (!given("--ell") && from_file.ell_override)
            out.ell_override = from_file.ell_override;
        if (!given("--k") && from_file.k_override)
            out.k_override = from_file.k_override;
        if (!given("--lazy"))
            out.lazy_eval = from_file.lazy_eval;
        if (!given("--estimator"))
            out.estimator = from_file.estimator;
        return out;
    }
};

int cmd_generate(const std::string &kind, std::uint64_t n, double p, tap::NodeId m0,
                 std::uint64_t seed, bool p_given, const std::string &out_path) {
    tap::DirectedGraph g;
    if (kind == "er") {
        if (n < 1)
            throw tap::InputError("generate er: n must be >= 1");
        const double prob = p_given ? p : 2.0 / static_cast<double>(n);
        g = tap::generate_er(static_cast<tap::NodeId>(n), prob, seed);
    } else {
        g = tap::generate_ba(static_cast<tap::NodeId>(n), m0, seed);
    }
    tap::save_graph_cache(g, out_path);

    std::size_t max_deg = 0;
    for (tap::NodeId u = 0; u < g.node_count(); ++u)
        max_deg = std::max(max_deg, g.out_degree(u));
    std::cout << "graph " << out_path << ": n=" << g.node_count() << " m=" << g.edge_count()
              << " max_out_degree=" << max_deg;
    if (kind == "ba") {
        try {
            std::cout << " power_law_exponent=" << tap::estimate_power_law_exponent(g);
        } catch (const tap::InputError &) {
            // degree range too small to fit; stats line stays short
        }
    }
    std::cout << " seed=" << seed << " hash=" << hash_hex(tap::graph_content_hash(g)) << '\n';
    return 0;
}

int cmd_build_oracles(const std::string &graph_path, bool symmetrize, ModelArgs &model,
                      StabArgs &stab, const SeedBundle &seeds, unsigned workers,
                      const std::string &out_path) {
    const tap::DirectedGraph g = load_graph_any(graph_path, symmetrize);
    const json spec_doc = model.spec_json(seeds.param());
    const tap::InfluenceSpec spec = tap::influence_spec_from_json(spec_doc, g);
    const tap::StabConfig cfg = stab.resolve();
    const tap::SampleCounts counts = tap::choose_sample_counts(cfg, g.node_count());

    const auto start = Clock::now();
    const tap::SketchOracle oracle = tap::build_oracles_streaming(
        g, spec, counts.ell, counts.k, seeds.ranks(), seeds.worlds(), workers);
    const double build_ms = elapsed_ms(start);
    tap::save_oracle(oracle, out_path);

    json sidecar;
    sidecar["graph"] = graph_path;
    sidecar["graph_hash"] = hash_hex(tap::graph_content_hash(g));
    sidecar["influence"] = spec_doc;
    sidecar["stab"] = tap::stab_config_to_json(cfg);
    sidecar["ell"] = counts.ell;
    sidecar["k"] = counts.k;
    sidecar["offset"] = oracle.offset();
    sidecar["seeds"] = seeds.echo();
    sidecar["workers"] = workers;
    sidecar["build_ms"] = build_ms;
    write_text_file(out_path + ".json", sidecar.dump(2) + "\n");

    std::cout << "oracle " << out_path << ": ell=" << counts.ell << " k=" << counts.k
              << " offset=" << oracle.offset() << " build_ms=" << build_ms << '\n';
    return 0;
}

int cmd_run(const std::string &graph_path, bool symmetrize, const std::string &oracle_path,
            const std::string &thresholds_text, const std::string &algorithm, StabArgs &stab,
            std::uint32_t mc_samples, std::uint32_t celf_samples, double time_limit,
            const SeedBundle &seeds, unsigned workers, const std::string &out_csv,
            const std::string &out_json) {
    const tap::DirectedGraph g = load_graph_any(graph_path, symmetrize);
    const json sidecar = load_json_file(oracle_path + ".json");
    if (sidecar.at("graph_hash").get<std::string>() != hash_hex(tap::graph_content_hash(g)))
        throw tap::InputError("oracle was built for a different graph (hash mismatch)");
    const tap::SketchOracle oracle = tap::load_oracle(oracle_path);
    const tap::InfluenceSpec spec = tap::influence_spec_from_json(sidecar.at("influence"), g);

    json all_runs = json::array();
    for (double T : parse_double_list(thresholds_text)) {
        tap::StabConfig cfg = stab.resolve();
        cfg.threshold = T;
        cfg.workers = workers;
        if (!cfg.ell_override && sidecar.contains("stab")) {
            // inherit build-time sampling choices unless overridden
            const tap::StabConfig built = tap::stab_config_from_json(sidecar.at("stab"));
            cfg.alpha = stab.cmd->count("--alpha") ? cfg.alpha : built.alpha;
            cfg.delta = stab.cmd->count("--delta") ? cfg.delta : built.delta;
            cfg.c = stab.cmd->count("--c") ? cfg.c : built.c;
            cfg.eps_sketch = stab.cmd->count("--eps-sketch") ? cfg.eps_sketch : built.eps_sketch;
            cfg.conservative_ell =
                stab.cmd->count("--alg1-ell") ? cfg.conservative_ell : built.conservative_ell;
            if (!built.eta)
                ;
            else if (!stab.cmd->count("--eta"))
                cfg.eta = built.eta;
            if (built.ell_override && !stab.cmd->count("--ell"))
                cfg.ell_override = built.ell_override;
            if (built.k_override && !stab.cmd->count("--k"))
                cfg.k_override = built.k_override;
        }

        const auto start = Clock::now();
        tap::TapSolution sol;
        std::string algo_name = algorithm;
        if (algorithm == "celf") {
            tap::CelfConfig celf;
            celf.threshold = T;
            celf.mc_samples = celf_samples;
            celf.rng_seed = tap::hash_combine(seeds.master, 200);
            celf.time_limit_seconds = time_limit;
            celf.workers = workers;
            sol = tap::celf_tap(g, spec, celf);
        } else {
            cfg.estimator = algorithm == "stab-c1" ? tap::Estimator::C1 : tap::Estimator::C2;
            sol = tap::run_stab(g, spec, cfg, oracle);
            algo_name += cfg.lazy_eval ? "-lazy" : "";
        }
        const double runtime_ms = elapsed_ms(start);

        const tap::EvalReport eval =
            tap::evaluate_seed_set(g, spec, sol.seeds, mc_samples, seeds.eval(), T, workers);

        if (!out_csv.empty())
            append_csv_row(out_csv, tap::results_csv_header(),
                           tap::results_csv_row(tap::kResultsCsvVersion, T, algo_name, cfg.alpha,
                                                sol, eval, runtime_ms, seeds.master));
        json echo;
        echo["threshold"] = T;
        echo["algorithm"] = algo_name;
        echo["stab"] = tap::stab_config_to_json(cfg);
        echo["influence"] = sidecar.at("influence");
        echo["seeds"] = seeds.echo();
        echo["mc_samples"] = mc_samples;
        json run = tap::solution_to_json(sol, echo);
        run["eval"] = tap::eval_report_to_json(eval);
        run["runtime_ms"] = runtime_ms;
        all_runs.push_back(run);

        std::cout << "T=" << T << " algo=" << algo_name << " seeds=" << sol.order.size()
                  << " sigma_hat=" << sol.estimated_activation
                  << " mc_mean=" << eval.mean_activation << " normalized=" << eval.normalized
                  << " stopped_by=" << tap::to_string(sol.stopped_by)
                  << " runtime_ms=" << runtime_ms << '\n';
    }
    if (!out_json.empty())
        write_text_file(out_json, all_runs.dump(2) + "\n");
    return 0;
}

int cmd_sweep_external(const std::string &graph_path, bool symmetrize, ModelArgs &model,
                       StabArgs &stab, const std::string &ep_list_text, double threshold,
                       std::uint32_t mc_samples, const SeedBundle &seeds, unsigned workers,
                       const std::string &out_csv) {
    const tap::DirectedGraph g = load_graph_any(graph_path, symmetrize);
    for (double ep_max : parse_double_list(ep_list_text)) {
        json spec_doc = model.spec_json(seeds.param());
        if (ep_max > 0.0)
            spec_doc["ext"] = {{"kind", "bernoulli"}, {"ep_max", ep_max}};
        else
            spec_doc["ext"] = {{"kind", "none"}};
        const tap::InfluenceSpec spec = tap::influence_spec_from_json(spec_doc, g);

        tap::StabConfig cfg = stab.resolve();
        cfg.threshold = threshold;
        cfg.workers = workers;
        cfg.estimator = tap::Estimator::C2;
        const tap::SampleCounts counts = tap::choose_sample_counts(cfg, g.node_count());

        const tap::SketchOracle oracle = tap::build_oracles_streaming(
            g, spec, counts.ell, counts.k, seeds.ranks(), seeds.worlds(), workers);

        const auto start = Clock::now();
        const tap::TapSolution sol = tap::run_stab(g, spec, cfg, oracle);
        const double greedy_ms = elapsed_ms(start);

        const tap::EvalReport eval = tap::evaluate_seed_set(g, spec, sol.seeds, mc_samples,
                                                            seeds.eval(), threshold, workers);
        const double external_fraction = oracle.offset() / threshold;
        append_csv_row(out_csv, tap::sweep_csv_header(),
                       tap::sweep_csv_row(tap::kSweepCsvVersion, ep_max, sol, eval,
                                          external_fraction, greedy_ms, seeds.master));
        std::cout << "ep_max=" << ep_max << " seeds=" << sol.order.size()
                  << " normalized=" << eval.normalized << " O/T=" << external_fraction
                  << " greedy_ms=" << greedy_ms << '\n';
    }
    return 0;
}

int cmd_brute_force(const std::string &what, const std::string &graph_path, bool symmetrize,
                    ModelArgs &model, const std::string &seeds_text, double threshold,
                    const SeedBundle &seeds) {
    const tap::DirectedGraph g = load_graph_any(graph_path, symmetrize);
    const tap::InfluenceSpec spec =
        tap::influence_spec_from_json(model.spec_json(seeds.param()), g);
    if (what == "sigma") {
        const tap::NodeSet set(parse_id_list(seeds_text));
        const tap::Rational sigma = tap::exact_sigma(g, spec, set);
        std::cout << "exact_sigma=" << sigma << " (" << sigma.convert_to<double>() << ")\n";
    } else {
        const tap::NodeSet best = tap::exhaustive_tap(g, spec, threshold);
        std::cout << "optimal_size=" << best.size() << " seeds=";
        for (std::size_t i = 0; i < best.ids().size(); ++i)
            std::cout << (i ? ";" : "") << best.ids()[i];
        std::cout << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Threshold activation on directed graphs: STAB with bottom-k "
                 "reachability sketch oracles, Monte Carlo baselines, and exact "
                 "small-instance solvers"};
    app.require_subcommand(1);

    std::uint64_t master_seed = 42;
    unsigned workers = tap::default_workers();
    bool symmetrize = false;
    app.add_option("--seed", master_seed, "Master PRNG seed (all streams derive from it)");
    app.add_option("--workers", workers, "Worker threads for parallel phases");
    app.add_flag("--symmetrize", symmetrize, "Treat edge-list input as undirected");

    // generate
    auto *generate = app.add_subcommand("generate", "Generate an ER or BA graph");
    std::string gen_kind, gen_out;
    std::uint64_t gen_n = 0;
    double gen_p = 0.0;
    tap::NodeId gen_m0 = 1;
    generate->add_option("kind", gen_kind, "er|ba")->required()->check(
        CLI::IsMember({"er", "ba"}));
    generate->add_option("--n", gen_n, "Node count")->required();
    auto *p_opt = generate->add_option("--p", gen_p, "ER edge probability (default 2/n)");
    generate->add_option("--m0", gen_m0, "BA attachments per node");
    generate->add_option("--out", gen_out, "Output .tapg path")->required();

    // build-oracles
    auto *build = app.add_subcommand("build-oracles", "Sample worlds and build sketch oracles");
    std::string build_graph, build_out;
    ModelArgs build_model;
    StabArgs build_stab;
    build->add_option("--graph", build_graph, "Graph file (.tapg or SNAP edge list)")
        ->required();
    build_model.attach(build);
    build_stab.attach(build);
    build->add_option("--out", build_out, "Output .tapo path")->required();

    // run
    auto *run = app.add_subcommand("run", "Run STAB or CELF over a threshold sweep");
    std::string run_graph, run_oracle, run_thresholds, run_algorithm = "stab-c2";
    std::string run_csv, run_json;
    std::uint32_t run_mc = 10000, run_celf_samples = 1000;
    double run_time_limit = 3600.0;
    StabArgs run_stab_args;
    run->add_option("--graph", run_graph, "Graph file")->required();
    run->add_option("--oracle", run_oracle, "Oracle .tapo path")->required();
    run->add_option("--thresholds", run_thresholds, "Comma-separated T values")->required();
    run->add_option("--algorithm", run_algorithm, "stab-c1|stab-c2|celf")
        ->check(CLI::IsMember({"stab-c1", "stab-c2", "celf"}));
    run_stab_args.attach(run);
    run->add_option("--mc-samples", run_mc, "Monte Carlo evaluation samples");
    run->add_option("--celf-samples", run_celf_samples, "Cascades per CELF gain evaluation");
    run->add_option("--time-limit", run_time_limit, "CELF wall-clock guard (seconds)");
    run->add_option("--out-csv", run_csv, "Append one CSV row per threshold");
    run->add_option("--out-json", run_json, "Write full solutions as JSON");

    // sweep-external
    auto *sweep = app.add_subcommand("sweep-external",
                                     "Rebuild oracles and run STAB-C2 across ep_max values");
    std::string sweep_graph, sweep_eps, sweep_csv;
    double sweep_T = 0.0;
    std::uint32_t sweep_mc = 10000;
    ModelArgs sweep_model;
    StabArgs sweep_stab;
    sweep->add_option("--graph", sweep_graph, "Graph file")->required();
    sweep_model.attach(sweep);
    sweep_stab.attach(sweep);
    sweep->add_option("--ep-max-list", sweep_eps, "Comma-separated ep_max values")->required();
    sweep->add_option("--threshold", sweep_T, "Activation threshold T")->required();
    sweep->add_option("--mc-samples", sweep_mc, "Monte Carlo evaluation samples");
    sweep->add_option("--out-csv", sweep_csv, "Output CSV path")->required();

    // brute-force
    auto *brute = app.add_subcommand("brute-force",
                                     "Exact small-instance oracles for test vectors");
    std::string brute_what, brute_graph, brute_seeds;
    double brute_T = 0.0;
    ModelArgs brute_model;
    brute->add_option("what", brute_what, "sigma|tap")->required()->check(
        CLI::IsMember({"sigma", "tap"}));
    brute->add_option("--graph", brute_graph, "Graph file")->required();
    brute_model.attach(brute);
    brute->add_option("--seeds", brute_seeds, "Comma-separated seed ids (sigma)");
    brute->add_option("--threshold", brute_T, "Activation threshold (tap)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const SeedBundle seeds{master_seed};
    try {
        if (generate->parsed())
            return cmd_generate(gen_kind, gen_n, gen_p, gen_m0, master_seed,
                                p_opt->count() > 0, gen_out);
        if (build->parsed())
            return cmd_build_oracles(build_graph, symmetrize, build_model, build_stab, seeds,
                                     workers, build_out);
        if (run->parsed())
            return cmd_run(run_graph, symmetrize, run_oracle, run_thresholds, run_algorithm,
                           run_stab_args, run_mc, run_celf_samples, run_time_limit, seeds,
                           workers, run_csv, run_json);
        if (sweep->parsed())
            return cmd_sweep_external(sweep_graph, symmetrize, sweep_model, sweep_stab,
                                      sweep_eps, sweep_T, sweep_mc, seeds, workers, sweep_csv);
        if (brute->parsed())
            return cmd_brute_force(brute_what, brute_graph, symmetrize, brute_model,
                                   brute_seeds, brute_T, seeds);
    } catch (const tap::ResourceLimitError &e) {
        std::cerr << "resource limit: " << e.what() << '\n';
        return 3;
    } catch (const tap::InputError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
