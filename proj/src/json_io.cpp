#include "tap/json_io.hpp"

#include <sstream>

namespace tap {

using nlohmann::json;

json influence_spec_to_json(const InfluenceSpec &spec) {
    json doc;
    switch (spec.trig.model) {
    case TriggeringModel::IndependentCascade:
        doc["model"] = "ic";
        break;
    case TriggeringModel::LinearThreshold:
        doc["model"] = "lt";
        break;
    case TriggeringModel::Generic:
        throw InputError("generic triggering specs are not serializable");
    }
    if (spec.trig.param_max && spec.trig.param_seed) {
        doc["ip_max"] = *spec.trig.param_max;
        doc["param_seed"] = *spec.trig.param_seed;
    } else {
        doc["ip"] = spec.trig.edge_param;
    }

    json ext;
    switch (spec.ext.kind) {
    case ExternalSpec::Kind::None:
        ext["kind"] = "none";
        break;
    case ExternalSpec::Kind::IndependentBernoulli:
        ext["kind"] = "bernoulli";
        if (spec.ext.param_max && spec.ext.param_seed) {
            ext["ep_max"] = *spec.ext.param_max;
            if (!doc.contains("param_seed"))
                doc["param_seed"] = *spec.ext.param_seed;
        } else {
            ext["ep"] = spec.ext.node_prob;
        }
        break;
    case ExternalSpec::Kind::Generic:
        throw InputError("generic external specs are not serializable");
    }
    doc["ext"] = ext;
    return doc;
}

InfluenceSpec influence_spec_from_json(const json &doc, const DirectedGraph &g) {
    InfluenceSpec spec;
    const std::string model = doc.at("model").get<std::string>();
    if (model != "ic" && model != "lt")
        throw InputError("influence spec: unknown model '" + model + "'");
    const std::uint64_t param_seed = doc.value("param_seed", std::uint64_t{0});

    if (doc.contains("ip")) {
        auto params = doc.at("ip").get<std::vector<double>>();
        spec.trig = model == "ic" ? TriggeringSpec::independent_cascade(std::move(params))
                                  : TriggeringSpec::linear_threshold(std::move(params));
    } else if (model == "ic") {
        spec.trig = TriggeringSpec::uniform_ic(g, doc.at("ip_max").get<double>(), param_seed);
    } else {
        spec.trig = TriggeringSpec::uniform_lt(g, doc.at("ip_max").get<double>(), param_seed);
    }

    if (doc.contains("ext")) {
        const json &ext = doc.at("ext");
        const std::string kind = ext.value("kind", "none");
        if (kind == "none") {
            spec.ext = ExternalSpec::none();
        } else if (kind == "bernoulli") {
            if (ext.contains("ep"))
                spec.ext = ExternalSpec::bernoulli(ext.at("ep").get<std::vector<double>>());
            else
                spec.ext = ExternalSpec::uniform_bernoulli(
                    g.node_count(), ext.at("ep_max").get<double>(), param_seed);
        } else {
            throw InputError("influence spec: unknown external kind '" + kind + "'");
        }
    }
    spec.validate(g);
    return spec;
}

json stab_config_to_json(const StabConfig &cfg) {
    json doc;
    doc["threshold"] = cfg.threshold;
    doc["alpha"] = cfg.alpha;
    doc["delta"] = cfg.delta;
    doc["c"] = cfg.c;
    doc["estimator"] = to_string(cfg.estimator);
    doc["lazy_eval"] = cfg.lazy_eval;
    doc["enforce_cea_stop"] = cfg.enforce_cea_stop;
    doc["conservative_ell"] = cfg.conservative_ell;
    doc["eps_sketch"] = cfg.eps_sketch;
    doc["k_alpha_t_preset"] = cfg.k_alpha_t_preset;
    if (cfg.eta)
        doc["eta"] = *cfg.eta;
    if (cfg.ell_override)
        doc["ell"] = *cfg.ell_override;
    if (cfg.k_override)
        doc["k"] = *cfg.k_override;
    return doc;
}

StabConfig stab_config_from_json(const json &doc) {
    StabConfig cfg;
    cfg.threshold = doc.value("threshold", cfg.threshold);
    cfg.alpha = doc.value("alpha", cfg.alpha);
    cfg.delta = doc.value("delta", cfg.delta);
    cfg.c = doc.value("c", cfg.c);
    if (doc.contains("estimator")) {
        const std::string name = doc.at("estimator").get<std::string>();
        if (name == "c1")
            cfg.estimator = Estimator::C1;
        else if (name == "c2")
            cfg.estimator = Estimator::C2;
        else
            throw InputError("stab config: unknown estimator '" + name + "'");
    }
    cfg.lazy_eval = doc.value("lazy_eval", cfg.lazy_eval);
    cfg.enforce_cea_stop = doc.value("enforce_cea_stop", cfg.enforce_cea_stop);
    cfg.conservative_ell = doc.value("conservative_ell", cfg.conservative_ell);
    cfg.eps_sketch = doc.value("eps_sketch", cfg.eps_sketch);
    cfg.k_alpha_t_preset = doc.value("k_alpha_t_preset", cfg.k_alpha_t_preset);
    if (doc.contains("eta"))
        cfg.eta = doc.at("eta").get<double>();
    if (doc.contains("ell"))
        cfg.ell_override = doc.at("ell").get<std::uint32_t>();
    if (doc.contains("k"))
        cfg.k_override = doc.at("k").get<std::uint32_t>();
    return cfg;
}

json solution_to_json(const TapSolution &sol, const json &config_echo) {
    json doc;
    doc["seeds"] = sol.order;
    doc["sigma_hat"] = sol.estimated_activation;
    doc["offset_O"] = sol.offset;
    doc["stopped_by"] = to_string(sol.stopped_by);
    doc["evaluations"] = sol.evaluations;
    json trace = json::array();
    for (const TraceStep &step : sol.trace)
        trace.push_back({{"node", step.node},
                         {"gain", step.gain},
                         {"sigma_hat_after", step.sigma_hat_after}});
    doc["trace"] = trace;
    doc["config_echo"] = config_echo;
    return doc;
}

json eval_report_to_json(const EvalReport &report) {
    return {{"mean_activation", report.mean_activation},
            {"std_error", report.std_error},
            {"samples", report.samples},
            {"normalized", report.normalized}};
}

namespace {

std::string join_seeds(const TapSolution &sol) {
    std::ostringstream out;
    for (std::size_t i = 0; i < sol.order.size(); ++i) {
        if (i)
            out << ';';
        out << sol.order[i];
    }
    return out.str();
}

} // namespace

std::string results_csv_header() {
    return "schema_version,threshold,algorithm,alpha,seed_count,seeds,mean_activation,"
           "std_error,normalized,sigma_hat,offset_O,stopped_by,runtime_ms,master_seed";
}

std::string results_csv_row(int schema_version, double threshold, const std::string &algorithm,
                            double alpha, const TapSolution &sol, const EvalReport &eval,
                            double runtime_ms, std::uint64_t master_seed) {
    std::ostringstream out;
    out << schema_version << ',' << threshold << ',' << algorithm << ',' << alpha << ','
        << sol.order.size() << ',' << '"' << join_seeds(sol) << '"' << ','
        << eval.mean_activation << ',' << eval.std_error << ',' << eval.normalized << ','
        << sol.estimated_activation << ',' << sol.offset << ',' << to_string(sol.stopped_by)
        << ',' << runtime_ms << ',' << master_seed;
    return out.str();
}

std::string sweep_csv_header() {
    return "schema_version,ep_max,seed_count,mean_activation,normalized,external_fraction,"
           "sigma_hat,offset_O,runtime_ms,master_seed";
}

std::string sweep_csv_row(int schema_version, double ep_max, const TapSolution &sol,
                          const EvalReport &eval, double external_fraction, double runtime_ms,
                          std::uint64_t master_seed) {
    std::ostringstream out;
    out << schema_version << ',' << ep_max << ',' << sol.order.size() << ','
        << eval.mean_activation << ',' << eval.normalized << ',' << external_fraction << ','
        << sol.estimated_activation << ',' << sol.offset << ',' << runtime_ms << ','
        << master_seed;
    return out.str();
}

} // namespace tap
