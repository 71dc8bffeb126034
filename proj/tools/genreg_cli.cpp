#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "genreg/genreg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Fills CLI flags from a JSON config file; flags given on the command line
// win. Keys are the long option names with dashes replaced by underscores.
struct ConfigBinder {
    CLI::App* app = nullptr;
    json cfg;
    bool loaded = false;
    std::vector<std::string> known;

    void load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw genreg::ConfigError("cannot open config file: " + path);
        try {
            in >> cfg;
        } catch (const json::exception& e) {
            throw genreg::ConfigError(std::string("config parse: ") + e.what());
        }
        if (!cfg.is_object())
            throw genreg::ConfigError("config file must hold a JSON object");
        loaded = true;
    }

    template <typename T>
    void maybe(const std::string& flag, T& target) {
        std::string key = flag.substr(2);
        for (char& ch : key)
            if (ch == '-') ch = '_';
        known.push_back(key);
        if (!loaded || !cfg.contains(key) || app->count(flag) > 0) return;
        try {
            target = cfg.at(key).get<T>();
        } catch (const json::exception& e) {
            throw genreg::ConfigError("config key '" + key + "': " + e.what());
        }
    }

    void finish() const {
        if (!loaded) return;
        for (auto it = cfg.begin(); it != cfg.end(); ++it) {
            bool ok = false;
            for (const std::string& k : known)
                if (k == it.key()) {
                    ok = true;
                    break;
                }
            if (!ok)
                throw genreg::ConfigError("config key '" + it.key() +
                                          "' is not a flag of this command");
        }
    }
};

struct GaCliOptions {
    genreg::GaConfig ga;
    std::string mutation = "adaptive";
    std::string assoc = "cor";
    std::string init_kind = "lasso";
    std::string init_file;
    double kappa = 0.0;  // 0 = default 3.5 log d

    void attach(CLI::App* sub) {
        sub->add_option("--pop-size", ga.population_size,
                        "Population size K (0 = auto)");
        sub->add_option("--mutation-rate", ga.mutation_rate,
                        "Base mutation rate (0 = 1/d)");
        sub->add_option("--mutation", mutation, "uniform or adaptive")
            ->check(CLI::IsMember({"uniform", "adaptive"}));
        sub->add_option("--assoc", assoc,
                        "Association measure: cor or holp")
            ->check(CLI::IsMember({"cor", "holp"}));
        sub->add_option("--term-alpha", ga.termination_alpha,
                        "Termination test level");
        sub->add_option("--term-gap", ga.termination_gap,
                        "Generations between compared populations");
        sub->add_option("--max-gen", ga.max_generations,
                        "Generation cap");
        sub->add_flag("--terminate-on-reject", ga.terminate_on_reject,
                      "Stop when the comparison test rejects instead of "
                      "when it stabilizes");
        sub->add_option("--seed", ga.seed, "Random seed");
        sub->add_option("--init", init_kind,
                        "Initialization: lasso, random, or explicit")
            ->check(CLI::IsMember({"lasso", "random", "explicit"}));
        sub->add_option("--init-file", init_file,
                        "Mask file for --init explicit");
        sub->add_option("--kappa", kappa,
                        "GIC size penalty (0 = 3.5 log d)");
    }

    void bind(ConfigBinder& b) {
        b.maybe("--pop-size", ga.population_size);
        b.maybe("--mutation-rate", ga.mutation_rate);
        b.maybe("--mutation", mutation);
        b.maybe("--assoc", assoc);
        b.maybe("--term-alpha", ga.termination_alpha);
        b.maybe("--term-gap", ga.termination_gap);
        b.maybe("--max-gen", ga.max_generations);
        b.maybe("--terminate-on-reject", ga.terminate_on_reject);
        b.maybe("--seed", ga.seed);
        b.maybe("--init", init_kind);
        b.maybe("--init-file", init_file);
        b.maybe("--kappa", kappa);
    }

    genreg::GaConfig resolve() {
        ga.mutation_kind = mutation == "uniform"
                               ? genreg::MutationKind::uniform
                               : genreg::MutationKind::adaptive;
        ga.association_kind = assoc == "holp"
                                  ? genreg::AssociationKind::holp
                                  : genreg::AssociationKind::marginal_correlation;
        return ga;
    }

    genreg::InitConfig init_config() const {
        genreg::InitConfig init;
        if (init_kind == "lasso") {
            init.kind = genreg::InitKind::lasso_path;
        } else if (init_kind == "random") {
            init.kind = genreg::InitKind::random_assoc;
        } else {
            init.kind = genreg::InitKind::explicit_masks;
            if (init_file.empty())
                throw genreg::ConfigError(
                    "--init explicit requires --init-file");
            init.masks = genreg::load_masks_file(init_file);
        }
        return init;
    }

    genreg::GicConfig gic_config(const genreg::Dataset& data) const {
        genreg::GicConfig cfg = genreg::default_gic_config(data);
        if (kappa > 0.0) cfg.kappa_n = kappa;
        return cfg;
    }
};

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw genreg::ConfigError("cannot create output directory: " + dir);
}

json mask_report(const genreg::Dataset& data, const genreg::ModelMask& m) {
    json names = json::array();
    for (int j = 0; j < m.dimension(); ++j)
        if (m.test(j)) names.push_back(data.column_names[size_t(j)]);
    return json{{"mask", m.to_string()},
                {"size", m.count()},
                {"variables", names}};
}

struct SearchOutcome {
    genreg::GaResult ga;
    genreg::CandidateSet candidates;
    genreg::GicConfig gic_cfg;
};

SearchOutcome run_search(const genreg::Dataset& data, GaCliOptions& opts) {
    genreg::GaConfig gacfg = opts.resolve();
    genreg::GicConfig gcfg = opts.gic_config(data);
    genreg::FitnessLedger ledger;
    genreg::Population initial = genreg::build_initial_population(
        data, opts.init_config(), gacfg, gcfg, ledger);
    genreg::GaResult ga = genreg::run_ga(data, gacfg, initial, gcfg, ledger);
    std::vector<genreg::ModelMask> pool;
    for (const genreg::Member& m : ga.final_population.members)
        pool.push_back(m.mask);
    genreg::CandidateSet cands = genreg::make_candidate_set(data, pool, gcfg);
    return {std::move(ga), std::move(cands), gcfg};
}

void cmd_search(const std::string& data_path, bool no_header,
                GaCliOptions& opts, const std::string& out_dir) {
    genreg::Dataset data = genreg::load_dataset_csv_file(data_path, no_header);
    SearchOutcome res = run_search(data, opts);

    json report{
        {"n", data.n()},
        {"d", data.d()},
        {"population_size", res.ga.final_population.size()},
        {"generations", res.ga.generations_run},
        {"terminated_by_test", res.ga.terminated_by_test},
        {"models_evaluated", res.ga.models_evaluated},
        {"best", mask_report(data, res.ga.best)},
        {"best_gic", -res.ga.best_fitness},
        {"candidates", res.candidates.masks.size()}};

    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        genreg::write_masks_file((fs::path(out_dir) / "candidates.txt").string(),
                                 res.candidates.masks);
        std::ofstream out(fs::path(out_dir) / "report.json");
        out << report.dump(2) << "\n";
    }
    std::cout << report.dump(2) << "\n";
}

void cmd_simulate(std::vector<int> case_ids, int n, int d, int s, double rho,
                  int reps, uint64_t master_seed, double sms_alpha,
                  int sms_resamples, GaCliOptions& opts,
                  const std::string& out_dir) {
    genreg::ExperimentConfig cfg;
    if (case_ids.empty()) case_ids.push_back(1);
    for (int c : case_ids) {
        genreg::CaseSpec spec;
        spec.case_id = c;
        spec.n = n;
        spec.d = d;
        spec.s = s;
        spec.rho = rho;
        cfg.cases.push_back(spec);
    }
    cfg.replicates = reps;
    cfg.master_seed = master_seed;
    cfg.ga = opts.resolve();
    cfg.init = opts.init_config();
    cfg.sms_alpha = sms_alpha;
    cfg.sms_resamples = sms_resamples;
    if (opts.kappa > 0.0) cfg.gic_overrides.kappa_n = opts.kappa;

    genreg::ExperimentReport report = genreg::run_experiment(cfg);

    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        genreg::write_metrics_csv(report,
                                  (fs::path(out_dir) / "metrics.csv").string());
        genreg::write_soil_csv(report,
                               (fs::path(out_dir) / "soil.csv").string());
        genreg::write_summary_json(
            report, (fs::path(out_dir) / "summary.json").string());
    }
    std::cout << genreg::experiment_summary_json(report).dump(2) << "\n";
}

void cmd_sms(const std::string& data_path, bool no_header,
             const std::string& cand_path, double alpha, int resamples,
             uint64_t seed, double kappa, const std::string& out_dir) {
    genreg::Dataset data = genreg::load_dataset_csv_file(data_path, no_header);
    std::vector<genreg::ModelMask> masks = genreg::load_masks_file(cand_path);
    genreg::GicConfig gcfg = genreg::default_gic_config(data);
    if (kappa > 0.0) gcfg.kappa_n = kappa;
    genreg::CandidateSet cands = genreg::make_candidate_set(data, masks, gcfg);
    genreg::SmsResult sms =
        genreg::survival_model_set(data, cands, gcfg, alpha, resamples, seed);

    json models = json::array();
    for (size_t k = 0; k < cands.masks.size(); ++k) {
        const genreg::SmsRecord& rec = sms.records[k];
        models.push_back({{"mask", cands.masks[k].to_string()},
                          {"gic", cands.gics[k]},
                          {"dis_p_value", rec.dis_p_value},
                          {"dis_rejected", rec.dis_rejected},
                          {"sup_rejected", rec.sup_rejected},
                          {"survives", !rec.eliminated}});
    }
    json report{{"alpha", alpha},
                {"reference", cands.masks[size_t(cands.best_index)].to_string()},
                {"candidates", cands.masks.size()},
                {"survivors", sms.survivors.size()},
                {"models", models}};

    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        std::ofstream rep(fs::path(out_dir) / "report.json");
        rep << report.dump(2) << "\n";
        std::ofstream csv(fs::path(out_dir) / "models.csv");
        csv << std::setprecision(17)
            << "mask,gic,dis_p_value,dis_rejected,sup_rejected,survives\n";
        for (size_t k = 0; k < cands.masks.size(); ++k) {
            const genreg::SmsRecord& rec = sms.records[k];
            csv << cands.masks[k].to_string() << "," << cands.gics[k] << ","
                << rec.dis_p_value << "," << int(rec.dis_rejected) << ","
                << int(rec.sup_rejected) << "," << int(!rec.eliminated)
                << "\n";
        }
    }
    std::cout << report.dump(2) << "\n";
}

void cmd_average(const std::string& data_path, bool no_header,
                 const std::string& cand_path, const std::string& kind,
                 double kappa, const std::string& out_dir) {
    genreg::Dataset data = genreg::load_dataset_csv_file(data_path, no_header);
    std::vector<genreg::ModelMask> masks = genreg::load_masks_file(cand_path);
    genreg::GicConfig gcfg = genreg::default_gic_config(data);
    if (kappa > 0.0) gcfg.kappa_n = kappa;
    genreg::CandidateSet cands = genreg::make_candidate_set(data, masks, gcfg);

    genreg::WeightVector weights =
        kind == "al" ? genreg::al_weights(data, cands)
                     : genreg::gic_weights(cands.gics);
    Eigen::VectorXd yhat = genreg::model_average_predict(data, cands, weights);
    double in_sample = genreg::rmse(data.Y, yhat);

    json models = json::array();
    for (size_t k = 0; k < cands.masks.size(); ++k)
        models.push_back({{"mask", cands.masks[k].to_string()},
                          {"gic", cands.gics[k]},
                          {"weight", weights.w[k]}});
    json report{{"weights", kind},
                {"in_sample_rmse", in_sample},
                {"models", models}};

    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        std::ofstream rep(fs::path(out_dir) / "report.json");
        rep << report.dump(2) << "\n";
        std::ofstream csv(fs::path(out_dir) / "models.csv");
        csv << std::setprecision(17) << "mask,gic,weight\n";
        for (size_t k = 0; k < cands.masks.size(); ++k)
            csv << cands.masks[k].to_string() << "," << cands.gics[k] << ","
                << weights.w[k] << "\n";
        std::ofstream pred(fs::path(out_dir) / "predictions.csv");
        pred << std::setprecision(17) << "prediction\n";
        for (int i = 0; i < yhat.size(); ++i) pred << yhat[i] << "\n";
    }
    std::cout << report.dump(2) << "\n";
}

void cmd_soil(const std::string& data_path, bool no_header,
              const std::string& cand_path, double kappa,
              const std::string& out_dir) {
    genreg::Dataset data = genreg::load_dataset_csv_file(data_path, no_header);
    std::vector<genreg::ModelMask> masks = genreg::load_masks_file(cand_path);
    genreg::GicConfig gcfg = genreg::default_gic_config(data);
    if (kappa > 0.0) gcfg.kappa_n = kappa;
    genreg::CandidateSet cands = genreg::make_candidate_set(data, masks, gcfg);
    std::vector<double> importance =
        genreg::soil(cands, genreg::gic_weights(cands.gics));

    json vars = json::array();
    for (int j = 0; j < data.d(); ++j)
        vars.push_back({{"variable", data.column_names[size_t(j)]},
                        {"importance", importance[size_t(j)]}});
    json report{{"candidates", cands.masks.size()}, {"soil", vars}};

    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        std::ofstream csv(fs::path(out_dir) / "soil.csv");
        csv << std::setprecision(17) << "variable,name,value\n";
        for (int j = 0; j < data.d(); ++j)
            csv << (j + 1) << "," << data.column_names[size_t(j)] << ","
                << importance[size_t(j)] << "\n";
        std::ofstream rep(fs::path(out_dir) / "report.json");
        rep << report.dump(2) << "\n";
    }
    std::cout << report.dump(2) << "\n";
}

void cmd_schema_trace(const std::string& data_path, bool no_header,
                      const std::string& schema_path, GaCliOptions& opts,
                      const std::string& out_dir) {
    genreg::Dataset data = genreg::load_dataset_csv_file(data_path, no_header);
    std::vector<genreg::Schema> schemata =
        genreg::load_schemata_file(schema_path);
    for (const genreg::Schema& h : schemata)
        if (h.dimension() != data.d())
            throw genreg::ConfigError("schema length must equal d");

    genreg::GaConfig gacfg = opts.resolve();
    genreg::GicConfig gcfg = opts.gic_config(data);
    genreg::FitnessLedger ledger;
    genreg::Population initial = genreg::build_initial_population(
        data, opts.init_config(), gacfg, gcfg, ledger);

    std::vector<genreg::SchemaTrace> traces = genreg::trace_schemata(
        [&](const genreg::GaObserver& obs) {
            genreg::run_ga(data, gacfg, initial, gcfg, ledger, obs);
        },
        schemata);

    std::ostringstream csv;
    csv << std::setprecision(17)
        << "schema,generation,match_count,alpha_sel,mean_fitness\n";
    for (const genreg::SchemaTrace& tr : traces)
        for (size_t t = 0; t < tr.match_count.size(); ++t)
            csv << tr.schema.to_string() << "," << t << ","
                << tr.match_count[t] << "," << tr.alpha_sel[t] << ","
                << tr.mean_fitness[t] << "\n";

    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        std::ofstream out(fs::path(out_dir) / "trace.csv");
        out << csv.str();
    }
    std::cout << csv.str();
}

void cmd_markov_verify(int d, int k, double pi,
                       const std::string& table_path,
                       std::vector<double> alphas,
                       const std::string& out_file) {
    genreg::ChainSpec spec;
    spec.d = d;
    spec.K = k;
    spec.pi_m = pi;
    spec.fitness_table = genreg::load_fitness_table_file(table_path);
    if (static_cast<int>(spec.fitness_table.size()) != spec.mask_count())
        throw genreg::ConfigError("fitness table must have 2^d lines");
    if (alphas.empty()) alphas = {0.1, 0.05, 0.01};

    genreg::ChainResult res = genreg::analyze_chain(spec, alphas);

    double m_max_mass = 0.0;
    for (int idx : res.m_max) m_max_mass += res.stationary[idx];
    double off_mass = 1.0 - m_max_mass;
    double worst_row = 0.0;
    for (int i = 0; i < res.transition.rows(); ++i)
        worst_row =
            std::max(worst_row, std::fabs(res.transition.row(i).sum() - 1.0));

    json talpha = json::array();
    for (const auto& [a, T] : res.t_alpha)
        talpha.push_back({{"alpha", a}, {"t_alpha", T}});
    json report{
        {"states", res.states.size()},
        {"best_mask", genreg::ModelMask::from_code(spec.d,
                                                   uint64_t(res.best_code))
                          .to_string()},
        {"xi", res.xi},
        {"t_alpha", talpha},
        {"stationary_m_max_mass", m_max_mass},
        {"stationary_off_mass", off_mass},
        {"max_row_sum_error", worst_row}};
    if (res.states.size() <= 64) {
        json st = json::array();
        for (size_t i = 0; i < res.states.size(); ++i) {
            json masks = json::array();
            for (int code : res.states[i])
                masks.push_back(
                    genreg::ModelMask::from_code(spec.d, uint64_t(code))
                        .to_string());
            st.push_back({{"state", masks}, {"mass", res.stationary[Eigen::Index(i)]}});
        }
        report["stationary"] = st;
    }

    if (!out_file.empty()) {
        std::ofstream out(out_file);
        if (!out)
            throw genreg::ConfigError("cannot open output file: " + out_file);
        out << report.dump(2) << "\n";
    }
    std::cout << report.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Genetic search for high-quality regression models with "
        "multi-model inference and exact verification labs"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand(
        "simulate", "Run seeded end-to-end experiments on synthetic cases");
    std::vector<int> sim_cases;
    int sim_n = 200, sim_d = 400, sim_s = 6, sim_reps = 20;
    double sim_rho = 0.5, sim_alpha = 0.05;
    int sim_resamples = 1000;
    uint64_t sim_seed = 0;
    std::string sim_out, sim_config;
    GaCliOptions sim_ga;
    sim->add_option("--case", sim_cases, "Case id 1-6 (repeatable)");
    sim->add_option("--n", sim_n, "Observations");
    sim->add_option("--d", sim_d, "Predictors");
    sim->add_option("--s", sim_s, "True support size");
    sim->add_option("--rho", sim_rho, "Toeplitz correlation");
    sim->add_option("--reps", sim_reps, "Replicates per case");
    sim->add_option("--sms-alpha", sim_alpha, "Survival-set level");
    sim->add_option("--sms-resamples", sim_resamples,
                    "Bootstrap resamples for the survival set");
    sim->add_option("--out", sim_out, "Output directory");
    sim->add_option("--config", sim_config, "JSON config file");
    sim_ga.attach(sim);
    sim->callback([&] {
        ConfigBinder b{sim};
        if (!sim_config.empty()) b.load(sim_config);
        b.maybe("--case", sim_cases);
        b.maybe("--n", sim_n);
        b.maybe("--d", sim_d);
        b.maybe("--s", sim_s);
        b.maybe("--rho", sim_rho);
        b.maybe("--reps", sim_reps);
        b.maybe("--sms-alpha", sim_alpha);
        b.maybe("--sms-resamples", sim_resamples);
        b.maybe("--out", sim_out);
        sim_ga.bind(b);
        b.finish();
        cmd_simulate(sim_cases, sim_n, sim_d, sim_s, sim_rho, sim_reps,
                     sim_ga.ga.seed, sim_alpha, sim_resamples, sim_ga,
                     sim_out);
    });

    // search
    auto* search = app.add_subcommand(
        "search", "Run the genetic search on a CSV dataset");
    std::string search_data, search_out, search_config;
    bool search_no_header = false;
    GaCliOptions search_ga;
    search->add_option("--data", search_data, "CSV file, response last");
    search->add_flag("--no-header", search_no_header,
                     "Treat the first CSV line as data");
    search->add_option("--out", search_out, "Output directory");
    search->add_option("--config", search_config, "JSON config file");
    search_ga.attach(search);
    search->callback([&] {
        ConfigBinder b{search};
        if (!search_config.empty()) b.load(search_config);
        b.maybe("--data", search_data);
        b.maybe("--no-header", search_no_header);
        b.maybe("--out", search_out);
        search_ga.bind(b);
        b.finish();
        if (search_data.empty())
            throw genreg::ConfigError("search: --data is required");
        cmd_search(search_data, search_no_header, search_ga, search_out);
    });

    // schema-trace
    auto* trace = app.add_subcommand(
        "schema-trace", "Track schema match counts across a GA run");
    std::string trace_data, trace_schemata, trace_out, trace_config;
    bool trace_no_header = false;
    GaCliOptions trace_ga;
    trace->add_option("--data", trace_data, "CSV file, response last");
    trace->add_option("--schemata", trace_schemata,
                      "File of {0,1,*} patterns, one per line");
    trace->add_flag("--no-header", trace_no_header,
                    "Treat the first CSV line as data");
    trace->add_option("--out", trace_out, "Output directory");
    trace->add_option("--config", trace_config, "JSON config file");
    trace_ga.attach(trace);
    trace->callback([&] {
        ConfigBinder b{trace};
        if (!trace_config.empty()) b.load(trace_config);
        b.maybe("--data", trace_data);
        b.maybe("--schemata", trace_schemata);
        b.maybe("--no-header", trace_no_header);
        b.maybe("--out", trace_out);
        trace_ga.bind(b);
        b.finish();
        if (trace_data.empty() || trace_schemata.empty())
            throw genreg::ConfigError(
                "schema-trace: --data and --schemata are required");
        cmd_schema_trace(trace_data, trace_no_header, trace_schemata,
                         trace_ga, trace_out);
    });

    // markov-verify
    auto* markov = app.add_subcommand(
        "markov-verify",
        "Exact transition/stationary analysis of the small-instance chain");
    int mk_d = 2, mk_k = 2;
    double mk_pi = 0.2;
    std::string mk_table, mk_out, mk_config;
    std::vector<double> mk_alphas;
    markov->add_option("--d", mk_d, "Mask length (small)");
    markov->add_option("--k", mk_k, "Population size");
    markov->add_option("--pi", mk_pi, "Mutation rate");
    markov->add_option("--fitness-table", mk_table,
                       "File with 2^d fitness lines (line i: bit j of the "
                       "mask equals (i>>j)&1)");
    markov->add_option("--alpha", mk_alphas, "Horizon levels (repeatable)");
    markov->add_option("--out", mk_out, "Output JSON file");
    markov->add_option("--config", mk_config, "JSON config file");
    markov->callback([&] {
        ConfigBinder b{markov};
        if (!mk_config.empty()) b.load(mk_config);
        b.maybe("--d", mk_d);
        b.maybe("--k", mk_k);
        b.maybe("--pi", mk_pi);
        b.maybe("--fitness-table", mk_table);
        b.maybe("--alpha", mk_alphas);
        b.maybe("--out", mk_out);
        b.finish();
        if (mk_table.empty())
            throw genreg::ConfigError(
                "markov-verify: --fitness-table is required");
        cmd_markov_verify(mk_d, mk_k, mk_pi, mk_table, mk_alphas, mk_out);
    });

    // sms
    auto* sms = app.add_subcommand(
        "sms", "Survival model set over a candidate file");
    std::string sms_data, sms_cands, sms_out, sms_config;
    bool sms_no_header = false;
    double sms_alpha = 0.05, sms_kappa = 0.0;
    int sms_resamples = 5000;
    uint64_t sms_seed = 0x5ede5ULL;
    sms->add_option("--data", sms_data, "CSV file, response last");
    sms->add_option("--candidates", sms_cands, "Mask file, one 0/1 string per line");
    sms->add_flag("--no-header", sms_no_header,
                  "Treat the first CSV line as data");
    sms->add_option("--alpha", sms_alpha, "Test level");
    sms->add_option("--resamples", sms_resamples, "Bootstrap resamples");
    sms->add_option("--seed", sms_seed, "Bootstrap seed");
    sms->add_option("--kappa", sms_kappa, "GIC size penalty (0 = 3.5 log d)");
    sms->add_option("--out", sms_out, "Output directory");
    sms->add_option("--config", sms_config, "JSON config file");
    sms->callback([&] {
        ConfigBinder b{sms};
        if (!sms_config.empty()) b.load(sms_config);
        b.maybe("--data", sms_data);
        b.maybe("--candidates", sms_cands);
        b.maybe("--no-header", sms_no_header);
        b.maybe("--alpha", sms_alpha);
        b.maybe("--resamples", sms_resamples);
        b.maybe("--seed", sms_seed);
        b.maybe("--kappa", sms_kappa);
        b.maybe("--out", sms_out);
        b.finish();
        if (sms_data.empty() || sms_cands.empty())
            throw genreg::ConfigError(
                "sms: --data and --candidates are required");
        cmd_sms(sms_data, sms_no_header, sms_cands, sms_alpha, sms_resamples,
                sms_seed, sms_kappa, sms_out);
    });

    // average
    auto* avg = app.add_subcommand(
        "average", "Model-averaged predictions over a candidate file");
    std::string avg_data, avg_cands, avg_kind = "gic", avg_out, avg_config;
    bool avg_no_header = false;
    double avg_kappa = 0.0;
    avg->add_option("--data", avg_data, "CSV file, response last");
    avg->add_option("--candidates", avg_cands, "Mask file");
    avg->add_flag("--no-header", avg_no_header,
                  "Treat the first CSV line as data");
    avg->add_option("--weights", avg_kind, "gic or al")
        ->check(CLI::IsMember({"gic", "al"}));
    avg->add_option("--kappa", avg_kappa, "GIC size penalty (0 = 3.5 log d)");
    avg->add_option("--out", avg_out, "Output directory");
    avg->add_option("--config", avg_config, "JSON config file");
    avg->callback([&] {
        ConfigBinder b{avg};
        if (!avg_config.empty()) b.load(avg_config);
        b.maybe("--data", avg_data);
        b.maybe("--candidates", avg_cands);
        b.maybe("--no-header", avg_no_header);
        b.maybe("--weights", avg_kind);
        b.maybe("--kappa", avg_kappa);
        b.maybe("--out", avg_out);
        b.finish();
        if (avg_data.empty() || avg_cands.empty())
            throw genreg::ConfigError(
                "average: --data and --candidates are required");
        cmd_average(avg_data, avg_no_header, avg_cands, avg_kind, avg_kappa,
                    avg_out);
    });

    // soil
    auto* soil = app.add_subcommand(
        "soil", "Variable importance over a candidate file");
    std::string soil_data, soil_cands, soil_out, soil_config;
    bool soil_no_header = false;
    double soil_kappa = 0.0;
    soil->add_option("--data", soil_data, "CSV file, response last");
    soil->add_option("--candidates", soil_cands, "Mask file");
    soil->add_flag("--no-header", soil_no_header,
                   "Treat the first CSV line as data");
    soil->add_option("--kappa", soil_kappa, "GIC size penalty (0 = 3.5 log d)");
    soil->add_option("--out", soil_out, "Output directory");
    soil->add_option("--config", soil_config, "JSON config file");
    soil->callback([&] {
        ConfigBinder b{soil};
        if (!soil_config.empty()) b.load(soil_config);
        b.maybe("--data", soil_data);
        b.maybe("--candidates", soil_cands);
        b.maybe("--no-header", soil_no_header);
        b.maybe("--kappa", soil_kappa);
        b.maybe("--out", soil_out);
        b.finish();
        if (soil_data.empty() || soil_cands.empty())
            throw genreg::ConfigError(
                "soil: --data and --candidates are required");
        cmd_soil(soil_data, soil_no_header, soil_cands, soil_kappa, soil_out);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const genreg::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const genreg::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
