#include "monas/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "monas/errors.hpp"
#include "monas/runlog.hpp"
#include "monas/textio.hpp"

namespace fs = std::filesystem;

namespace monas {

namespace {

void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                const std::string& context) {
    if (!j.is_object()) throw ConfigError(context + " must be an object");
    for (const auto& item : j.items()) {
        if (!allowed.count(item.key())) {
            throw ConfigError("unknown key '" + item.key() + "' in " + context);
        }
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << content;
}

nlohmann::json read_json_file(const std::string& path) {
    return nlohmann::json::parse(read_file(path));
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
    write_file(path, j.dump(2) + "\n");
}

CandidateOp op_from_name(const std::string& name) {
    if (name == "skip") return CandidateOp::skip();
    if (name.rfind("mbconv", 0) == 0 && name.size() == 9 && name[7] == '_') {
        return CandidateOp::mbconv(name[6] - '0', name[8] - '0');
    }
    throw ConfigError("unknown candidate op '" + name + "'");
}

ObjectiveSet objectives_from_json(const nlohmann::json& arr) {
    ObjectiveSet set;
    for (const auto& v : arr) set.push_back(objective_name_from_str(v.get<std::string>()));
    return set;
}

nlohmann::json objectives_to_json(const ObjectiveSet& set) {
    nlohmann::json arr = nlohmann::json::array();
    for (const ObjectiveName n : set) arr.push_back(objective_name_str(n));
    return arr;
}

void parse_engine(const nlohmann::json& j, EngineConfig& e) {
    check_keys(j,
               {"total_epochs", "warmup_epochs", "population_size", "survivors", "crossover_prob",
                "mutation_prob", "objectives", "potential_variant", "warmup_pool",
                "per_block_mutation_rate", "seed"},
               "engine");
    e.total_epochs = j.value("total_epochs", e.total_epochs);
    e.warmup_epochs = j.value("warmup_epochs", e.warmup_epochs);
    e.population_size = j.value("population_size", e.population_size);
    e.survivors = j.value("survivors", e.survivors);
    e.crossover_prob = j.value("crossover_prob", e.crossover_prob);
    e.mutation_prob = j.value("mutation_prob", e.mutation_prob);
    if (j.contains("objectives")) e.objectives = objectives_from_json(j.at("objectives"));
    if (j.contains("potential_variant")) {
        const std::string v = j.at("potential_variant").get<std::string>();
        if (v == "eq3") {
            e.potential_variant = PotentialVariant::Eq3;
        } else if (v == "intercept") {
            e.potential_variant = PotentialVariant::Intercept;
        } else {
            throw ConfigError("potential_variant must be 'eq3' or 'intercept'");
        }
    }
    e.warmup_pool = j.value("warmup_pool", e.warmup_pool);
    e.per_block_mutation_rate = j.value("per_block_mutation_rate", e.per_block_mutation_rate);
    e.seed = j.value("seed", e.seed);
}

void parse_space(const nlohmann::json& j, SearchSpace& s) {
    check_keys(j,
               {"num_layers", "blocks_per_layer", "calibration_strides", "stem_channels",
                "layer_channels", "ops", "bytes_per_param", "num_classes", "input_channels"},
               "space");
    s.num_layers = j.value("num_layers", s.num_layers);
    if (j.contains("blocks_per_layer")) s.blocks_per_layer = j.at("blocks_per_layer").get<std::vector<int>>();
    if (j.contains("calibration_strides")) s.calibration_strides = j.at("calibration_strides").get<std::vector<int>>();
    s.stem_channels = j.value("stem_channels", s.stem_channels);
    if (j.contains("layer_channels")) s.layer_channels = j.at("layer_channels").get<std::vector<int>>();
    if (j.contains("ops")) {
        s.ops.clear();
        for (const auto& name : j.at("ops")) s.ops.push_back(op_from_name(name.get<std::string>()));
    }
    s.bytes_per_param = j.value("bytes_per_param", s.bytes_per_param);
    s.num_classes = j.value("num_classes", s.num_classes);
    s.input_channels = j.value("input_channels", s.input_channels);
}

void parse_simulator(const nlohmann::json& j, SimulatorConfig& s) {
    check_keys(j,
               {"steps_per_epoch", "learn_rate", "interference_rate", "noise_sigma",
                "interaction_fraction", "interaction_scale", "main_effect_sigma", "base_offset"},
               "simulator");
    s.steps_per_epoch = j.value("steps_per_epoch", s.steps_per_epoch);
    s.learn_rate = j.value("learn_rate", s.learn_rate);
    s.interference_rate = j.value("interference_rate", s.interference_rate);
    s.noise_sigma = j.value("noise_sigma", s.noise_sigma);
    s.interaction_fraction = j.value("interaction_fraction", s.interaction_fraction);
    s.interaction_scale = j.value("interaction_scale", s.interaction_scale);
    s.main_effect_sigma = j.value("main_effect_sigma", s.main_effect_sigma);
    s.base_offset = j.value("base_offset", s.base_offset);
}

void parse_mlp(const nlohmann::json& j, MlpSpace& m, int& batch_size, AdamConfig& adam) {
    check_keys(j,
               {"slots", "base_width", "expansions", "batch_size", "learn_rate", "weight_decay"},
               "mlp");
    m.slots = j.value("slots", m.slots);
    m.base_width = j.value("base_width", m.base_width);
    if (j.contains("expansions")) m.expansions = j.at("expansions").get<std::vector<int>>();
    batch_size = j.value("batch_size", batch_size);
    adam.learn_rate = j.value("learn_rate", adam.learn_rate);
    adam.weight_decay = j.value("weight_decay", adam.weight_decay);
}

void parse_dataset(const nlohmann::json& j, DatasetSpec& d, std::uint64_t& seed) {
    check_keys(j, {"classes", "dims", "per_class", "warp_strength", "class_separation", "seed"},
               "dataset");
    d.classes = j.value("classes", d.classes);
    d.dims = j.value("dims", d.dims);
    d.per_class = j.value("per_class", d.per_class);
    d.warp_strength = j.value("warp_strength", d.warp_strength);
    d.class_separation = j.value("class_separation", d.class_separation);
    seed = j.value("seed", seed);
}

}  // namespace

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    check_keys(j,
               {"engine", "evaluator", "space", "simulator", "mlp", "dataset", "retrain_epochs",
                "seeds", "out_dir"},
               "config");
    RunConfig c;
    if (j.contains("engine")) parse_engine(j.at("engine"), c.engine);
    c.evaluator_kind = j.value("evaluator", c.evaluator_kind);
    if (j.contains("space")) parse_space(j.at("space"), c.space);
    if (j.contains("simulator")) parse_simulator(j.at("simulator"), c.simulator);
    if (j.contains("mlp")) parse_mlp(j.at("mlp"), c.mlp, c.mlp_batch_size, c.adam);
    if (j.contains("dataset")) parse_dataset(j.at("dataset"), c.dataset, c.dataset_seed);
    c.retrain_epochs = j.value("retrain_epochs", c.retrain_epochs);
    if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    c.out_dir = j.value("out_dir", c.out_dir);
    c.validate();
    return c;
}

RunConfig RunConfig::load_file(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("cannot parse " + path + ": " + e.what());
    }
    return from_json(j);
}

nlohmann::json RunConfig::to_json() const {
    nlohmann::json ops = nlohmann::json::array();
    for (const CandidateOp& op : space.ops) ops.push_back(op.name());
    nlohmann::json j{
        {"engine",
         {{"total_epochs", engine.total_epochs},
          {"warmup_epochs", engine.warmup_epochs},
          {"population_size", engine.population_size},
          {"survivors", engine.survivors},
          {"crossover_prob", engine.crossover_prob},
          {"mutation_prob", engine.mutation_prob},
          {"objectives", objectives_to_json(engine.objectives)},
          {"potential_variant",
           engine.potential_variant == PotentialVariant::Eq3 ? "eq3" : "intercept"},
          {"warmup_pool", engine.warmup_pool},
          {"per_block_mutation_rate", engine.per_block_mutation_rate},
          {"seed", engine.seed}}},
        {"evaluator", evaluator_kind},
        {"space",
         {{"num_layers", space.num_layers},
          {"blocks_per_layer", space.blocks_per_layer},
          {"calibration_strides", space.calibration_strides},
          {"stem_channels", space.stem_channels},
          {"layer_channels", space.layer_channels},
          {"ops", ops},
          {"bytes_per_param", space.bytes_per_param},
          {"num_classes", space.num_classes},
          {"input_channels", space.input_channels}}},
        {"simulator",
         {{"steps_per_epoch", simulator.steps_per_epoch},
          {"learn_rate", simulator.learn_rate},
          {"interference_rate", simulator.interference_rate},
          {"noise_sigma", simulator.noise_sigma},
          {"interaction_fraction", simulator.interaction_fraction},
          {"interaction_scale", simulator.interaction_scale},
          {"main_effect_sigma", simulator.main_effect_sigma},
          {"base_offset", simulator.base_offset}}},
        {"mlp",
         {{"slots", mlp.slots},
          {"base_width", mlp.base_width},
          {"expansions", mlp.expansions},
          {"batch_size", mlp_batch_size},
          {"learn_rate", adam.learn_rate},
          {"weight_decay", adam.weight_decay}}},
        {"dataset",
         {{"classes", dataset.classes},
          {"dims", dataset.dims},
          {"per_class", dataset.per_class},
          {"warp_strength", dataset.warp_strength},
          {"class_separation", dataset.class_separation},
          {"seed", dataset_seed}}},
        {"retrain_epochs", retrain_epochs},
        {"seeds", seeds},
        {"out_dir", out_dir},
    };
    return j;
}

void RunConfig::validate() const {
    engine.validate();
    if (evaluator_kind != "simulator" && evaluator_kind != "mlp") {
        throw ConfigError("evaluator must be 'simulator' or 'mlp'");
    }
    space.validate();
    dataset.validate();
    if (evaluator_kind == "mlp") {
        MlpSpace m = mlp;
        m.input_dims = dataset.dims;
        m.num_classes = dataset.classes;
        m.validate();
        if (mlp_batch_size < 1) throw ConfigError("mlp batch_size must be positive");
    }
    if (simulator.steps_per_epoch < 1) throw ConfigError("simulator steps_per_epoch must be positive");
    if (seeds.empty()) throw ConfigError("at least one seed is required");
    if (retrain_epochs < 0) throw ConfigError("retrain_epochs must be non-negative");
}

std::string objective_label(const ObjectiveSet& objectives) {
    std::string label;
    for (const ObjectiveName n : objectives) {
        switch (n) {
            case ObjectiveName::Accuracy: label += 'A'; break;
            case ObjectiveName::Potential: label += 'P'; break;
            case ObjectiveName::SizeMb: label += 'S'; break;
        }
    }
    return label;
}

namespace {

std::unique_ptr<SearchDomain> make_domain(const RunConfig& config) {
    if (config.evaluator_kind == "simulator") {
        return std::make_unique<MbconvDomain>(config.space);
    }
    MlpSpace space = config.mlp;
    space.input_dims = config.dataset.dims;
    space.num_classes = config.dataset.classes;
    return std::make_unique<MlpDomain>(space);
}

}  // namespace

RunContext make_context(const RunConfig& config) {
    RunContext ctx;
    ctx.domain = make_domain(config);
    if (config.evaluator_kind == "simulator") {
        ctx.evaluator =
            std::make_unique<Simulator>(ctx.domain->shape(), config.simulator, config.engine.seed);
        return ctx;
    }
    ctx.dataset = std::make_unique<Dataset>(make_dataset(config.dataset, config.dataset_seed));
    const auto* mlp_domain = static_cast<const MlpDomain*>(ctx.domain.get());
    ctx.evaluator = std::make_unique<MlpSupernet>(mlp_domain->space(), ctx.dataset.get(),
                                                  config.engine.seed, config.adam,
                                                  config.mlp_batch_size);
    return ctx;
}

int quarter_of_epoch(int epoch, int warmup_epochs, int total_epochs) {
    const int span = total_epochs - warmup_epochs;
    const int idx = (epoch - warmup_epochs - 1) * 4 / span;
    return std::clamp(idx, 0, 3);
}

int half_of_epoch(int epoch, int warmup_epochs, int total_epochs) {
    const int span = total_epochs - warmup_epochs;
    const int idx = (epoch - warmup_epochs - 1) * 2 / span;
    return std::clamp(idx, 0, 1);
}

std::vector<long> distinct_trained_per_quarter(const std::vector<RunEvent>& events,
                                               const EngineConfig& config) {
    std::array<std::set<GenomeId>, 4> per_quarter;
    for (const RunEvent& e : events) {
        if (e.kind != EventKind::Train) continue;
        per_quarter[static_cast<std::size_t>(
                        quarter_of_epoch(e.epoch, config.warmup_epochs, config.total_epochs))]
            .insert(e.id);
    }
    std::vector<long> counts;
    for (const auto& q : per_quarter) counts.push_back(static_cast<long>(q.size()));
    return counts;
}

nlohmann::json summarize_run(const RunConfig& config, const std::vector<RunEvent>& events,
                             const Counters& counters, std::size_t pareto_size, std::uint64_t seed,
                             const SearchDomain& domain) {
    const EngineConfig& eng = config.engine;
    std::vector<long> evals_per_quarter(4, 0);
    const RunEvent* best = nullptr;
    for (const RunEvent& e : events) {
        if (e.kind != EventKind::Eval) continue;
        ++evals_per_quarter[static_cast<std::size_t>(
            quarter_of_epoch(e.epoch, eng.warmup_epochs, eng.total_epochs))];
        if (e.epoch != eng.total_epochs) continue;
        if (!best || *e.accuracy > *best->accuracy ||
            (*e.accuracy == *best->accuracy && e.id < best->id)) {
            best = &e;
        }
    }

    nlohmann::json best_final;
    if (best) {
        best_final = nlohmann::json{{"id", best->id},
                                    {"choices", best->choices},
                                    {"accuracy", *best->accuracy},
                                    {"size_mb", domain.size_mb(Genome{best->choices})}};
    }

    return nlohmann::json{
        {"seed", seed},
        {"objectives", objectives_to_json(eng.objectives)},
        {"objective_label", objective_label(eng.objectives)},
        {"evaluator", config.evaluator_kind},
        {"counters",
         {{"train_steps", counters.train_steps},
          {"distinct_genomes_trained", counters.distinct_genomes_trained}}},
        {"distinct_trained_per_quarter", distinct_trained_per_quarter(events, eng)},
        {"evals_per_quarter", evals_per_quarter},
        {"best_final_accuracy", best ? nlohmann::json(*best->accuracy) : nlohmann::json()},
        {"best_final", best_final},
        {"pareto_size", pareto_size},
        {"wall_clock_ms", counters.wall_clock_ms},
    };
}

nlohmann::json run_one_seed(const RunConfig& config, std::uint64_t seed,
                            const std::string& seed_dir) {
    fs::create_directories(seed_dir);
    try {
        RunConfig cfg = config;
        cfg.engine.seed = seed;
        cfg.seeds = {seed};
        RunContext ctx = make_context(cfg);
        Engine engine(cfg.engine, ctx.domain.get(), ctx.evaluator.get());
        const SearchResult result = engine.run_search();

        write_run_log(result.events, seed_dir + "/run.log");
        write_json_file(seed_dir + "/ledger.json", ledger_to_json(result.ledger));

        nlohmann::json front = nlohmann::json::array();
        for (const Candidate& c : result.pareto_front) {
            nlohmann::json names = nlohmann::json::array();
            nlohmann::json values = nlohmann::json::array();
            for (std::size_t i = 0; i < c.objectives.size(); ++i) {
                names.push_back(objective_name_str(c.objectives.names[i]));
                values.push_back(c.objectives.values[i]);
            }
            front.push_back(nlohmann::json{{"id", c.id},
                                           {"choices", c.genome.choices},
                                           {"objectives", {{"names", names}, {"values", values}}},
                                           {"size_mb", ctx.domain->size_mb(c.genome)}});
        }
        write_json_file(seed_dir + "/pareto.json",
                        nlohmann::json{{"space", ctx.domain->id()}, {"front", front}});

        const nlohmann::json summary = summarize_run(cfg, result.events, result.counters,
                                                     result.pareto_front.size(), seed, *ctx.domain);
        write_json_file(seed_dir + "/summary.json", summary);
        write_json_file(seed_dir + "/config.json", cfg.to_json());
        return summary;
    } catch (...) {
        fs::remove_all(seed_dir);
        throw;
    }
}

void run_search_command(const RunConfig& config, const std::string& out_dir) {
    fs::create_directories(out_dir);
    nlohmann::json seeds = nlohmann::json::array();
    for (const std::uint64_t seed : config.seeds) seeds.push_back(seed);
    write_json_file(out_dir + "/runset.json",
                    nlohmann::json{{"objective_label", objective_label(config.engine.objectives)},
                                   {"objectives", objectives_to_json(config.engine.objectives)},
                                   {"evaluator", config.evaluator_kind},
                                   {"seeds", seeds}});
    for (const std::uint64_t seed : config.seeds) {
        run_one_seed(config, seed, out_dir + "/seed_" + std::to_string(seed));
    }
}

void verify_run_dir(const std::string& seed_dir) {
    const RunConfig config = RunConfig::from_json(read_json_file(seed_dir + "/config.json"));
    const std::vector<RunEvent> events = read_run_log(seed_dir + "/run.log");
    const LogReplay replay = replay_events(events);

    const std::string ledger_bytes = ledger_to_json(replay.ledger).dump(2) + "\n";
    if (ledger_bytes != read_file(seed_dir + "/ledger.json")) {
        throw Error(seed_dir + ": replayed ledger differs from ledger.json");
    }

    verify_selections(events, config.engine);

    const nlohmann::json stored = read_json_file(seed_dir + "/summary.json");
    Counters counters;
    counters.train_steps = replay.train_steps;
    counters.distinct_genomes_trained = replay.distinct_trained;
    const std::unique_ptr<SearchDomain> domain = make_domain(config);
    nlohmann::json recomputed =
        summarize_run(config, events, counters, stored.at("pareto_size").get<std::size_t>(),
                      config.engine.seed, *domain);
    recomputed.erase("wall_clock_ms");
    nlohmann::json stored_det = stored;
    stored_det.erase("wall_clock_ms");
    if (recomputed.dump(2) != stored_det.dump(2)) {
        throw Error(seed_dir + ": replayed summary differs from summary.json");
    }
}

nlohmann::json compare_runsets(const std::vector<std::string>& dirs) {
    if (dirs.size() < 2) throw ConfigError("compare needs at least two run directories");

    struct SetInfo {
        std::string dir;
        std::string label;
        nlohmann::json objectives;
        std::vector<std::uint64_t> seeds;
        std::map<std::uint64_t, nlohmann::json> summaries;
    };
    std::vector<SetInfo> sets;
    for (const std::string& dir : dirs) {
        SetInfo info;
        info.dir = dir;
        const nlohmann::json rs = read_json_file(dir + "/runset.json");
        info.label = rs.at("objective_label").get<std::string>();
        info.objectives = rs.at("objectives");
        for (const auto& s : rs.at("seeds")) info.seeds.push_back(s.get<std::uint64_t>());
        for (const std::uint64_t seed : info.seeds) {
            info.summaries[seed] =
                read_json_file(dir + "/seed_" + std::to_string(seed) + "/summary.json");
        }
        sets.push_back(std::move(info));
    }

    std::vector<std::uint64_t> seeds = sets.front().seeds;
    std::sort(seeds.begin(), seeds.end());
    for (const SetInfo& info : sets) {
        std::vector<std::uint64_t> s = info.seeds;
        std::sort(s.begin(), s.end());
        if (s != seeds) {
            throw SeedMismatch("run set " + info.dir + " uses different seeds");
        }
    }

    nlohmann::json out_sets = nlohmann::json::array();
    struct Aggregate {
        double best_acc = 0.0;
        double train_steps = 0.0;
        double last_quarter_distinct = 0.0;
        double best_size = 0.0;
    };
    std::vector<Aggregate> aggregates;
    for (const SetInfo& info : sets) {
        nlohmann::json per_seed = nlohmann::json::array();
        Aggregate agg;
        for (const std::uint64_t seed : seeds) {  // ascending, so means ignore input order
            const nlohmann::json& s = info.summaries.at(seed);
            const auto quarters = s.at("distinct_trained_per_quarter").get<std::vector<long>>();
            const double best_acc = s.at("best_final_accuracy").get<double>();
            const double size = s.at("best_final").at("size_mb").get<double>();
            const long steps = s.at("counters").at("train_steps").get<long>();
            per_seed.push_back(nlohmann::json{{"seed", seed},
                                              {"best_final_accuracy", best_acc},
                                              {"train_steps", steps},
                                              {"distinct_trained_per_quarter", quarters},
                                              {"best_size_mb", size}});
            agg.best_acc += best_acc;
            agg.train_steps += static_cast<double>(steps);
            agg.last_quarter_distinct += static_cast<double>(quarters.back());
            agg.best_size += size;
        }
        const double n = static_cast<double>(seeds.size());
        agg.best_acc /= n;
        agg.train_steps /= n;
        agg.last_quarter_distinct /= n;
        agg.best_size /= n;
        aggregates.push_back(agg);
        out_sets.push_back(nlohmann::json{
            {"dir", info.dir},
            {"label", info.label},
            {"objectives", info.objectives},
            {"per_seed", per_seed},
            {"mean",
             {{"best_final_accuracy", agg.best_acc},
              {"train_steps", agg.train_steps},
              {"last_quarter_distinct", agg.last_quarter_distinct},
              {"best_size_mb", agg.best_size}}}});
    }

    nlohmann::json pairs = nlohmann::json::array();
    for (std::size_t i = 0; i < sets.size(); ++i) {
        for (std::size_t j = i + 1; j < sets.size(); ++j) {
            const Aggregate& a = aggregates[i];
            const Aggregate& b = aggregates[j];
            pairs.push_back(nlohmann::json{
                {"a", sets[i].label},
                {"b", sets[j].label},
                {"delta_best_final_accuracy", b.best_acc - a.best_acc},
                {"delta_train_steps", b.train_steps - a.train_steps},
                {"delta_last_quarter_distinct", b.last_quarter_distinct - a.last_quarter_distinct},
                {"b_last_quarter_distinct_lower", b.last_quarter_distinct < a.last_quarter_distinct},
            });
        }
    }

    nlohmann::json seeds_json = nlohmann::json::array();
    for (const std::uint64_t s : seeds) seeds_json.push_back(s);
    return nlohmann::json{{"seeds", seeds_json}, {"sets", out_sets}, {"pairs", pairs}};
}

std::string render_compare_report(const nlohmann::json& report) {
    std::ostringstream out;
    out << "set    mean_best_acc  mean_train_steps  mean_q4_distinct  mean_best_size_mb\n";
    for (const auto& set : report.at("sets")) {
        const auto& mean = set.at("mean");
        out << set.at("label").get<std::string>() << "  " << fmt_double(mean.at("best_final_accuracy").get<double>())
            << "  " << fmt_double(mean.at("train_steps").get<double>()) << "  "
            << fmt_double(mean.at("last_quarter_distinct").get<double>()) << "  "
            << fmt_double(mean.at("best_size_mb").get<double>()) << "\n";
    }
    for (const auto& pair : report.at("pairs")) {
        out << pair.at("a").get<std::string>() << " vs " << pair.at("b").get<std::string>()
            << ": delta_best_acc=" << fmt_double(pair.at("delta_best_final_accuracy").get<double>())
            << " delta_q4_distinct=" << fmt_double(pair.at("delta_last_quarter_distinct").get<double>())
            << (pair.at("b_last_quarter_distinct_lower").get<bool>() ? " (narrowed)" : "") << "\n";
    }
    return out.str();
}

namespace {

double nearest_rank_percentile(std::vector<double> values, int percent) {
    std::sort(values.begin(), values.end());
    const int n = static_cast<int>(values.size());
    const int rank = (percent * n + 99) / 100;  // ceil(p/100 * n)
    return values[static_cast<std::size_t>(std::max(1, rank) - 1)];
}

void write_svg_scatter(const std::string& path, const std::vector<std::array<double, 3>>& points,
                       const std::string& x_label, const std::string& y_label) {
    if (points.empty()) return;
    double x_min = points[0][0], x_max = points[0][0], y_min = points[0][1], y_max = points[0][1];
    for (const auto& p : points) {
        x_min = std::min(x_min, p[0]);
        x_max = std::max(x_max, p[0]);
        y_min = std::min(y_min, p[1]);
        y_max = std::max(y_max, p[1]);
    }
    if (x_max == x_min) x_max = x_min + 1.0;
    if (y_max == y_min) y_max = y_min + 1.0;
    const int w = 640, h = 480, margin = 48;
    const char* palette[] = {"#4c72b0", "#dd8452", "#55a868", "#c44e52"};
    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h << "'>\n";
    svg << "<rect width='100%' height='100%' fill='white'/>\n";
    svg << "<line x1='" << margin << "' y1='" << h - margin << "' x2='" << w - margin << "' y2='"
        << h - margin << "' stroke='black'/>\n";
    svg << "<line x1='" << margin << "' y1='" << margin << "' x2='" << margin << "' y2='"
        << h - margin << "' stroke='black'/>\n";
    svg << "<text x='" << w / 2 << "' y='" << h - 12 << "' font-size='12'>" << x_label
        << "</text>\n";
    svg << "<text x='12' y='" << h / 2 << "' font-size='12' transform='rotate(-90 12 " << h / 2
        << ")'>" << y_label << "</text>\n";
    for (const auto& p : points) {
        const double px = margin + (p[0] - x_min) / (x_max - x_min) * (w - 2 * margin);
        const double py = h - margin - (p[1] - y_min) / (y_max - y_min) * (h - 2 * margin);
        const int tag = std::clamp(static_cast<int>(p[2]), 0, 3);
        svg << "<circle cx='" << fmt_double(px) << "' cy='" << fmt_double(py)
            << "' r='3' fill='" << palette[tag] << "' fill-opacity='0.7'/>\n";
    }
    svg << "</svg>\n";
    write_file(path, svg.str());
}

}  // namespace

void emit_plotdata(const std::string& seed_dir, bool svg) {
    const RunConfig config = RunConfig::from_json(read_json_file(seed_dir + "/config.json"));
    const std::vector<RunEvent> events = read_run_log(seed_dir + "/run.log");
    const std::unique_ptr<SearchDomain> domain = make_domain(config);
    const EngineConfig& eng = config.engine;

    std::ostringstream fig2;
    fig2 << "# size vs accuracy of evaluated models; warm-up evaluations excluded\n";
    fig2 << "# half 1 = first half of post-warm-up epochs, half 2 = second half\n";
    fig2 << "half\tepoch\tsize_mb\taccuracy\tid\n";
    std::ostringstream fig3;
    fig3 << "# accuracy vs epoch of evaluated models; warm-up evaluations excluded\n";
    fig3 << "quarter\tepoch\taccuracy\tid\n";

    std::array<std::vector<double>, 4> quarter_accs;
    std::vector<std::array<double, 3>> fig2_points, fig3_points;
    for (const RunEvent& e : events) {
        if (e.kind != EventKind::Eval) continue;
        const int half = half_of_epoch(e.epoch, eng.warmup_epochs, eng.total_epochs);
        const int quarter = quarter_of_epoch(e.epoch, eng.warmup_epochs, eng.total_epochs);
        const double size = domain->size_mb(Genome{e.choices});
        fig2 << half + 1 << "\t" << e.epoch << "\t" << fmt_double(size) << "\t"
             << fmt_double(*e.accuracy) << "\t" << e.id << "\n";
        fig3 << quarter + 1 << "\t" << e.epoch << "\t" << fmt_double(*e.accuracy) << "\t" << e.id
             << "\n";
        quarter_accs[static_cast<std::size_t>(quarter)].push_back(*e.accuracy);
        fig2_points.push_back({size, *e.accuracy, static_cast<double>(half)});
        fig3_points.push_back({static_cast<double>(e.epoch), *e.accuracy, static_cast<double>(quarter)});
    }
    write_file(seed_dir + "/fig2_points.tsv", fig2.str());
    write_file(seed_dir + "/fig3_points.tsv", fig3.str());

    std::ostringstream pct;
    pct << "# nearest-rank percentiles of accuracy per post-warm-up quarter\n";
    pct << "quarter\tcount\tp25\tp50\tp75\n";
    for (int q = 0; q < 4; ++q) {
        const auto& accs = quarter_accs[static_cast<std::size_t>(q)];
        if (accs.empty()) continue;
        pct << q + 1 << "\t" << accs.size() << "\t" << fmt_double(nearest_rank_percentile(accs, 25))
            << "\t" << fmt_double(nearest_rank_percentile(accs, 50)) << "\t"
            << fmt_double(nearest_rank_percentile(accs, 75)) << "\n";
    }
    write_file(seed_dir + "/fig3_percentiles.tsv", pct.str());

    if (svg) {
        write_svg_scatter(seed_dir + "/fig2.svg", fig2_points, "model size (MB)", "accuracy");
        write_svg_scatter(seed_dir + "/fig3.svg", fig3_points, "epoch", "accuracy");
    }
}

nlohmann::json retrain_command(const std::string& pareto_path, int rank, int epochs,
                               const std::string& out_path) {
    const fs::path seed_dir = fs::path(pareto_path).parent_path();
    const RunConfig config =
        RunConfig::from_json(read_json_file((seed_dir / "config.json").string()));
    if (config.evaluator_kind != "mlp") {
        throw ConfigError("retrain applies to mlp runs only (this run used '" +
                          config.evaluator_kind + "')");
    }
    const nlohmann::json pareto = read_json_file(pareto_path);
    const auto& front = pareto.at("front");
    if (rank < 0 || rank >= static_cast<int>(front.size())) {
        throw OutOfRange("rank " + std::to_string(rank) + " outside front of size " +
                         std::to_string(front.size()));
    }
    const Genome genome{front[static_cast<std::size_t>(rank)].at("choices")
                            .get<std::vector<std::int16_t>>()};

    MlpSpace space = config.mlp;
    space.input_dims = config.dataset.dims;
    space.num_classes = config.dataset.classes;
    const Dataset data = make_dataset(config.dataset, config.dataset_seed);
    const int run_epochs = epochs >= 0 ? epochs : config.retrain_epochs;
    const RetrainResult res = retrain(space, genome, data, run_epochs,
                                      derive_seed(config.engine.seed, 2000 + static_cast<std::uint64_t>(rank)));

    const nlohmann::json metrics{{"rank", rank},
                                 {"id", genome_id(genome)},
                                 {"choices", genome.choices},
                                 {"epochs", run_epochs},
                                 {"test_accuracy", res.test_accuracy},
                                 {"final_train_loss", res.final_train_loss},
                                 {"seed", config.engine.seed}};
    const std::string path = out_path.empty()
                                 ? (seed_dir / ("retrain_rank" + std::to_string(rank) + ".json")).string()
                                 : out_path;
    write_json_file(path, metrics);
    return metrics;
}

}  // namespace monas
