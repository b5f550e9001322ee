#include "monas/runlog.hpp"

#include <algorithm>
#include <fstream>
#include <tuple>
#include <unordered_set>

#include "monas/errors.hpp"

namespace monas {

namespace {

constexpr int kLogVersion = 1;

nlohmann::json objectives_to_json(const ObjectiveVector& v) {
    nlohmann::json names = nlohmann::json::array();
    nlohmann::json values = nlohmann::json::array();
    for (std::size_t i = 0; i < v.size(); ++i) {
        names.push_back(objective_name_str(v.names[i]));
        values.push_back(v.values[i]);
    }
    return nlohmann::json{{"names", names}, {"values", values}};
}

ObjectiveVector objectives_from_json(const nlohmann::json& j) {
    ObjectiveVector v;
    const auto& names = j.at("names");
    const auto& values = j.at("values");
    if (names.size() != values.size()) throw Error("objective names/values length mismatch");
    for (std::size_t i = 0; i < names.size(); ++i) {
        const ObjectiveName name = objective_name_from_str(names[i].get<std::string>());
        v.names.push_back(name);
        v.values.push_back(values[i].get<double>());
        v.directions.push_back(name == ObjectiveName::SizeMb ? Direction::Minimize
                                                             : Direction::Maximize);
    }
    return v;
}

}  // namespace

std::string event_kind_str(EventKind k) {
    switch (k) {
        case EventKind::WarmupTrain: return "warmup_train";
        case EventKind::WarmupEval: return "warmup_eval";
        case EventKind::Train: return "train";
        case EventKind::Eval: return "eval";
        case EventKind::Select: return "select";
        case EventKind::Offspring: return "offspring";
    }
    return "?";
}

EventKind event_kind_from_str(const std::string& s) {
    if (s == "warmup_train") return EventKind::WarmupTrain;
    if (s == "warmup_eval") return EventKind::WarmupEval;
    if (s == "train") return EventKind::Train;
    if (s == "eval") return EventKind::Eval;
    if (s == "select") return EventKind::Select;
    if (s == "offspring") return EventKind::Offspring;
    throw Error("unknown run-log event '" + s + "'");
}

nlohmann::json event_to_json(const RunEvent& e) {
    nlohmann::json j{
        {"seq", e.seq},
        {"epoch", e.epoch},
        {"event", event_kind_str(e.kind)},
        {"id", e.id},
        {"choices", e.choices},
        {"counters", {{"train_steps", e.train_steps}, {"distinct_trained", e.distinct_trained}}},
    };
    if (e.accuracy) j["acc"] = *e.accuracy;
    if (e.objectives) j["objectives"] = objectives_to_json(*e.objectives);
    return j;
}

RunEvent event_from_json(const nlohmann::json& j) {
    RunEvent e;
    e.seq = j.at("seq").get<long>();
    e.epoch = j.at("epoch").get<int>();
    e.kind = event_kind_from_str(j.at("event").get<std::string>());
    e.id = j.at("id").get<GenomeId>();
    e.choices = j.at("choices").get<std::vector<std::int16_t>>();
    e.train_steps = j.at("counters").at("train_steps").get<long>();
    e.distinct_trained = j.at("counters").at("distinct_trained").get<long>();
    if (j.contains("acc")) e.accuracy = j.at("acc").get<double>();
    if (j.contains("objectives")) e.objectives = objectives_from_json(j.at("objectives"));
    return e;
}

std::string run_log_to_string(const std::vector<RunEvent>& events) {
    std::string out = nlohmann::json{{"format", "monas-run-log"}, {"version", kLogVersion}}.dump();
    out += "\n";
    for (const RunEvent& e : events) {
        out += event_to_json(e).dump();
        out += "\n";
    }
    return out;
}

void write_run_log(const std::vector<RunEvent>& events, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << run_log_to_string(events);
}

std::vector<RunEvent> read_run_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);
    std::string line;
    if (!std::getline(in, line)) throw Error("empty run log " + path);
    const nlohmann::json header = nlohmann::json::parse(line);
    if (header.value("format", "") != "monas-run-log" || header.value("version", 0) != kLogVersion) {
        throw Error("unsupported run-log header in " + path);
    }
    std::vector<RunEvent> events;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        events.push_back(event_from_json(nlohmann::json::parse(line)));
    }
    return events;
}

nlohmann::json ledger_to_json(const Ledger& ledger) {
    // all() is keyed by id; flatten to (epoch, id) order.
    std::vector<std::tuple<int, GenomeId, double>> records;
    for (const auto& [id, history] : ledger.all()) {
        for (int i = 0; i < history.samples(); ++i) {
            records.emplace_back(history.epochs[static_cast<std::size_t>(i)], id,
                                 history.accuracies[static_cast<std::size_t>(i)]);
        }
    }
    std::sort(records.begin(), records.end());
    nlohmann::json j = nlohmann::json::array();
    for (const auto& [epoch, id, acc] : records) {
        j.push_back(nlohmann::json{{"epoch", epoch}, {"id", id}, {"acc", acc}});
    }
    return j;
}

Ledger ledger_from_json(const nlohmann::json& j) {
    Ledger ledger;
    for (const auto& rec : j) {
        ledger.record_sample(rec.at("id").get<GenomeId>(), rec.at("epoch").get<int>(),
                             rec.at("acc").get<double>());
    }
    return ledger;
}

LogReplay replay_events(const std::vector<RunEvent>& events) {
    LogReplay replay;
    std::unordered_set<GenomeId> trained;
    for (const RunEvent& e : events) {
        switch (e.kind) {
            case EventKind::WarmupEval:
            case EventKind::Eval:
                if (!e.accuracy) throw Error("eval event without accuracy (seq " + std::to_string(e.seq) + ")");
                replay.ledger.record_sample(e.id, e.epoch, *e.accuracy);
                break;
            case EventKind::WarmupTrain:
            case EventKind::Train:
                ++replay.train_steps;
                trained.insert(e.id);
                break;
            case EventKind::Select:
                replay.selections[e.epoch].push_back(e.id);
                break;
            case EventKind::Offspring:
                break;
        }
    }
    replay.distinct_trained = static_cast<long>(trained.size());
    return replay;
}

void verify_selections(const std::vector<RunEvent>& events, const EngineConfig& config) {
    // Initial population: top-P of the warm-up pool, exactly as the engine
    // ranks it.
    struct Scored {
        Genome genome;
        GenomeId id;
        double acc;
    };
    std::vector<Scored> pool;
    for (const RunEvent& e : events) {
        if (e.kind != EventKind::WarmupEval) continue;
        pool.push_back({Genome{e.choices}, e.id, e.accuracy.value()});
    }
    if (pool.empty()) throw Error("run log has no warm-up evaluations");
    std::stable_sort(pool.begin(), pool.end(), [](const Scored& a, const Scored& b) {
        if (a.acc != b.acc) return a.acc > b.acc;
        return a.id < b.id;
    });
    std::vector<Candidate> population;
    for (int i = 0; i < config.population_size; ++i) {
        const Scored& s = pool[static_cast<std::size_t>(i) % pool.size()];
        Candidate c;
        c.id = s.id;
        c.genome = s.genome;
        population.push_back(std::move(c));
    }

    // Group per-epoch eval vectors, logged survivors and offspring.
    std::map<int, std::map<GenomeId, ObjectiveVector>> vectors;
    std::map<int, std::vector<Candidate>> logged_select;
    std::map<int, std::vector<Candidate>> offspring;
    for (const RunEvent& e : events) {
        if (e.kind == EventKind::Eval) {
            vectors[e.epoch].emplace(e.id, e.objectives.value());
        } else if (e.kind == EventKind::Select) {
            Candidate c;
            c.id = e.id;
            c.genome = Genome{e.choices};
            c.objectives = e.objectives.value();
            logged_select[e.epoch].push_back(std::move(c));
        } else if (e.kind == EventKind::Offspring) {
            Candidate c;
            c.id = e.id;
            c.genome = Genome{e.choices};
            offspring[e.epoch].push_back(std::move(c));
        }
    }

    for (const auto& [epoch, evals] : vectors) {
        for (Candidate& c : population) c.objectives = evals.at(c.id);
        const std::vector<Candidate> survivors = select(population, config.survivors);
        const auto& logged = logged_select.at(epoch);
        if (survivors.size() != logged.size()) {
            throw Error("epoch " + std::to_string(epoch) + ": survivor count mismatch");
        }
        for (std::size_t i = 0; i < survivors.size(); ++i) {
            if (survivors[i].id != logged[i].id) {
                throw Error("epoch " + std::to_string(epoch) + ": survivor " + std::to_string(i) +
                            " mismatch");
            }
        }
        population = logged;
        const auto off_it = offspring.find(epoch);
        if (off_it != offspring.end()) {
            for (const Candidate& c : off_it->second) population.push_back(c);
        }
    }
}

}  // namespace monas
