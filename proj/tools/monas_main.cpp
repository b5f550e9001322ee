#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "monas/errors.hpp"
#include "monas/harness.hpp"

namespace {

enum Verbosity { kQuiet = 0, kInfo = 1, kDebug = 2 };

Verbosity verbosity() {
    const char* env = std::getenv("MONAS_LOG");
    if (!env) return kInfo;
    const std::string v = env;
    if (v == "quiet") return kQuiet;
    if (v == "debug") return kDebug;
    return kInfo;
}

void info(const std::string& msg) {
    if (verbosity() >= kInfo) std::cerr << msg << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-objective evolutionary architecture search"};
    app.require_subcommand(1);

    std::string config_path, out_dir, out_file, run_dir, pareto_path;
    std::vector<std::string> run_dirs;
    std::int64_t seed = -1;
    int rank = 0, epochs = -1;
    bool svg = false;

    auto* search = app.add_subcommand("search", "run the search for each configured seed");
    search->add_option("--config", config_path, "run configuration file")->required();
    search->add_option("--seed", seed, "run a single seed instead of the configured list");
    search->add_option("--out", out_dir, "output directory (overrides config out_dir)");

    auto* compare = app.add_subcommand("compare", "compare completed run sets over identical seeds");
    compare->add_option("--runs", run_dirs, "run set directories")->required()->expected(-2);
    compare->add_option("--out", out_file, "report file (JSON)");

    auto* plot = app.add_subcommand("plot", "emit plot data for one run directory");
    plot->add_option("--run", run_dir, "seed run directory")->required();
    plot->add_flag("--svg", svg, "also render SVG scatters");

    auto* retrain = app.add_subcommand("retrain", "retrain a Pareto-front member from scratch");
    retrain->add_option("--pareto", pareto_path, "pareto.json of a completed mlp run")->required();
    retrain->add_option("--rank", rank, "front member index");
    retrain->add_option("--epochs", epochs, "retraining epochs (default: config retrain_epochs)");
    retrain->add_option("--out", out_file, "metrics file path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*search) {
            monas::RunConfig config = monas::RunConfig::load_file(config_path);
            if (seed >= 0) config.seeds = {static_cast<std::uint64_t>(seed)};
            const std::string dir = out_dir.empty() ? config.out_dir : out_dir;
            info("search: " + std::to_string(config.seeds.size()) + " seed(s) -> " + dir);
            monas::run_search_command(config, dir);
            for (const std::uint64_t s : config.seeds) {
                info("  seed " + std::to_string(s) + " done");
            }
        } else if (*compare) {
            const nlohmann::json report = monas::compare_runsets(run_dirs);
            const std::string rendered = monas::render_compare_report(report);
            if (!out_file.empty()) {
                std::ofstream out(out_file);
                if (!out) throw monas::Error("cannot write " + out_file);
                out << report.dump(2) << "\n";
                info("report written to " + out_file);
            }
            std::cout << rendered;
        } else if (*plot) {
            monas::emit_plotdata(run_dir, svg);
            info("plot data written to " + run_dir);
        } else if (*retrain) {
            const nlohmann::json metrics =
                monas::retrain_command(pareto_path, rank, epochs, out_file);
            std::cout << metrics.dump(2) << "\n";
        }
    } catch (const monas::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
