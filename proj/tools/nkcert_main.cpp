#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nkcert/error.hpp"
#include "nkcert/experiment.hpp"

namespace {

std::map<std::string, double> parse_rtols(const std::vector<std::string>& specs) {
    std::map<std::string, double> out;
    for (const std::string& s : specs) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) throw nkcert::Error("--rtol-col expects name=value, got '" + s + "'");
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s.substr(eq + 1), &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size() - eq - 1 || v < 0.0)
            throw nkcert::Error("--rtol-col: invalid tolerance in '" + s + "'");
        out[s.substr(0, eq)] = v;
    }
    return out;
}

int run_cmd(const std::string& config_path, const std::string& out_dir) {
    nkcert::ExperimentConfig cfg = config_path.empty() ? nkcert::ExperimentConfig{} : nkcert::load_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    const nkcert::ExperimentReport report = nkcert::run(cfg);
    for (const auto& p : nkcert::emit(report, cfg.output_dir)) std::cout << "wrote " << p.string() << "\n";
    int status = 0;
    for (const auto& r : report.runs) {
        if (!r.ok) {
            std::cerr << "N=" << r.N << " failed: " << r.failure << "\n";
            status = 1;
        }
    }
    if (cfg.reference_dir) {
        for (const auto& [name, res] :
             nkcert::check_tables(cfg.output_dir, *cfg.reference_dir, cfg.tolerances, cfg.default_rtol)) {
            std::cout << "== " << name << "\n";
            res.print(std::cout);
            if (!res.pass) status = 1;
        }
    }
    return status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Certified Newton-Kantorovich verification for -Laplace(u) + u^3 = f"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    auto* run = app.add_subcommand("run", "Run the experiment and write CSV/JSON reports");
    run->add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "Output directory (overrides the config)");

    std::string got, ref;
    std::vector<std::string> rtol_specs;
    double default_rtol = 1e-3;
    auto* check = app.add_subcommand("check", "Compare a CSV table with a reference table");
    check->add_option("--got", got, "Computed CSV")->required()->check(CLI::ExistingFile);
    check->add_option("--ref", ref, "Reference CSV")->required()->check(CLI::ExistingFile);
    check->add_option("--rtol-col", rtol_specs, "Per-column relative tolerance name=value");
    check->add_option("--rtol", default_rtol, "Relative tolerance for unlisted columns")->capture_default_str();

    std::string which, table_config;
    auto* table = app.add_subcommand("table", "Run and print one table");
    table->add_option("--which", which, "nk | sanity | qoi-linear | qoi-quadratic")
        ->required()
        ->check(CLI::IsMember({"nk", "sanity", "qoi-linear", "qoi-quadratic"}));
    table->add_option("--config", table_config, "JSON configuration file")->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return run_cmd(config_path, out_dir);
        if (*check) {
            const auto res = nkcert::check_files(got, ref, parse_rtols(rtol_specs), default_rtol);
            res.print(std::cout);
            return res.pass ? 0 : 1;
        }
        if (*table) {
            const nkcert::ExperimentConfig cfg =
                table_config.empty() ? nkcert::ExperimentConfig{} : nkcert::load_config(table_config);
            std::cout << nkcert::render_pretty(nkcert::run(cfg), nkcert::parse_table(which));
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
