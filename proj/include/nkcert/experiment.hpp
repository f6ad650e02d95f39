#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nkcert/certify.hpp"
#include "nkcert/fem.hpp"
#include "nkcert/outputs.hpp"

namespace nkcert {

/// Experiment configuration. Every field has a default reproducing the
/// manufactured-solution study (N = 16 * 2^l, l = 0..4).
struct ExperimentConfig {
    std::vector<int> mesh_sizes{16, 32, 64, 128, 256};
    NewtonSettings newton;
    int assembly_degree = 5;
    int reference_degree = 7;
    double C2 = kDefaultC2;
    double C4 = kDefaultC4;
    double alpha = 1.0;
    int j_max = kDefaultShrinkSteps;
    int k_max = kDefaultBisectionSteps;
    std::vector<QoIKind> qois{QoIKind::kLinear, QoIKind::kQuadraticL2};
    std::filesystem::path output_dir = "out";
    std::optional<std::filesystem::path> reference_dir;
    double default_rtol = 1e-3;
    std::map<std::string, double> tolerances;  ///< per-column relative tolerances

    void validate() const;
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

struct QoIRecord {
    QoIKind kind = QoIKind::kLinear;
    std::string name;
    double exact = 0.0;
    double error = 0.0;  ///< |J(u*) - J(u_h)|
    Enclosure baseline;
    std::optional<Enclosure> adjoint;
};

struct RunRecord {
    int N = 0;
    double h = 0.0;
    bool ok = false;
    std::string failure;

    int newton_iterations = 0;
    bool newton_converged = false;
    std::vector<double> newton_increments;

    double energy_norm = 0.0;
    ResidualBound residual;
    ReconstructionAudit audit;
    StabilityCertificate stability;
    CertConstants constants;
    NKReport nk;

    double energy_error = 0.0;
    double error_ratio = 0.0;
    bool inside = false;

    std::vector<QoIRecord> qois;
    double wall_seconds = 0.0;
};

struct ExperimentReport {
    std::vector<RunRecord> runs;
};

/// Full pipeline for one mesh size; stage failures are recorded, not thrown.
RunRecord run_single(const ExperimentConfig& config, int N);
ExperimentReport run(const ExperimentConfig& config);

enum class Table { kNK, kSanity, kQoILinear, kQoIQuadratic };
Table parse_table(const std::string& which);
std::string table_file_name(Table table);

/// CSV header plus one row per record, 16 significant digits.
std::string render_csv(const ExperimentReport& report, Table table);
/// Fixed-width text version of render_csv.
std::string render_pretty(const ExperimentReport& report, Table table);
/// Nested JSON of the whole report (no wall-clock data, so reruns are byte-identical).
std::string render_json(const ExperimentReport& report);

/// Writes nk.csv, sanity.csv, qoi_linear.csv, qoi_quadratic.csv, report.json and timing.csv.
std::vector<std::filesystem::path> emit(const ExperimentReport& report, const std::filesystem::path& dir);

struct ColumnCheck {
    std::string column;
    double rtol = 0.0;
    double worst_error = 0.0;
    std::string worst_row;
    bool pass = true;
};

struct CheckResult {
    bool pass = true;
    std::vector<ColumnCheck> columns;
    std::vector<std::string> problems;  ///< unmatched rows, non-numeric mismatches

    void print(std::ostream& os) const;
};

/// Per-column relative comparison of two CSV tables keyed by their first column.
/// Throws Error on header mismatch.
CheckResult check_csv(const std::string& got_csv, const std::string& ref_csv,
                      const std::map<std::string, double>& rtol_by_column, double default_rtol);
CheckResult check_files(const std::filesystem::path& got, const std::filesystem::path& ref,
                        const std::map<std::string, double>& rtol_by_column, double default_rtol);

/// Checks every emitted table in `got_dir` against `ref_dir`; each tolerance applies to
/// the tables that have that column.
std::vector<std::pair<std::string, CheckResult>> check_tables(const std::filesystem::path& got_dir,
                                                              const std::filesystem::path& ref_dir,
                                                              const std::map<std::string, double>& rtol_by_column,
                                                              double default_rtol);

}  // namespace nkcert
