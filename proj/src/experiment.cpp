#include "nkcert/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "nkcert/error.hpp"
#include "nkcert/fluxrecon.hpp"
#include "nkcert/manufactured.hpp"
#include "nkcert/mesh.hpp"
#include "nkcert/quadrature.hpp"

namespace nkcert {

using json = nlohmann::ordered_json;
using namespace manufactured;

void ExperimentConfig::validate() const {
    NKCERT_REQUIRE(!mesh_sizes.empty(), "config: mesh_sizes must be nonempty");
    for (int n : mesh_sizes) NKCERT_REQUIRE(n >= 1, "config: every mesh size must be >= 1");
    newton.validate();
    rule_for_degree(assembly_degree);
    rule_for_degree(reference_degree);
    NKCERT_REQUIRE(C2 > 0.0 && C4 > 0.0, "config: C2 and C4 must be positive");
    NKCERT_REQUIRE(alpha > 0.0, "config: alpha must be positive");
    NKCERT_REQUIRE(j_max >= 1 && k_max >= 1, "config: j_max and k_max must be >= 1");
    NKCERT_REQUIRE(default_rtol > 0.0, "config: tolerances must be positive");
    for (const auto& [name, tol] : tolerances)
        NKCERT_REQUIRE(tol > 0.0, "config: tolerance for column '" + name + "' must be positive");
}

namespace {

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& where) {
    NKCERT_REQUIRE(obj.is_object(), "config: '" + where + "' must be an object");
    for (const auto& item : obj.items()) {
        const bool ok = std::any_of(known.begin(), known.end(), [&](const char* k) { return item.key() == k; });
        NKCERT_REQUIRE(ok, "config: unknown key '" + item.key() + "' in " + where);
    }
}

QoIKind parse_qoi(const std::string& s) {
    if (s == "linear") return QoIKind::kLinear;
    if (s == "quadratic") return QoIKind::kQuadraticL2;
    throw Error("config: unknown QoI '" + s + "' (expected linear or quadratic)");
}

const char* qoi_key(QoIKind k) { return k == QoIKind::kLinear ? "linear" : "quadratic"; }

QoISpec make_qoi(QoIKind k) {
    if (k == QoIKind::kLinear) return QoISpec::linear([](const Point&) { return 1.0; }, "J1");
    return QoISpec::quadratic_l2("J2");
}

double exact_qoi(QoIKind k) { return k == QoIKind::kLinear ? kLinearQoi : kQuadraticQoi; }

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(std::string("config: invalid JSON: ") + e.what());
    }
    ExperimentConfig c;
    try {
        reject_unknown(j, {"mesh_sizes", "newton", "quadrature", "constants", "search", "qois", "output_dir",
                           "reference_dir", "tolerances"},
                       "config");
        if (j.contains("mesh_sizes")) c.mesh_sizes = j["mesh_sizes"].get<std::vector<int>>();
        if (j.contains("newton")) {
            const json& n = j["newton"];
            reject_unknown(n, {"tol", "max_iterations"}, "newton");
            c.newton.tol = n.value("tol", c.newton.tol);
            c.newton.max_iterations = n.value("max_iterations", c.newton.max_iterations);
        }
        if (j.contains("quadrature")) {
            const json& q = j["quadrature"];
            reject_unknown(q, {"assembly", "reference"}, "quadrature");
            c.assembly_degree = q.value("assembly", c.assembly_degree);
            c.reference_degree = q.value("reference", c.reference_degree);
        }
        if (j.contains("constants")) {
            const json& k = j["constants"];
            reject_unknown(k, {"C2", "C4", "alpha"}, "constants");
            c.C2 = k.value("C2", c.C2);
            c.C4 = k.value("C4", c.C4);
            c.alpha = k.value("alpha", c.alpha);
        }
        if (j.contains("search")) {
            const json& s = j["search"];
            reject_unknown(s, {"j_max", "k_max"}, "search");
            c.j_max = s.value("j_max", c.j_max);
            c.k_max = s.value("k_max", c.k_max);
        }
        if (j.contains("qois")) {
            c.qois.clear();
            for (const auto& q : j["qois"]) c.qois.push_back(parse_qoi(q.get<std::string>()));
        }
        if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
        if (j.contains("reference_dir")) c.reference_dir = j["reference_dir"].get<std::string>();
        if (j.contains("tolerances")) {
            const json& t = j["tolerances"];
            reject_unknown(t, {"default", "columns"}, "tolerances");
            c.default_rtol = t.value("default", c.default_rtol);
            if (t.contains("columns")) c.tolerances = t["columns"].get<std::map<std::string, double>>();
        }
    } catch (const json::exception& e) {
        throw Error(std::string("config: ") + e.what());
    }
    c.newton.quadrature_degree = c.assembly_degree;
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    NKCERT_REQUIRE(in.good(), "config: cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    ExperimentConfig c = parse_config(ss.str());
    if (c.output_dir.is_relative()) c.output_dir = path.parent_path() / c.output_dir;
    if (c.reference_dir && c.reference_dir->is_relative()) c.reference_dir = path.parent_path() / *c.reference_dir;
    return c;
}

RunRecord run_single(const ExperimentConfig& config, int N) {
    const auto start = std::chrono::steady_clock::now();
    RunRecord rec;
    rec.N = N;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    rec.h = rec.energy_error = rec.error_ratio = nan;
    try {
        const Mesh mesh = Mesh::build_uniform(N);
        rec.h = 0.0;
        for (std::size_t t = 0; t < mesh.num_triangles(); ++t) rec.h = std::max(rec.h, mesh.geometry(t).diameter);

        NewtonSettings settings = config.newton;
        settings.quadrature_degree = config.assembly_degree;
        const NewtonResult newton = newton_solve(mesh, source, settings);
        rec.newton_iterations = newton.iterations();
        rec.newton_converged = newton.converged;
        rec.newton_increments = newton.increment_norms;
        const P1Function& u = newton.solution;
        rec.energy_norm = energy_norm(u);

        const QuadratureRule& rule = rule_for_degree(config.assembly_degree);
        const PiecewiseConstantField r = project_source(u, source, rule);
        const Reconstruction flux = reconstruct_rt0(solve_cr(r), r);
        rec.audit = flux.audit;
        rec.residual = residual_bound(u, flux, source, 1.0, rule);

        rec.stability = stability_constant(u);
        NKCERT_REQUIRE(config.alpha <= rec.stability.alpha,
                       "configured alpha exceeds the certified stability constant");
        const AffineLipschitz lip = lipschitz_affine(u, config.C4);
        rec.constants =
            CertConstants::make(rec.residual.r_bound, config.alpha, lip.L0, lip.L1, config.C2, config.C4);
        rec.nk = select_radius(rec.constants, config.j_max, config.k_max);

        rec.energy_error = energy_error_vs(u, exact_field(), rule_for_degree(config.reference_degree));
        rec.error_ratio = rec.energy_error / rec.nk.rho;
        rec.inside = rec.nk.admissible && rec.energy_error <= rec.nk.rho;
        NKCERT_REQUIRE(rec.nk.admissible, "select_radius found no admissible radius");

        for (QoIKind kind : config.qois) {
            const QoISpec spec = make_qoi(kind);
            QoIRecord q;
            q.kind = kind;
            q.name = spec.name;
            q.exact = exact_qoi(kind);
            q.baseline = baseline_enclosure(spec, u, rec.nk.rho, config.C2);
            q.error = std::abs(q.exact - q.baseline.center);
            const P1Function z = solve_adjoint(u, spec);
            q.adjoint = adjoint_enclosure(spec, u, z, rec.nk, rec.constants, source);
            rec.qois.push_back(std::move(q));
        }
        rec.ok = true;
        if (!newton.converged) rec.failure = "newton_solve stopped before reaching the increment tolerance";
    } catch (const std::exception& e) {
        rec.ok = false;
        rec.failure = e.what();
    }
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

ExperimentReport run(const ExperimentConfig& config) {
    config.validate();
    ExperimentReport report;
    for (int N : config.mesh_sizes) report.runs.push_back(run_single(config, N));
    return report;
}

Table parse_table(const std::string& which) {
    if (which == "nk") return Table::kNK;
    if (which == "sanity") return Table::kSanity;
    if (which == "qoi-linear") return Table::kQoILinear;
    if (which == "qoi-quadratic") return Table::kQoIQuadratic;
    throw Error("unknown table '" + which + "' (expected nk, sanity, qoi-linear or qoi-quadratic)");
}

std::string table_file_name(Table table) {
    switch (table) {
        case Table::kNK: return "nk.csv";
        case Table::kSanity: return "sanity.csv";
        case Table::kQoILinear: return "qoi_linear.csv";
        case Table::kQoIQuadratic: return "qoi_quadratic.csv";
    }
    return {};
}

namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15e", v);
    return buf;
}

using Rows = std::vector<std::vector<std::string>>;

std::vector<std::string> header(Table table) {
    switch (table) {
        case Table::kNK: return {"N", "h", "eta", "rho", "q", "p"};
        case Table::kSanity: return {"N", "err", "rho", "ratio", "inside"};
        default: return {"N", "J", "err", "width_base", "width_adj", "err_adj"};
    }
}

Rows table_rows(const ExperimentReport& report, Table table) {
    Rows rows;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const RunRecord& r : report.runs) {
        const std::string n = std::to_string(r.N);
        if (table == Table::kNK) {
            const bool have = r.nk.rho > 0.0;
            rows.push_back({n, num(r.h), num(r.ok || have ? r.constants.eta : nan), num(have ? r.nk.rho : nan),
                            num(have ? r.nk.q : nan), num(have ? r.nk.p : nan)});
        } else if (table == Table::kSanity) {
            const bool have = r.nk.rho > 0.0;
            rows.push_back({n, num(r.energy_error), num(have ? r.nk.rho : nan), num(r.error_ratio),
                            r.inside ? "1" : "0"});
        } else {
            const QoIKind want = table == Table::kQoILinear ? QoIKind::kLinear : QoIKind::kQuadraticL2;
            for (const QoIRecord& q : r.qois) {
                if (q.kind != want) continue;
                const double adj = q.adjoint ? q.adjoint->half_width : nan;
                rows.push_back({n, num(q.baseline.center), num(q.error), num(q.baseline.half_width), num(adj),
                                num(q.error / adj)});
            }
        }
    }
    return rows;
}

std::string join(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
    }
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    NKCERT_REQUIRE(out.good(), "emit: cannot open " + path.string() + " for writing");
    out << content;
    out.flush();
    NKCERT_REQUIRE(out.good(), "emit: write failed for " + path.string());
}

json enclosure_json(const Enclosure& e) {
    json j;
    j["center"] = e.center;
    j["half_width"] = e.half_width;
    j["lo"] = e.lo;
    j["hi"] = e.hi;
    if (e.kind == EnclosureKind::kAdjoint) {
        j["budget"] = {{"residual_pairing", e.budget.residual_pairing},
                       {"remainder_adjoint", e.budget.remainder_adjoint},
                       {"adjoint_error", e.budget.adjoint_error},
                       {"output_curvature", e.budget.output_curvature}};
        j["adjoint_residual"] = e.adjoint_residual;
        j["adjoint_norm"] = e.adjoint_norm;
    }
    return j;
}

json run_json(const RunRecord& r) {
    json j;
    j["N"] = r.N;
    j["h"] = r.h;
    j["ok"] = r.ok;
    j["failure"] = r.failure;
    j["newton"] = {{"iterations", r.newton_iterations},
                   {"converged", r.newton_converged},
                   {"increment_norms", r.newton_increments}};
    j["energy_norm"] = r.energy_norm;
    j["residual"] = {{"r_bound", r.residual.r_bound},
                     {"eta_mis", r.residual.eta_mis},
                     {"eta_osc", r.residual.eta_osc}};
    j["audit"] = {{"max_face_mismatch", r.audit.max_face_mismatch},
                  {"face_scale", r.audit.face_scale},
                  {"worst_face", r.audit.worst_face},
                  {"max_divergence_defect", r.audit.max_divergence_defect}};
    j["stability"] = {{"alpha", r.stability.alpha}, {"justification", r.stability.justification}};
    j["constants"] = {{"eta", r.constants.eta}, {"alpha", r.constants.alpha}, {"L0", r.constants.L0},
                      {"L1", r.constants.L1},   {"C2", r.constants.C2},       {"C4", r.constants.C4}};
    json trace = json::array();
    for (const RadiusProbe& p : r.nk.trace) trace.push_back({{"rho", p.rho}, {"p", p.p}, {"q", p.q}});
    j["nk"] = {{"rho", r.nk.rho},
               {"p", r.nk.p},
               {"q", r.nk.q},
               {"admissible", r.nk.admissible},
               {"path", to_string(r.nk.path)},
               {"sanity", {{"delta", r.nk.sanity_delta}, {"p_below", r.nk.p_below}, {"p_above", r.nk.p_above}}},
               {"bracket_width", r.nk.bracket_width},
               {"trace", trace}};
    j["sanity"] = {{"err", r.energy_error}, {"ratio", r.error_ratio}, {"inside", r.inside}};
    json qois = json::array();
    for (const QoIRecord& q : r.qois) {
        json e;
        e["name"] = q.name;
        e["kind"] = qoi_key(q.kind);
        e["exact"] = q.exact;
        e["error"] = q.error;
        e["baseline"] = enclosure_json(q.baseline);
        e["adjoint"] = q.adjoint ? enclosure_json(*q.adjoint) : json(nullptr);
        qois.push_back(e);
    }
    j["qois"] = qois;
    return j;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

Rows parse_csv(const std::string& text) {
    Rows rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        rows.push_back(split(line));
    }
    return rows;
}

bool parse_number(const std::string& s, double& v) {
    if (s.empty()) return false;
    char* end = nullptr;
    v = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    NKCERT_REQUIRE(in.good(), "check: cannot open " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

std::string render_csv(const ExperimentReport& report, Table table) {
    std::string out = join(header(table)) + "\n";
    for (const auto& row : table_rows(report, table)) out += join(row) + "\n";
    return out;
}

std::string render_pretty(const ExperimentReport& report, Table table) {
    std::ostringstream os;
    const auto put = [&os](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            os << std::setw(i == 0 ? 6 : 24) << cells[i] << (i + 1 < cells.size() ? " " : "\n");
    };
    put(header(table));
    for (const auto& row : table_rows(report, table)) put(row);
    for (const RunRecord& r : report.runs)
        if (!r.ok) os << "N=" << r.N << " failed: " << r.failure << "\n";
    return os.str();
}

std::string render_json(const ExperimentReport& report) {
    json runs = json::array();
    for (const RunRecord& r : report.runs) runs.push_back(run_json(r));
    json j;
    j["runs"] = runs;
    return j.dump(2) + "\n";
}

std::vector<std::filesystem::path> emit(const ExperimentReport& report, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    NKCERT_REQUIRE(!ec, "emit: cannot create " + dir.string() + ": " + ec.message());
    std::vector<std::filesystem::path> written;
    for (Table t : {Table::kNK, Table::kSanity, Table::kQoILinear, Table::kQoIQuadratic}) {
        written.push_back(dir / table_file_name(t));
        write_file(written.back(), render_csv(report, t));
    }
    written.push_back(dir / "report.json");
    write_file(written.back(), render_json(report));

    std::string timing = "N,newton_iterations,wall_seconds\n";
    for (const RunRecord& r : report.runs)
        timing += std::to_string(r.N) + "," + std::to_string(r.newton_iterations) + "," + num(r.wall_seconds) + "\n";
    written.push_back(dir / "timing.csv");
    write_file(written.back(), timing);
    return written;
}

void CheckResult::print(std::ostream& os) const {
    for (const ColumnCheck& c : columns) {
        os << (c.pass ? "ok    " : "FAIL  ") << c.column << ": worst rel err " << std::scientific
           << std::setprecision(3) << c.worst_error << " (rtol " << c.rtol << ")";
        if (!c.worst_row.empty()) os << " at " << c.worst_row;
        os << "\n";
    }
    for (const std::string& p : problems) os << "FAIL  " << p << "\n";
    os << (pass ? "check passed" : "check FAILED") << "\n";
    os << std::defaultfloat;
}

CheckResult check_csv(const std::string& got_csv, const std::string& ref_csv,
                      const std::map<std::string, double>& rtol_by_column, double default_rtol) {
    const Rows got = parse_csv(got_csv);
    const Rows ref = parse_csv(ref_csv);
    NKCERT_REQUIRE(!got.empty() && !ref.empty(), "check: empty table");
    NKCERT_REQUIRE(got[0] == ref[0], "check: schema mismatch: got '" + join(got[0]) + "' vs reference '" +
                                         join(ref[0]) + "'");
    const auto& cols = got[0];
    for (const auto& [name, tol] : rtol_by_column) {
        NKCERT_REQUIRE(std::find(cols.begin(), cols.end(), name) != cols.end(),
                       "check: tolerance given for unknown column '" + name + "'");
        NKCERT_REQUIRE(tol >= 0.0, "check: negative tolerance for column '" + name + "'");
    }

    CheckResult result;
    for (std::size_t c = 1; c < cols.size(); ++c) {
        ColumnCheck cc;
        cc.column = cols[c];
        const auto it = rtol_by_column.find(cols[c]);
        cc.rtol = it != rtol_by_column.end() ? it->second : default_rtol;
        result.columns.push_back(cc);
    }

    for (std::size_t i = 1; i < got.size(); ++i) {
        const auto& g = got[i];
        NKCERT_REQUIRE(g.size() == cols.size(), "check: row " + std::to_string(i) + " of got has wrong arity");
        const auto match = std::find_if(ref.begin() + 1, ref.end(), [&](const auto& r) { return r[0] == g[0]; });
        if (match == ref.end()) {
            result.problems.push_back(cols[0] + "=" + g[0] + ": no reference row");
            continue;
        }
        const auto& r = *match;
        NKCERT_REQUIRE(r.size() == cols.size(), "check: reference row " + r[0] + " has wrong arity");
        for (std::size_t c = 1; c < cols.size(); ++c) {
            ColumnCheck& cc = result.columns[c - 1];
            double gv = 0.0, rv = 0.0;
            double err = 0.0;
            if (parse_number(g[c], gv) && parse_number(r[c], rv)) {
                if (std::isnan(gv) || std::isnan(rv))
                    err = std::numeric_limits<double>::infinity();
                else
                    err = rv == 0.0 ? std::abs(gv) : std::abs(gv - rv) / std::abs(rv);
            } else if (g[c] != r[c]) {
                err = std::numeric_limits<double>::infinity();
            }
            if (err > cc.worst_error || (cc.worst_row.empty() && err == cc.worst_error)) {
                cc.worst_error = err;
                cc.worst_row = cols[0] + "=" + g[0] + " (got " + g[c] + ", ref " + r[c] + ")";
            }
        }
    }
    for (ColumnCheck& cc : result.columns) {
        cc.pass = cc.worst_error <= cc.rtol;
        result.pass = result.pass && cc.pass;
    }
    result.pass = result.pass && result.problems.empty();
    return result;
}

CheckResult check_files(const std::filesystem::path& got, const std::filesystem::path& ref,
                        const std::map<std::string, double>& rtol_by_column, double default_rtol) {
    return check_csv(read_file(got), read_file(ref), rtol_by_column, default_rtol);
}

std::vector<std::pair<std::string, CheckResult>> check_tables(const std::filesystem::path& got_dir,
                                                              const std::filesystem::path& ref_dir,
                                                              const std::map<std::string, double>& rtol_by_column,
                                                              double default_rtol) {
    std::vector<std::pair<std::string, CheckResult>> out;
    for (Table t : {Table::kNK, Table::kSanity, Table::kQoILinear, Table::kQoIQuadratic}) {
        const std::string name = table_file_name(t);
        const std::string got = read_file(got_dir / name);
        const auto cols = header(t);
        std::map<std::string, double> local;
        for (const auto& [col, tol] : rtol_by_column)
            if (std::find(cols.begin(), cols.end(), col) != cols.end()) local[col] = tol;
        out.emplace_back(name, check_csv(got, read_file(ref_dir / name), local, default_rtol));
    }
    return out;
}

}  // namespace nkcert
