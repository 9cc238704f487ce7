#include "fibrate/io.hpp"

#include "fibrate/eigenpairs.hpp"
#include "fibrate/errors.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fibrate {

using nlohmann::json;
namespace fs = std::filesystem;

std::string to_string(Command c) {
    switch (c) {
        case Command::solve: return "solve";
        case Command::mu_seq: return "mu-seq";
        case Command::scan: return "scan";
        case Command::verify: return "verify";
    }
    return "unknown";
}

Command command_from_string(const std::string& name) {
    if (name == "solve") return Command::solve;
    if (name == "mu-seq") return Command::mu_seq;
    if (name == "scan") return Command::scan;
    if (name == "verify") return Command::verify;
    throw BadSpec("unknown command '" + name + "'");
}

// ── config parsing ────────────────────────────────────────────────────────

namespace {

void expect_keys(const json& obj, const std::vector<std::string>& allowed,
                 const std::string& ctx) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw BadSpec("unknown key '" + key + "' in " + ctx);
    }
}

double need_number(const json& obj, const std::string& key, const std::string& ctx) {
    if (!obj.contains(key)) throw BadSpec("missing key '" + key + "' in " + ctx);
    if (!obj[key].is_number()) throw BadSpec("key '" + key + "' in " + ctx + " must be a number");
    return obj[key].get<double>();
}

double opt_number(const json& obj, const std::string& key, double fallback,
                  const std::string& ctx) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) throw BadSpec("key '" + key + "' in " + ctx + " must be a number");
    return obj[key].get<double>();
}

int opt_int(const json& obj, const std::string& key, int fallback, const std::string& ctx) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_integer())
        throw BadSpec("key '" + key + "' in " + ctx + " must be an integer");
    return obj[key].get<int>();
}

std::string need_string(const json& obj, const std::string& key, const std::string& ctx) {
    if (!obj.contains(key)) throw BadSpec("missing key '" + key + "' in " + ctx);
    if (!obj[key].is_string()) throw BadSpec("key '" + key + "' in " + ctx + " must be a string");
    return obj[key].get<std::string>();
}

WeightSpec parse_weight(const json& obj, const std::string& key) {
    WeightSpec w;
    if (!obj.contains(key)) return w;
    const json& v = obj[key];
    if (v.is_number()) {
        w.value = v.get<double>();
    } else if (v.is_string()) {
        w.from_file = true;
        w.path = v.get<std::string>();
    } else {
        throw BadSpec("weight '" + key + "' must be a number or a field path");
    }
    return w;
}

GridConfig parse_grid(const json& obj) {
    GridConfig g;
    std::string kind = need_string(obj, "kind", "grid");
    if (kind == "interval") {
        expect_keys(obj, {"kind", "length", "n"}, "grid");
        g.kind = GridKind::interval;
        g.length = opt_number(obj, "length", 1.0, "grid");
        g.n = opt_int(obj, "n", 256, "grid");
    } else if (kind == "rectangle") {
        expect_keys(obj, {"kind", "lx", "ly", "nx", "ny"}, "grid");
        g.kind = GridKind::rectangle;
        g.lx = opt_number(obj, "lx", 1.0, "grid");
        g.ly = opt_number(obj, "ly", 1.0, "grid");
        g.nx = opt_int(obj, "nx", 16, "grid");
        g.ny = opt_int(obj, "ny", 16, "grid");
    } else if (kind == "radial") {
        expect_keys(obj, {"kind", "radius", "n"}, "grid");
        g.kind = GridKind::radial;
        g.radius = opt_number(obj, "radius", 15.0, "grid");
        g.n = opt_int(obj, "n", 1000, "grid");
    } else {
        throw BadSpec("grid kind must be interval, rectangle, or radial");
    }
    return g;
}

void parse_options(const json& obj, RunConfig& cfg) {
    expect_keys(obj,
                {"direction", "max_iters", "tol_grad", "armijo_c", "backtrack_factor",
                 "initial_step", "tol_energy", "tol_gradient", "count", "levels", "samples",
                 "t_min", "t_max", "m", "field"},
                "options");
    if (obj.contains("direction")) {
        std::string d = need_string(obj, "direction", "options");
        if (d == "minimize")
            cfg.options.direction = Direction::minimize;
        else if (d == "maximize")
            cfg.options.direction = Direction::maximize;
        else
            throw BadSpec("options.direction must be minimize or maximize");
    }
    cfg.options.max_iters = opt_int(obj, "max_iters", cfg.options.max_iters, "options");
    cfg.options.tol_grad = opt_number(obj, "tol_grad", cfg.options.tol_grad, "options");
    cfg.options.armijo_c = opt_number(obj, "armijo_c", cfg.options.armijo_c, "options");
    cfg.options.backtrack_factor =
        opt_number(obj, "backtrack_factor", cfg.options.backtrack_factor, "options");
    cfg.options.initial_step = opt_number(obj, "initial_step", cfg.options.initial_step, "options");
    cfg.options.tol_energy = opt_number(obj, "tol_energy", cfg.options.tol_energy, "options");
    cfg.options.tol_gradient =
        opt_number(obj, "tol_gradient", cfg.options.tol_gradient, "options");
    cfg.count = opt_int(obj, "count", cfg.count, "options");
    cfg.levels = opt_int(obj, "levels", cfg.levels, "options");
    cfg.samples = opt_int(obj, "samples", cfg.samples, "options");
    cfg.scan_t_min = opt_number(obj, "t_min", cfg.scan_t_min, "options");
    cfg.scan_t_max = opt_number(obj, "t_max", cfg.scan_t_max, "options");
    cfg.scan_m = opt_int(obj, "m", cfg.scan_m, "options");
    if (obj.contains("field")) cfg.scan_field = need_string(obj, "field", "options");
}

} // namespace

RunConfig parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw BadSpec(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw BadSpec("config root must be a JSON object");
    expect_keys(doc, {"problem", "grid", "command", "options", "output", "formats", "seed"},
                "config");

    RunConfig cfg;
    if (!doc.contains("problem")) throw BadSpec("config needs a 'problem' object");
    const json& prob = doc["problem"];
    expect_keys(prob, {"kind", "p", "q", "r", "a", "omega", "f", "g"}, "problem");
    cfg.kind = problem_kind_from_string(need_string(prob, "kind", "problem"));
    cfg.p = opt_number(prob, "p", cfg.p, "problem");
    cfg.q = opt_number(prob, "q", cfg.q, "problem");
    cfg.r = opt_number(prob, "r", cfg.r, "problem");
    cfg.a = opt_number(prob, "a", cfg.a, "problem");
    cfg.omega = opt_number(prob, "omega", cfg.omega, "problem");
    cfg.f = parse_weight(prob, "f");
    cfg.g = parse_weight(prob, "g");

    if (!doc.contains("grid")) throw BadSpec("config needs a 'grid' object");
    cfg.grid = parse_grid(doc["grid"]);

    if (doc.contains("command")) cfg.command = command_from_string(need_string(doc, "command", "config"));
    if (doc.contains("options")) parse_options(doc["options"], cfg);
    if (doc.contains("output")) cfg.out_dir = need_string(doc, "output", "config");
    if (doc.contains("formats")) {
        if (!doc["formats"].is_array()) throw BadSpec("'formats' must be an array");
        cfg.formats.clear();
        for (const auto& f : doc["formats"]) {
            std::string s = f.get<std::string>();
            if (s != "json" && s != "csv") throw BadSpec("formats entries must be json or csv");
            cfg.formats.push_back(s);
        }
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_integer()) throw BadSpec("'seed' must be an integer");
        cfg.seed = doc["seed"].get<unsigned long long>();
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

// ── model construction ────────────────────────────────────────────────────

GridPtr build_grid_from_config(const GridConfig& cfg) {
    switch (cfg.kind) {
        case GridKind::interval: return build_interval_grid(cfg.length, cfg.n);
        case GridKind::rectangle: return build_rectangle_grid(cfg.lx, cfg.ly, cfg.nx, cfg.ny);
        case GridKind::radial: return build_radial_grid(cfg.radius, cfg.n);
    }
    throw BadSpec("unknown grid kind");
}

ModelSpec build_model_from_config(const RunConfig& cfg, const GridPtr& grid) {
    ProblemParams pp;
    pp.kind = cfg.kind;
    pp.p = cfg.p;
    pp.q = cfg.q;
    pp.r = cfg.r;
    pp.a = cfg.a;
    pp.omega = cfg.omega;
    if (cfg.f.from_file)
        pp.f_field = load_field(cfg.f.path, grid);
    else
        pp.f_const = cfg.f.value;
    if (cfg.g.from_file)
        pp.g_field = load_field(cfg.g.path, grid);
    else
        pp.g_const = cfg.g.value;
    return build_problem(pp, grid);
}

// ── run dispatch ──────────────────────────────────────────────────────────

ResultBundle run(const RunConfig& config) {
    auto start = std::chrono::steady_clock::now();
    ResultBundle bundle;
    bundle.config = config;

    GridPtr grid = build_grid_from_config(config.grid);
    ModelSpec model = build_model_from_config(config, grid);
    bundle.notes = model.notes;

    SolveOptions opts = config.options;
    opts.seed = config.seed;

    switch (config.command) {
        case Command::solve: {
            bundle.records = multistart(model, config.count, opts);
            for (size_t i = 0; i < bundle.records.size(); ++i) {
                bundle.record_levels.push_back(static_cast<int>(i) + 1);
                bundle.record_bounds.emplace_back("");
            }
            break;
        }
        case Command::mu_seq: {
            auto seq = mu_sequence(model, config.levels, opts);
            for (auto& [est, rec] : seq) {
                bundle.estimates.push_back(est);
                if (rec) {
                    bundle.records.push_back(*rec);
                    bundle.record_levels.push_back(est.n);
                    bundle.record_bounds.push_back(to_string(est.bound));
                }
            }
            break;
        }
        case Command::scan: {
            Field u = config.scan_field.empty() ? eigenpairs(grid, 1)[0].second
                                                : load_field(config.scan_field, grid);
            bundle.scan = fiber_scan(model, u, config.scan_t_min, config.scan_t_max, config.scan_m);
            break;
        }
        case Command::verify: {
            bundle.reports = invariant_suite(model, config.samples, config.seed);
            if (model.name == "semilinear" || model.class_tag == ClassTag::class_one)
                bundle.reports.push_back(bound_check(model));
            if (model.class_tag != ClassTag::class_two)
                bundle.reports.push_back(divergence_trend_check(model));
            break;
        }
    }

    bundle.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return bundle;
}

bool bundle_succeeded(const ResultBundle& bundle) {
    switch (bundle.config.command) {
        case Command::solve: {
            for (const auto& r : bundle.records)
                if (r.converged) return true;
            return false;
        }
        case Command::mu_seq:
            return !bundle.estimates.empty();
        case Command::scan:
            return !bundle.scan.empty();
        case Command::verify: {
            for (const auto& r : bundle.reports)
                if (!r.passed) return false;
            return !bundle.reports.empty();
        }
    }
    return false;
}

// ── serialization ─────────────────────────────────────────────────────────

namespace {

std::string fmt(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fmt(int x) { return std::to_string(x); }
std::string fmt(unsigned long long x) { return std::to_string(x); }
std::string fmt(bool b) { return b ? "true" : "false"; }

std::string jstr(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    out += "\"";
    return out;
}

std::string weight_json(const WeightSpec& w) {
    return w.from_file ? jstr(w.path) : fmt(w.value);
}

std::string grid_json(const GridConfig& g) {
    std::string out = "{\"kind\": " + jstr(to_string(g.kind));
    switch (g.kind) {
        case GridKind::interval:
            out += ", \"length\": " + fmt(g.length) + ", \"n\": " + fmt(g.n);
            break;
        case GridKind::rectangle:
            out += ", \"lx\": " + fmt(g.lx) + ", \"ly\": " + fmt(g.ly) + ", \"nx\": " + fmt(g.nx) +
                   ", \"ny\": " + fmt(g.ny);
            break;
        case GridKind::radial:
            out += ", \"radius\": " + fmt(g.radius) + ", \"n\": " + fmt(g.n);
            break;
    }
    return out + "}";
}

std::string config_json(const RunConfig& c) {
    std::ostringstream os;
    os << "{\n";
    os << "      \"problem\": {\"kind\": " << jstr(to_string(c.kind)) << ", \"p\": " << fmt(c.p)
       << ", \"q\": " << fmt(c.q) << ", \"r\": " << fmt(c.r) << ", \"a\": " << fmt(c.a)
       << ", \"omega\": " << fmt(c.omega) << ", \"f\": " << weight_json(c.f)
       << ", \"g\": " << weight_json(c.g) << "},\n";
    os << "      \"grid\": " << grid_json(c.grid) << ",\n";
    os << "      \"command\": " << jstr(to_string(c.command)) << ",\n";
    os << "      \"options\": {";
    if (c.options.direction)
        os << "\"direction\": "
           << jstr(*c.options.direction == Direction::minimize ? "minimize" : "maximize") << ", ";
    os << "\"max_iters\": " << fmt(c.options.max_iters) << ", \"tol_grad\": "
       << fmt(c.options.tol_grad) << ", \"armijo_c\": " << fmt(c.options.armijo_c)
       << ", \"backtrack_factor\": " << fmt(c.options.backtrack_factor) << ", \"initial_step\": "
       << fmt(c.options.initial_step) << ", \"tol_energy\": " << fmt(c.options.tol_energy)
       << ", \"tol_gradient\": " << fmt(c.options.tol_gradient) << ", \"count\": " << fmt(c.count)
       << ", \"levels\": " << fmt(c.levels) << ", \"samples\": " << fmt(c.samples)
       << ", \"t_min\": " << fmt(c.scan_t_min) << ", \"t_max\": " << fmt(c.scan_t_max)
       << ", \"m\": " << fmt(c.scan_m);
    if (!c.scan_field.empty()) os << ", \"field\": " << jstr(c.scan_field);
    os << "},\n";
    os << "      \"output\": " << jstr(c.out_dir) << ",\n";
    os << "      \"formats\": [";
    for (size_t i = 0; i < c.formats.size(); ++i)
        os << (i ? ", " : "") << jstr(c.formats[i]);
    os << "],\n";
    os << "      \"seed\": " << fmt(c.seed) << "\n    }";
    return os.str();
}

} // namespace

std::string bundle_to_json(const ResultBundle& b, bool with_wall) {
    std::ostringstream os;
    os << "{\n";
    os << "  \"meta\": {\n";
    os << "    \"tool\": \"fibrate\",\n";
    os << "    \"version\": " << jstr(kToolVersion) << ",\n";
    os << "    \"command\": " << jstr(to_string(b.config.command)) << ",\n";
    os << "    \"seed\": " << fmt(b.config.seed) << ",\n";
    if (with_wall) os << "    \"wall_seconds\": " << fmt(b.wall_seconds) << ",\n";
    os << "    \"notes\": [";
    for (size_t i = 0; i < b.notes.size(); ++i) os << (i ? ", " : "") << jstr(b.notes[i]);
    os << "],\n";
    os << "    \"config\": " << config_json(b.config) << "\n";
    os << "  },\n";

    os << "  \"records\": [";
    for (size_t i = 0; i < b.records.size(); ++i) {
        const auto& r = b.records[i];
        os << (i ? ",\n    " : "\n    ");
        os << "{\"n\": " << fmt(b.record_levels[i]) << ", \"mu\": " << fmt(r.mu)
           << ", \"bound\": " << jstr(b.record_bounds[i])
           << ", \"energy_residual\": " << fmt(r.energy_residual)
           << ", \"gradient_residual\": " << fmt(r.gradient_residual)
           << ", \"nehari_class\": " << jstr(to_string(r.nehari_class))
           << ", \"iterations\": " << fmt(r.iterations)
           << ", \"converged\": " << fmt(r.converged) << "}";
    }
    os << (b.records.empty() ? "],\n" : "\n  ],\n");

    os << "  \"estimates\": [";
    for (size_t i = 0; i < b.estimates.size(); ++i) {
        const auto& e = b.estimates[i];
        os << (i ? ",\n    " : "\n    ");
        os << "{\"n\": " << fmt(e.n) << ", \"bound\": " << jstr(to_string(e.bound))
           << ", \"value\": " << fmt(e.value) << ", \"basis_dim\": " << fmt(e.basis_dim) << "}";
    }
    os << (b.estimates.empty() ? "],\n" : "\n  ],\n");

    os << "  \"reports\": [";
    for (size_t i = 0; i < b.reports.size(); ++i) {
        const auto& r = b.reports[i];
        os << (i ? ",\n    " : "\n    ");
        os << "{\"name\": " << jstr(r.name) << ", \"passed\": " << fmt(r.passed)
           << ", \"worst_error\": " << fmt(r.worst_error)
           << ", \"sample_count\": " << fmt(r.sample_count) << ", \"details\": [";
        for (size_t j = 0; j < r.details.size(); ++j)
            os << (j ? ", " : "") << jstr(r.details[j]);
        os << "]}";
    }
    os << (b.reports.empty() ? "]\n" : "\n  ]\n");
    os << "}\n";
    return os.str();
}

// ── file outputs ──────────────────────────────────────────────────────────

namespace {

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw IoError("failed writing '" + path + "'");
}

std::string records_csv(const ResultBundle& b) {
    std::ostringstream os;
    os << "n,mu,bound,energy_residual,gradient_residual,nehari_class,iterations,converged\n";
    for (size_t i = 0; i < b.records.size(); ++i) {
        const auto& r = b.records[i];
        os << b.record_levels[i] << "," << fmt(r.mu) << "," << b.record_bounds[i] << ","
           << fmt(r.energy_residual) << "," << fmt(r.gradient_residual) << ","
           << to_string(r.nehari_class) << "," << r.iterations << "," << fmt(r.converged) << "\n";
    }
    return os.str();
}

std::string estimates_csv(const ResultBundle& b) {
    std::ostringstream os;
    os << "n,bound,value,basis_dim\n";
    for (const auto& e : b.estimates)
        os << e.n << "," << to_string(e.bound) << "," << fmt(e.value) << "," << e.basis_dim << "\n";
    return os.str();
}

std::string reports_csv(const ResultBundle& b) {
    std::ostringstream os;
    os << "name,passed,worst_error,sample_count\n";
    for (const auto& r : b.reports)
        os << r.name << "," << fmt(r.passed) << "," << fmt(r.worst_error) << "," << r.sample_count
           << "\n";
    return os.str();
}

std::string scan_csv(const ResultBundle& b) {
    std::ostringstream os;
    os << "t,psi,psi_prime,psi_second\n";
    for (const auto& row : b.scan)
        os << fmt(row.t) << "," << fmt(row.psi) << "," << fmt(row.psi_prime) << ","
           << fmt(row.psi_second) << "\n";
    return os.str();
}

} // namespace

std::vector<std::string> write_outputs(const ResultBundle& bundle,
                                       const std::vector<std::string>& formats,
                                       const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir + "'");

    std::vector<std::string> written;
    auto emit = [&](const std::string& name, const std::string& content) {
        std::string path = (fs::path(dir) / name).string();
        write_text(path, content);
        written.push_back(path);
    };

    for (const std::string& f : formats) {
        if (f == "json") {
            emit("results.json", bundle_to_json(bundle));
        } else if (f == "csv") {
            emit("records.csv", records_csv(bundle));
            if (!bundle.estimates.empty()) emit("estimates.csv", estimates_csv(bundle));
            if (!bundle.reports.empty()) emit("reports.csv", reports_csv(bundle));
        } else {
            throw BadSpec("unknown output format '" + f + "'");
        }
    }
    // The scan table always materializes as CSV; it has no JSON counterpart.
    if (!bundle.scan.empty()) emit("scan.csv", scan_csv(bundle));

    // Persist converged solution fields alongside the tables.
    for (size_t i = 0; i < bundle.records.size(); ++i) {
        if (bundle.records[i].v.grid == nullptr) continue;
        std::string name = "record_" + std::to_string(bundle.record_levels[i]) + ".field";
        std::string path = (fs::path(dir) / name).string();
        persist_field(bundle.records[i].v, path);
        written.push_back(path);
    }
    return written;
}

// ── field persistence ─────────────────────────────────────────────────────

void persist_field(const Field& field, const std::string& path) {
    if (!field.grid) throw BadParams("persist_field: field has no grid");
    const Grid& g = *field.grid;
    std::ostringstream os;
    os << "FIBRATE-FIELD v1\n";
    switch (g.kind) {
        case GridKind::interval:
            os << "interval " << fmt(g.lx) << " " << g.nx << "\n";
            break;
        case GridKind::rectangle:
            os << "rectangle " << fmt(g.lx) << " " << fmt(g.ly) << " " << g.nx << " " << g.ny
               << "\n";
            break;
        case GridKind::radial:
            os << "radial " << fmt(g.lx) << " " << g.nx << "\n";
            break;
    }
    for (double v : field.values) os << fmt(v) << "\n";
    write_text(path, os.str());
}

namespace {

bool close_extent(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

} // namespace

Field load_field(const std::string& path, const GridPtr& grid) {
    if (!grid) throw BadParams("load_field: null grid");
    std::ifstream in(path);
    if (!in) throw IoError("cannot open field file '" + path + "'");

    std::string header;
    std::getline(in, header);
    if (header != "FIBRATE-FIELD v1") throw FormatError("bad field header in '" + path + "'");

    std::string meta;
    std::getline(in, meta);
    std::istringstream ms(meta);
    std::string kind;
    ms >> kind;
    if (kind != to_string(grid->kind))
        throw GridMismatch("field file grid kind '" + kind + "' does not match target");
    if (grid->kind == GridKind::rectangle) {
        double lx = 0, ly = 0;
        int nx = 0, ny = 0;
        if (!(ms >> lx >> ly >> nx >> ny)) throw FormatError("bad grid line in '" + path + "'");
        if (!close_extent(lx, grid->lx) || !close_extent(ly, grid->ly) || nx != grid->nx ||
            ny != grid->ny)
            throw GridMismatch("field file rectangle grid does not match target");
    } else {
        double l = 0;
        int n = 0;
        if (!(ms >> l >> n)) throw FormatError("bad grid line in '" + path + "'");
        if (!close_extent(l, grid->lx) || n != grid->nx)
            throw GridMismatch("field file grid does not match target");
    }

    Field out(grid);
    for (int i = 0; i < out.size(); ++i) {
        std::string line;
        if (!std::getline(in, line)) throw FormatError("field file '" + path + "' truncated");
        try {
            out[i] = std::stod(line);
        } catch (const std::exception&) {
            throw FormatError("bad value on line " + std::to_string(i + 3) + " of '" + path + "'");
        }
    }
    return out;
}

} // namespace fibrate
