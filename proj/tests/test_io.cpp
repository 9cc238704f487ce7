#include <doctest.h>

#include "fibrate/io.hpp"
#include "test_helpers.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

using namespace fibrate;
using namespace fibrate::testing;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("fibrate_test_" + std::to_string(std::rand()) + std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kSemilinearConfig = R"({
  "problem": {"kind": "semilinear", "q": 3, "r": 4},
  "grid": {"kind": "interval", "length": 1.0, "n": 64},
  "command": "verify",
  "options": {"samples": 5},
  "formats": ["json", "csv"],
  "seed": 7
})";

} // namespace

TEST_CASE("config parsing: defaults, overrides, and strictness") {
    RunConfig cfg = parse_config_text(kSemilinearConfig);
    CHECK(cfg.kind == ProblemKind::semilinear);
    CHECK(cfg.q == 3.0);
    CHECK(cfg.r == 4.0);
    CHECK(cfg.grid.kind == GridKind::interval);
    CHECK(cfg.grid.n == 64);
    CHECK(cfg.command == Command::verify);
    CHECK(cfg.samples == 5);
    CHECK(cfg.seed == 7);
    REQUIRE(cfg.formats.size() == 2);

    SUBCASE("unknown keys are rejected at every level") {
        CHECK_THROWS_AS(parse_config_text(R"({"problem": {"kind": "semilinear", "q": 3, "r": 4},
            "grid": {"kind": "interval", "n": 8}, "typo": 1})"),
                        BadSpec);
        CHECK_THROWS_AS(parse_config_text(R"({"problem": {"kind": "semilinear", "zzz": 1},
            "grid": {"kind": "interval", "n": 8}})"),
                        BadSpec);
        CHECK_THROWS_AS(parse_config_text(R"({"problem": {"kind": "semilinear"},
            "grid": {"kind": "interval", "bad_key": 8}})"),
                        BadSpec);
    }
    SUBCASE("malformed JSON and bad enums fail validation") {
        CHECK_THROWS_AS(parse_config_text("{nope"), BadSpec);
        CHECK_THROWS_AS(parse_config_text(R"({"problem": {"kind": "unknown_problem"},
            "grid": {"kind": "interval", "n": 8}})"),
                        BadParams);
        CHECK_THROWS_AS(parse_config_text(R"({"problem": {"kind": "semilinear"},
            "grid": {"kind": "interval", "n": 8}, "command": "fly"})"),
                        BadSpec);
        CHECK_THROWS_AS(parse_config_text(R"({"problem": {"kind": "semilinear"},
            "grid": {"kind": "interval", "n": 8}, "formats": ["xml"]})"),
                        BadSpec);
    }
}

TEST_CASE("field persistence round-trips bit-for-bit") {
    TempDir tmp;
    auto g = build_interval_grid(1.0, 24);
    Field u = gaussian_field(g, 12);
    std::string path = (tmp.path / "u.field").string();
    persist_field(u, path);

    Field back = load_field(path, g);
    for (int i = 0; i < u.size(); ++i) CHECK(back[i] == u[i]);

    SUBCASE("header mismatch -> FormatError") {
        std::string text = slurp(path);
        std::ofstream out(path, std::ios::binary);
        out << "NOT-A-FIELD v9\n" << text.substr(text.find('\n') + 1);
        out.close();
        CHECK_THROWS_AS(load_field(path, g), FormatError);
    }
    SUBCASE("grid size mismatch -> GridMismatch") {
        auto g2 = build_interval_grid(1.0, 25);
        CHECK_THROWS_AS(load_field(path, g2), GridMismatch);
        auto g3 = build_interval_grid(2.0, 24);
        CHECK_THROWS_AS(load_field(path, g3), GridMismatch);
        auto g4 = build_radial_grid(1.0, 24);
        CHECK_THROWS_AS(load_field(path, g4), GridMismatch);
    }
    SUBCASE("truncated file -> FormatError") {
        std::string text = slurp(path);
        std::ofstream out(path, std::ios::binary);
        out << text.substr(0, text.size() * 2 / 3);
        out.close();
        // Either a missing line or a broken value; both are format errors.
        CHECK_THROWS_AS(load_field(path, g), FormatError);
    }
    SUBCASE("rectangle fields carry both extents") {
        auto gr = build_rectangle_grid(1.0, 2.0, 5, 7);
        Field v = gaussian_field(gr, 3);
        std::string p2 = (tmp.path / "v.field").string();
        persist_field(v, p2);
        Field vb = load_field(p2, gr);
        for (int i = 0; i < v.size(); ++i) CHECK(vb[i] == v[i]);
        auto gr2 = build_rectangle_grid(2.0, 2.0, 5, 7);
        CHECK_THROWS_AS(load_field(p2, gr2), GridMismatch);
    }
}

TEST_CASE("verify run produces passing reports and well-formed outputs") {
    TempDir tmp;
    RunConfig cfg = parse_config_text(kSemilinearConfig);
    cfg.out_dir = (tmp.path / "out").string();

    ResultBundle bundle = run(cfg);
    CHECK(bundle_succeeded(bundle));
    REQUIRE(!bundle.reports.empty());
    for (const auto& r : bundle.reports) CHECK(r.passed);
    // The semilinear Nehari discrepancy note is surfaced as metadata.
    REQUIRE(!bundle.notes.empty());

    auto files = write_outputs(bundle, cfg.formats, cfg.out_dir);
    REQUIRE(files.size() >= 3);  // results.json, records.csv, reports.csv
    std::string json_text = slurp((fs::path(cfg.out_dir) / "results.json").string());
    CHECK(json_text.find("\"meta\"") != std::string::npos);
    CHECK(json_text.find("\"records\"") != std::string::npos);
    CHECK(json_text.find("\"estimates\"") != std::string::npos);
    CHECK(json_text.find("\"reports\"") != std::string::npos);

    std::string reports_text = slurp((fs::path(cfg.out_dir) / "reports.csv").string());
    CHECK(reports_text.rfind("name,passed,worst_error,sample_count", 0) == 0);
}

TEST_CASE("solve run emits records with the specified CSV columns") {
    TempDir tmp;
    RunConfig cfg = parse_config_text(kSemilinearConfig);
    cfg.command = Command::solve;
    cfg.count = 2;
    cfg.grid.n = 48;
    cfg.out_dir = (tmp.path / "out").string();

    ResultBundle bundle = run(cfg);
    CHECK(bundle_succeeded(bundle));
    REQUIRE(!bundle.records.empty());
    write_outputs(bundle, {"csv"}, cfg.out_dir);

    std::string csv = slurp((fs::path(cfg.out_dir) / "records.csv").string());
    CHECK(csv.rfind("n,mu,bound,energy_residual,gradient_residual,nehari_class,iterations,"
                    "converged",
                    0) == 0);
    // Records of the semilinear problem report the computed class N+.
    CHECK(csv.find(",N+,") != std::string::npos);
    // Converged solution fields are persisted next to the tables.
    CHECK(fs::exists(fs::path(cfg.out_dir) / "record_1.field"));
    Field v = load_field((fs::path(cfg.out_dir) / "record_1.field").string(),
                         build_grid_from_config(cfg.grid));
    CHECK(v.size() == 48);
}

TEST_CASE("nehari CSV cells use the N-/N+ encoding") {
    TempDir tmp;
    RunConfig cfg = parse_config_text(kSemilinearConfig);
    cfg.kind = ProblemKind::concave_convex;
    cfg.p = 2.0;
    cfg.q = 1.5;
    cfg.r = 3.0;
    cfg.command = Command::solve;
    cfg.count = 1;
    cfg.grid.n = 48;
    cfg.out_dir = (tmp.path / "out").string();
    ResultBundle bundle = run(cfg);
    write_outputs(bundle, {"csv"}, cfg.out_dir);
    std::string csv = slurp((fs::path(cfg.out_dir) / "records.csv").string());
    CHECK(csv.find(",N-,") != std::string::npos);  // class one certifies into N-
}

TEST_CASE("scan run writes the t,psi,psi_prime,psi_second table") {
    TempDir tmp;
    RunConfig cfg = parse_config_text(kSemilinearConfig);
    cfg.command = Command::scan;
    cfg.scan_m = 37;
    cfg.grid.n = 32;
    cfg.out_dir = (tmp.path / "out").string();

    ResultBundle bundle = run(cfg);
    REQUIRE(bundle.scan.size() == 37);
    write_outputs(bundle, {"csv"}, cfg.out_dir);
    std::string csv = slurp((fs::path(cfg.out_dir) / "scan.csv").string());
    CHECK(csv.rfind("t,psi,psi_prime,psi_second", 0) == 0);
    int rows = 0;
    for (char c : csv)
        if (c == '\n') ++rows;
    CHECK(rows == 38);  // header + m rows
}

TEST_CASE("mu-seq run: estimates serialized with bound direction") {
    TempDir tmp;
    RunConfig cfg = parse_config_text(kSemilinearConfig);
    cfg.kind = ProblemKind::concave_convex;
    cfg.p = 2.0;
    cfg.q = 1.5;
    cfg.r = 3.0;
    cfg.command = Command::mu_seq;
    cfg.levels = 3;
    cfg.grid.n = 48;
    cfg.out_dir = (tmp.path / "out").string();

    ResultBundle bundle = run(cfg);
    REQUIRE(bundle.estimates.size() == 3);
    for (size_t i = 0; i < 3; ++i) {
        CHECK(bundle.estimates[i].bound == BoundSide::upper);
        if (i > 0) CHECK(bundle.estimates[i].value >= bundle.estimates[i - 1].value - 1e-12);
    }
    std::string json_text = bundle_to_json(bundle);
    CHECK(json_text.find("\"bound\": \"upper\"") != std::string::npos);
}

TEST_CASE("weights load from persisted field paths") {
    TempDir tmp;
    auto g = build_interval_grid(1.0, 48);
    Field f(g);
    for (int i = 0; i < f.size(); ++i)
        f[i] = (g->axis_x[static_cast<size_t>(i)] < 0.5) ? 2.0 : -1.0;
    std::string fpath = (tmp.path / "f.field").string();
    persist_field(f, fpath);

    std::string cfg_text = std::string(R"({
      "problem": {"kind": "concave_convex", "p": 2, "q": 1.5, "r": 3, "f": ")") +
                           fpath + R"("},
      "grid": {"kind": "interval", "length": 1.0, "n": 48}
    })";
    RunConfig cfg = parse_config_text(cfg_text);
    CHECK(cfg.f.from_file);
    GridPtr grid = build_grid_from_config(cfg.grid);
    ModelSpec m = build_model_from_config(cfg, grid);
    // B carries the sign-changing weight: positive bumps in x < 0.5 only.
    Field left(grid), right(grid);
    for (int i = 0; i < grid->size(); ++i) {
        double x = grid->axis_x[static_cast<size_t>(i)];
        left[i] = (x < 0.5) ? 1.0 : 0.0;
        right[i] = (x > 0.5) ? 1.0 : 0.0;
    }
    CHECK(m.B.evaluate(left) > 0.0);
    CHECK(m.B.evaluate(right) < 0.0);

    // A wrong-grid weight file is a validation error.
    cfg.grid.n = 64;
    GridPtr grid2 = build_grid_from_config(cfg.grid);
    CHECK_THROWS_AS(build_model_from_config(cfg, grid2), GridMismatch);
}

TEST_CASE("determinism: identical config and seed give identical JSON") {
    RunConfig cfg = parse_config_text(kSemilinearConfig);
    cfg.command = Command::solve;
    cfg.count = 3;
    cfg.grid.n = 48;

    ResultBundle a = run(cfg);
    ResultBundle b = run(cfg);
    // Byte-identical apart from wall time, which the serializer can omit.
    CHECK(bundle_to_json(a, false) == bundle_to_json(b, false));
    CHECK(bundle_to_json(a, false).find("wall_seconds") == std::string::npos);
}

TEST_CASE("JSON doubles survive a write/parse round-trip bit-for-bit") {
    // %.17g is enough to reproduce any double exactly.
    for (double x : {3.141592653589793, 2.0 / 3.0, 1e-300, 6.62607015e-34, -0.1}) {
        char buf[48];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        CHECK(std::stod(buf) == x);
    }
}
