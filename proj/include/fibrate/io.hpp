// io.hpp — configuration parsing, run orchestration, and result output.
//
// Runs are described by a JSON config document:
//
//   {
//     "problem": {"kind": "semilinear", "q": 3, "r": 4},
//     "grid":    {"kind": "interval", "length": 1.0, "n": 256},
//     "command": "solve",                      // solve | mu-seq | scan | verify
//     "options": {"count": 8, "tol_grad": 1e-8, ...},
//     "output":  "out",
//     "formats": ["json", "csv"],
//     "seed":    42
//   }
//
// Unknown keys are rejected. Weights f and g accept a number or a path to a
// persisted field. JSON output is one document with keys {meta, records,
// estimates, reports}; all numbers are printed with 17 significant digits,
// so writing and re-parsing reproduces every double bit-for-bit. Identical
// config and seed give byte-identical JSON except for meta.wall_seconds.
//
// Field files:  line 1 "FIBRATE-FIELD v1", line 2 the grid kind, extents
// and interior node counts, then one value per line.

#pragma once

#include "fibrate/model.hpp"
#include "fibrate/optimizer.hpp"
#include "fibrate/problems.hpp"
#include "fibrate/verification.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fibrate {

inline constexpr const char* kToolVersion = "0.1.0";

enum class Command { solve, mu_seq, scan, verify };

std::string to_string(Command c);
Command command_from_string(const std::string& name);

// A weight given either as a constant or as a persisted-field path.
struct WeightSpec {
    bool from_file = false;
    double value = 1.0;
    std::string path;
};

struct GridConfig {
    GridKind kind = GridKind::interval;
    double length = 1.0;  // interval
    double lx = 1.0, ly = 1.0;  // rectangle
    double radius = 15.0;  // radial
    int n = 256;
    int nx = 16, ny = 16;
};

struct RunConfig {
    ProblemKind kind = ProblemKind::semilinear;
    double p = 2.0, q = 0.0, r = 0.0, a = 0.0, omega = 1.0;
    WeightSpec f, g;

    GridConfig grid;
    Command command = Command::solve;
    SolveOptions options;
    int count = 8;        // solve: multistart starts
    int levels = 3;       // mu-seq: K
    int samples = 100;    // verify
    double scan_t_min = 1e-3, scan_t_max = 1e3;
    int scan_m = 200;
    std::string scan_field;  // optional path; default first eigenfunction

    std::string out_dir = ".";
    std::vector<std::string> formats = {"json"};
    unsigned long long seed = 0;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

struct ResultBundle {
    RunConfig config;
    double wall_seconds = 0.0;
    std::vector<CriticalPointRecord> records;
    std::vector<int> record_levels;           // level (mu-seq) or 1-based index
    std::vector<std::string> record_bounds;   // "upper"/"lower" for mu-seq rows, else ""
    std::vector<MinMaxEstimate> estimates;
    std::vector<CheckReport> reports;
    std::vector<FiberScanRow> scan;
    std::vector<std::string> notes;           // model metadata flags
};

GridPtr build_grid_from_config(const GridConfig& cfg);
ModelSpec build_model_from_config(const RunConfig& cfg, const GridPtr& grid);

// Dispatches the configured command.
ResultBundle run(const RunConfig& config);

// True when the bundle represents a successful run of its command
// (verify: all checks passed; solve: some record converged).
bool bundle_succeeded(const ResultBundle& bundle);

// Serialized JSON document; wall time is omitted when with_wall is false so
// determinism can be checked byte-for-byte.
std::string bundle_to_json(const ResultBundle& bundle, bool with_wall = true);

// Writes the requested formats into dir; returns the created file paths.
std::vector<std::string> write_outputs(const ResultBundle& bundle,
                                       const std::vector<std::string>& formats,
                                       const std::string& dir);

void persist_field(const Field& field, const std::string& path);
Field load_field(const std::string& path, const GridPtr& grid);

} // namespace fibrate
