// fibrate — zero-energy critical points of parameter-dependent functionals.
//
//   fibrate <command> --config <path> [--out <dir>] [--format json,csv] [--seed N]
//
// commands: solve | mu-seq | scan | verify
// exit codes: 0 success, 2 validation error, 3 convergence/check failure

#include "fibrate/io.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

namespace {

std::vector<std::string> split_formats(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fibrate — zero-energy critical points via the fibering method"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string format_csv;
    long long seed = -1;

    std::vector<CLI::App*> subs;
    for (const char* name : {"solve", "mu-seq", "scan", "verify"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "path to the JSON run config")->required();
        sub->add_option("--out", out_dir, "output directory (overrides config)");
        sub->add_option("--format", format_csv, "comma-separated subset of json,csv");
        sub->add_option("--seed", seed, "RNG seed (overrides config)");
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        fibrate::RunConfig cfg = fibrate::parse_config_file(config_path);
        cfg.command = fibrate::command_from_string(app.get_subcommands().front()->get_name());
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (!format_csv.empty()) {
            cfg.formats = split_formats(format_csv);
            for (const auto& f : cfg.formats)
                if (f != "json" && f != "csv") throw fibrate::BadSpec("unknown format '" + f + "'");
        }
        if (seed >= 0) cfg.seed = static_cast<unsigned long long>(seed);

        fibrate::ResultBundle bundle = fibrate::run(cfg);
        auto files = fibrate::write_outputs(bundle, cfg.formats, cfg.out_dir);

        for (const auto& rep : bundle.reports)
            std::cout << (rep.passed ? "pass " : "FAIL ") << rep.name
                      << "  worst_error=" << rep.worst_error << "\n";
        for (size_t i = 0; i < bundle.estimates.size(); ++i) {
            const auto& e = bundle.estimates[i];
            std::cout << "mu_" << e.n << " (" << fibrate::to_string(e.bound)
                      << " bound) = " << e.value << "\n";
        }
        for (size_t i = 0; i < bundle.records.size(); ++i) {
            const auto& r = bundle.records[i];
            std::cout << "record n=" << bundle.record_levels[i] << " mu=" << r.mu
                      << " nehari=" << fibrate::to_string(r.nehari_class)
                      << " converged=" << (r.converged ? "true" : "false") << "\n";
        }
        for (const auto& f : files) std::cout << "wrote " << f << "\n";

        if (!fibrate::bundle_succeeded(bundle)) {
            std::cerr << "fibrate: " << fibrate::to_string(cfg.command)
                      << " did not fully succeed\n";
            return 3;
        }
        return 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << "fibrate: " << e.what() << "\n";
        return 2;
    } catch (const fibrate::IoError& e) {
        std::cerr << "fibrate: " << e.what() << "\n";
        return 2;
    } catch (const fibrate::FormatError& e) {
        std::cerr << "fibrate: " << e.what() << "\n";
        return 2;
    } catch (const fibrate::GridMismatch& e) {
        std::cerr << "fibrate: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "fibrate: " << e.what() << "\n";
        return 3;
    }
}
