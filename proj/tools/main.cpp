#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "experiment.hpp"

namespace ex = btl::experiment;

int main(int argc, char** argv) {
    CLI::App app{"Boolean model tensor lab: simulation, analytic densities and estimators"};
    app.set_version_flag("--version", std::string("btl ") + BTL_VERSION_STRING);

    std::string mode, spec_path, out;
    std::uint64_t seed = 0;
    int reps = 0;
    unsigned threads = 0;
    app.add_option("mode", mode, "simulate | analytic | estimate | reconstruct | oracle | window")->required();
    app.add_option("--spec", spec_path, "JSON experiment spec")->required()->check(CLI::ExistingFile);
    auto* seed_opt = app.add_option("--seed", seed, "override the spec seed");
    auto* reps_opt = app.add_option("--reps", reps, "override the replicate count")->check(CLI::PositiveNumber);
    auto* out_opt = app.add_option("--out", out, "output CSV path");
    auto* threads_opt = app.add_option("--threads", threads, "worker threads (default: BTL_THREADS, then all cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        std::ifstream in(spec_path);
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
            throw ex::ConfigError(std::string("spec is not valid JSON: ") + e.what());
        }
        const ex::Mode cli_mode = ex::parse_mode(mode);
        if (doc.contains("mode") && doc.at("mode") != mode)
            throw ex::ConfigError("mode \"" + mode + "\" conflicts with the spec's \"" + doc.at("mode").get<std::string>() + "\"");
        doc["mode"] = ex::mode_name(cli_mode);
        if (*seed_opt) doc["seed"] = seed;
        if (*reps_opt) doc["reps"] = reps;
        if (*out_opt) doc["out"] = out;

        std::vector<ex::ExperimentSpec> specs = ex::expand_runs(doc);
        for (auto& spec : specs) {
            if (*threads_opt) {
                spec.threads = threads;
            } else if (!doc.contains("threads")) {
                if (const char* env = std::getenv("BTL_THREADS")) {
                    try {
                        spec.threads = static_cast<unsigned>(std::stoul(env));
                    } catch (const std::exception&) {
                        throw ex::ConfigError("BTL_THREADS must be a non-negative integer");
                    }
                }
            }
            spec.validate();
        }

        int status = 0;
        for (const auto& spec : specs) {
            const ex::RunResult res = ex::run(spec, std::cerr);
            for (const auto& f : res.files) std::cout << f << '\n';
            if (res.status == 2) {
                std::cerr << "error: " << res.failed << " of " << res.replicates << " replicates failed (more than 1%)\n";
                status = 2;
            }
        }
        return status;
    } catch (const ex::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
