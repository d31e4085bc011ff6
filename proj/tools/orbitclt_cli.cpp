#include "orbitclt/orbitclt.h"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;

int main(int argc, char** argv)
{
    CLI::App app{"Periodic-orbit limit theorem experiments"};
    std::string config_path;
    std::string out_dir = "results";
    uint64_t seed = 0;
    unsigned workers = 0;
    bool plots = false;
    app.add_option("--config", config_path, "Run configuration (JSON)")->required();
    app.add_option("--out", out_dir, "Directory for report files");
    auto* seed_opt = app.add_option("--seed", seed, "Overrides the config seed");
    app.add_option("--workers", workers, "Worker threads (0: all cores)");
    app.add_flag("--emit-plot-data", plots, "Also write CSV CDF dumps");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    std::ifstream in(config_path);
    if (!in) {
        std::cerr << "error: cannot read " << config_path << "\n";
        return 2;
    }
    std::stringstream text;
    text << in.rdbuf();
    const std::string base_dir = fs::path(config_path).parent_path().string();

    orbitclt_run_options options{};
    options.has_seed = seed_opt->count() > 0;
    options.seed = seed;
    options.workers = workers;
    options.emit_plot_data = plots ? 1 : 0;
    options.base_dir = base_dir.empty() ? "." : base_dir.c_str();

    const auto t0 = std::chrono::steady_clock::now();
    orbitclt_result* result = nullptr;
    const orbitclt_status status = orbitclt_run(text.str().c_str(), &options, &result);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!result) {
        std::cerr << "error: " << orbitclt_last_error() << "\n";
        switch (status) {
        case ORBITCLT_PARSE_ERROR:
            return 2;
        case ORBITCLT_BUDGET_EXCEEDED:
            return 3;
        default:
            return 1;
        }
    }

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        std::cerr << "error: cannot create " << out_dir << ": " << ec.message() << "\n";
        orbitclt_result_free(result);
        return 1;
    }
    for (size_t i = 0; i < orbitclt_result_file_count(result); ++i) {
        const fs::path path = fs::path(out_dir) / orbitclt_result_file_name(result, i);
        std::ofstream out(path, std::ios::binary);
        out << orbitclt_result_file_content(result, i);
        if (!out) {
            std::cerr << "error: cannot write " << path << "\n";
            orbitclt_result_free(result);
            return 1;
        }
    }
    std::cout << orbitclt_result_summary(result);
    std::fprintf(stderr, "wall time %.3f s\n", seconds);
    const int passed = orbitclt_result_passed(result);
    orbitclt_result_free(result);
    return passed ? 0 : 1;
}
