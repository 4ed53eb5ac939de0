#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "vdm/config.hpp"
#include "vdm/experiments.hpp"

namespace {

void usage() {
    std::printf(
        "vdm - virtual-density-matrix propagation for a driven atom in a structured reservoir\n"
        "\n"
        "usage:\n"
        "  vdm run <config-file> [--out DIR] [--override key=value]...\n"
        "\n"
        "Config files are 'key = value' lines with '#' comments; see configs/ for the\n"
        "canonical experiment set. All rates are in units of the Born-Markov rate.\n"
        "The environment variable VDM_MEMORY_CAP_MB (default 2048) caps the 3^M ladder.\n"
        "exit codes: 0 success, 1 configuration error, 2 runtime error\n");
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty() || args[0] == "--help" || args[0] == "-h") {
        usage();
        return args.empty() ? 1 : 0;
    }
    if (args[0] != "run" || args.size() < 2) {
        usage();
        return 1;
    }

    const std::string config_path = args[1];
    std::string out_dir = ".";
    std::vector<std::string> overrides;
    for (std::size_t i = 2; i < args.size(); ++i) {
        if (args[i] == "--out" && i + 1 < args.size()) {
            out_dir = args[++i];
        } else if (args[i] == "--override" && i + 1 < args.size()) {
            overrides.push_back(args[++i]);
        } else {
            std::fprintf(stderr, "error: unknown argument '%s'\n", args[i].c_str());
            return 1;
        }
    }

    std::ifstream in(config_path);
    if (!in) {
        std::fprintf(stderr, "error: cannot read config file '%s'\n", config_path.c_str());
        return 1;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();

    try {
        const std::string text = vdm::apply_overrides(buffer.str(), overrides);
        const vdm::RunConfig cfg = vdm::parse_config(text);
        const vdm::RunOutputs outputs = vdm::run_experiment(cfg, out_dir);
        for (const auto& f : outputs.files) std::printf("wrote %s\n", f.c_str());
        return 0;
    } catch (const vdm::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const vdm::MemoryCapExceeded& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const vdm::NotConverged& e) {
        std::fprintf(stderr, "runtime error: %s (residual %g)\n", e.what(), e.residual);
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "runtime error: %s\n", e.what());
        return 2;
    }
}
