// geofwd command-line front end.
//
//   geofwd <solve-bf|solve-alpha|onehop|e2e|analytics|sweep> [--config FILE] [--seed N]
//          [--out FILE] [--jobs N] [--<key> VALUE ...]
//
// Precedence: built-in defaults < config file < command-line keys.

#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "geofwd/cli/commands.hpp"
#include "geofwd/cli/run_config.hpp"

namespace {

using Command = std::function<void(const geofwd::cli::RunConfig&, std::ostream&, std::ostream&, int)>;

} // namespace

int main(int argc, char** argv) {
    using namespace geofwd::cli;

    CLI::App app{"Relay selection for geographic forwarding in sleep-wake sensor networks"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(kVersion));

    std::string config_path;
    std::string out_path;
    int jobs = 1;
    app.add_option("--config", config_path, "key=value configuration file")->check(CLI::ExistingFile);
    app.add_option("--out", out_path, "CSV output path (default: stdout)");
    app.add_option("--jobs", jobs, "worker threads (0: hardware concurrency)")->check(CLI::NonNegativeNumber);

    std::map<std::string, std::string> overrides;
    for (const auto& p : kParams) {
        const std::string key(p.key);
        app.add_option("--" + key, overrides[key], std::string(p.help))->group("Parameters");
    }

    const std::pair<const char*, Command> commands[] = {
        {"solve-bf", cmd_solve_bf},   {"solve-alpha", cmd_solve_alpha}, {"onehop", cmd_onehop},
        {"e2e", cmd_e2e},             {"analytics", cmd_analytics},     {"sweep", cmd_sweep},
    };
    const char* help[] = {
        "best-forward threshold surfaces",  "simplified-forward threshold for eta",
        "one-hop Monte-Carlo evaluation",   "end-to-end simulation on a random network",
        "closed-form one-hop averages",     "one-hop or end-to-end parameter sweep",
    };
    for (std::size_t i = 0; i < std::size(commands); ++i) app.add_subcommand(commands[i].first, help[i]);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigFailure;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) {
            std::ifstream f(config_path);
            if (!f) throw geofwd::ConfigError("cannot read config file '" + config_path + "'");
            cfg.load(f);
        }
        for (const auto& p : kParams) {
            const std::string key(p.key);
            if (app.count("--" + key) > 0) cfg.set(key, overrides[key]);
        }
        if (jobs == 0) jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

        std::ostringstream csv;
        for (const auto& [name, run] : commands)
            if (app.got_subcommand(name)) run(cfg, csv, std::cerr, jobs);

        if (out_path.empty()) {
            std::cout << csv.str();
        } else {
            std::ofstream f(out_path, std::ios::binary);
            if (!f || !(f << csv.str()) || !f.flush())
                throw geofwd::ConfigError("cannot write output file '" + out_path + "'");
        }
        return kOk;
    } catch (const std::exception& e) {
        std::cerr << "geofwd: " << e.what() << '\n';
        return exit_code_for(e);
    }
}
