// spinbath: run one scenario subcommand from a config file.
//
//   spinbath <subcommand> --config <path> [--out <path>] [--format csv|json]
//
// Exit codes: 0 success, 2 configuration or usage error, 3 numerical error.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "spinbath/error.hpp"
#include "spinbath/scenario.hpp"

namespace {

constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) spinbath::fail(spinbath::ErrorKind::Config, "config: cannot read '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spin-1/2 in an absorbing oscillator bath: scenario runner"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::string out_path;
    std::string format;
    const char* names[] = {"susceptibility", "kk-check", "rates", "volterra", "oracle", "thermal", "bloch"};
    for (const char* name : names) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "scenario file")->required();
        sub->add_option("--out", out_path, "output path (overrides 'output')");
        sub->add_option("--format", format, "csv or json (overrides 'format')")->check(CLI::IsMember({"csv", "json"}));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }

    const auto command = spinbath::parse_command(app.get_subcommands().front()->get_name());
    try {
        auto config = spinbath::parse_config(read_file(config_path));
        if (!out_path.empty()) config.output = out_path;
        if (format == "csv") config.format = spinbath::OutputFormat::Csv;
        if (format == "json") config.format = spinbath::OutputFormat::Json;

        const auto summary = spinbath::run(*command, config);
        std::cout << summary.to_json() << '\n';
        for (const auto& w : summary.warnings) std::cerr << "warning: " << w << '\n';
        return 0;
    } catch (const spinbath::Error& e) {
        std::cerr << "error [" << spinbath::to_string(e.kind()) << "]: " << e.what() << '\n';
        return e.kind() == spinbath::ErrorKind::Config ? exit_config : exit_numerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_numerical;
    }
}
