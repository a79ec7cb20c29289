#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fracbs::cli {

enum ExitCode : int { kOk = 0, kValidation = 2, kNumerical = 3 };

struct RunConfig {
    std::string command;
    std::string scenario_id;
    std::string config_path;
    std::size_t terms = 25;
    std::string output_path;
    std::string report_path;
    std::optional<std::string> space_mode;
    std::optional<double> time;
    bool matrix = false;
    int precision = 6;
    std::size_t plot_points = 41;
    int verbosity = 0;
};

/// Runs one command. argv[0] is the program name. Output goes to out/err
/// unless a command writes to files.
int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& argv);

}  // namespace fracbs::cli
