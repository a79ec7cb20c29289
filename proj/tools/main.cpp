#include <string>
#include <vector>

#include "fracbs/cli.hpp"

int main(int argc, char** argv) {
    return fracbs::cli::run_cli(std::vector<std::string>(argv, argv + argc));
}
