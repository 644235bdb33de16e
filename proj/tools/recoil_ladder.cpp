#include <iostream>
#include <string>
#include <vector>

#include "recoil/cli.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv + 1, argv + argc);
    return recoil::cli::run_cli(args, std::cout, std::cerr);
}
