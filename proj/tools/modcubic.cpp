#include <iostream>
#include <string>
#include <vector>

#include "modcubic/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return modcubic::cli::run(std::move(args), std::cout, std::cerr);
}
