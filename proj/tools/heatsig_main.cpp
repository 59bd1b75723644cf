#include <iostream>
#include <string>
#include <vector>

#include "heatsig/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return heatsig::cli_main(args, std::cout, std::cerr);
}
