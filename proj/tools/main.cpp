#include <iostream>
#include <string>
#include <vector>

#include "cev/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return cev::cli::run(args, std::cout, std::cerr);
}
