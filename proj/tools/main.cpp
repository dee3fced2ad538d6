#include <iostream>
#include <string>
#include <vector>

#include "crnstab/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return crnstab::run_cli(args, std::cout, std::cerr);
}
