#include <clocale>
#include <iostream>
#include <vector>

#include "separatrix/cli.hpp"

int main(int argc, char** argv) {
    std::setlocale(LC_NUMERIC, "C");  // '.' decimal point regardless of environment
    std::ios::sync_with_stdio(false);
    std::vector<std::string> args(argv + 1, argv + argc);
    return separatrix::run_cli(args, std::cout, std::cerr);
}
