#include <iostream>
#include <string>
#include <vector>

#include "rippling/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return rippling::run(args, std::cout, std::cerr);
}
