#include <iostream>
#include <string>
#include <vector>

#include "qfric/cli.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return qfric::run_cli(args, std::cout, std::cerr);
}
