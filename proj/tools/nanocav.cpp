#include <iostream>
#include <string>
#include <vector>

#include "nanocav/commands.hpp"

int main(int argc, char** argv)
{
    const std::vector<std::string> args(argv + 1, argv + argc);
    return nanocav::run_cli(args, std::cout, std::cerr);
}
