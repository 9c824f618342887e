#include <iostream>

#include "ibprf/cli/commands.hpp"

int main(int argc, char** argv) { return ibprf::run_cli(argc, argv, std::cout, std::cerr); }
