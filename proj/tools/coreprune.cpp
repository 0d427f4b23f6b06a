#include <iostream>

#include "coreprune/cli.hpp"

int main(int argc, char** argv) { return coreprune::run_cli(argc, argv, std::cout, std::cerr); }
