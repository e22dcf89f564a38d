#include <iostream>

#include "negai/cli.hpp"

int main(int argc, char** argv) { return negai::run_cli(argc, argv, std::cout, std::cerr); }
