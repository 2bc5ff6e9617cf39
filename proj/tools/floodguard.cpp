#include <iostream>

#include "floodguard/cli.hpp"

int main(int argc, char** argv) { return floodguard::run_cli(argc, argv, std::cout, std::cerr); }
