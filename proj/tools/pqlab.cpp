#include <iostream>

#include "pqlab/cli.hpp"

int main(int argc, char** argv) { return pqlab::run_cli(argc, argv, std::cout, std::cerr); }
