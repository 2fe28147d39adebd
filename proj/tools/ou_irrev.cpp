#include <iostream>

#include "ou_irrev/cli.hpp"

int main(int argc, char** argv) { return ouirr::cli::run_cli(argc, argv, std::cout, std::cerr); }
