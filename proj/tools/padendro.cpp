#include <iostream>

#include "padendro/cli.hpp"

int main(int argc, char** argv) { return padendro::cli::run_cli(argc, argv, std::cout, std::cerr); }
