#include <iostream>

#include "dowg/cli.hpp"

int main(int argc, char** argv) { return dowg::run_cli(argc, argv, std::cout, std::cerr); }
