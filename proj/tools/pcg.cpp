#include <iostream>

#include "pcg/cli.hpp"

int main(int argc, char** argv) { return pcg::cli::run(argc, argv, std::cout, std::cerr); }
