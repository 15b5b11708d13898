#include <iostream>

#include "tmpvc/cli.hpp"

int main(int argc, char** argv) { return tmpvc::cli::run(argc, argv, std::cout, std::cerr); }
