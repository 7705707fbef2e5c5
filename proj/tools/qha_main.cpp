#include <iostream>

#include "qha/cli.hpp"

int main(int argc, char** argv) { return qha::cli::run(argc, argv, std::cout, std::cerr); }
