#include <iostream>

#include "qmap/cli.hpp"

int main(int argc, char** argv) { return qmap::cli::run(argc, argv, std::cout, std::cerr); }
