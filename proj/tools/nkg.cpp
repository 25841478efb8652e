#include <iostream>

#include "nkg/cli.hpp"

int main(int argc, char** argv) { return nkg::cli::run(argc, argv, std::cout, std::cerr); }
