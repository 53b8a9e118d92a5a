#include <iostream>

#include "crcap/cli.hpp"

int main(int argc, char** argv) { return crcap::cli::main(argc, argv, std::cout, std::cerr); }
