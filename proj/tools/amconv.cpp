#include <iostream>

#include "amc/io/cli.hpp"

int main(int argc, char** argv) { return amc::io::run_cli(argc, argv, std::cout, std::cerr); }
