#include <iostream>

#include "eec/cli.hpp"

int main(int argc, char** argv) { return eec::run_cli(argc, argv, std::cout, std::cerr); }
