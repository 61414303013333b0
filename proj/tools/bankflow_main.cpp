#include <iostream>

#include "bankflow/cli.hpp"

int main(int argc, char** argv) { return bankflow::run_cli(argc, argv, std::cout, std::cerr); }
