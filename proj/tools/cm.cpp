#include <iostream>

#include "cm/cli.hpp"

int main(int argc, char** argv) { return cm::run_cli(argc, argv, std::cout, std::cerr); }
