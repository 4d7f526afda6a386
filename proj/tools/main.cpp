#include <iostream>

#include "impulse/cli.hpp"

int main(int argc, char** argv) { return impulse::run_cli(argc, argv, std::cout, std::cerr); }
