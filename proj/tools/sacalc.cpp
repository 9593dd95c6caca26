#include <iostream>

#include "sacalc/cli.hpp"

int main(int argc, char** argv) { return sacalc::run(argc, argv, std::cout, std::cerr); }
