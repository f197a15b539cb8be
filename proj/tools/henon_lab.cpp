#include <iostream>

#include "henon/cli.hpp"

int main(int argc, char** argv) { return henon::run(argc, argv, std::cout, std::cerr); }
