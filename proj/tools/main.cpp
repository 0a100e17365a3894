#include "commands.hpp"

#include <iostream>

int main(int argc, char* argv[]) { return lingrowth::cli::run(argc, argv, std::cout, std::cerr); }
