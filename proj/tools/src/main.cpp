#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) { return ancova_cp::cli::run(argc, argv, std::cout, std::cerr); }
