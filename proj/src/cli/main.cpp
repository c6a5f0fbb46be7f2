#include <iostream>

#include "surfzeta/cli/app.hpp"

int main(int argc, char** argv) { return surfzeta::cli::run(argc, argv, std::cout, std::cerr); }
