#include <iostream>

#include "fermispin/cli.hpp"

int main(int argc, char** argv) { return fermispin::cli::run(argc, argv, std::cout, std::cerr); }
