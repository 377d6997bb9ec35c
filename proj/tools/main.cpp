#include <iostream>

#include "mstream/cli.hpp"

int main(int argc, char** argv) { return mstream::cli::run(argc, argv, std::cout, std::cerr); }
