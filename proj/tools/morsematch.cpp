#include <iostream>

#include "morsematch/cli.hpp"

int main(int argc, char** argv) { return morsematch::cli_main(argc, argv, std::cout, std::cerr); }
