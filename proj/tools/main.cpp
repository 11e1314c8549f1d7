#include <iostream>

#include "occlunav/cli.hpp"

int main(int argc, char** argv) { return occlunav::cli_main(argc, argv, std::cout, std::cerr); }
