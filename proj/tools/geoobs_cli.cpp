#include <iostream>

#include "geoobs/cli.hpp"

int main(int argc, char** argv) { return geoobs::run_cli(argc, argv, std::cout, std::cerr); }
