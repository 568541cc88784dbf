#include <iostream>

#include "geoleader/cli.hpp"

int main(int argc, char** argv) { return geoleader::cli_main(argc, argv, std::cout, std::cerr); }
