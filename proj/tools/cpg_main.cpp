#include "cpg/config.hpp"

#include <iostream>

int main(int argc, char** argv) { return cpg::cli_main(argc, argv, std::cout, std::cerr); }
