#include <iostream>

#include "skelmap/cli.h"

int main(int argc, char** argv) { return skelmap::cli::run(argc, argv, std::cout, std::cerr); }
