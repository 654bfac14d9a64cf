#include <iostream>

#include "dpbc/cli/app.hpp"

int main(int argc, char** argv) { return dpbc::cli::run(argc, argv, std::cout, std::cerr); }
