#include <iostream>

#include "qbrouwer/cli.hpp"

int main(int argc, char** argv) { return qbrouwer::cli::run(argc, argv, std::cout, std::cerr); }
