#include <iostream>

#include "clickgraph/cli.hpp"

int main(int argc, char** argv) { return clickgraph::cli::run(argc, argv, std::cout, std::cerr); }
