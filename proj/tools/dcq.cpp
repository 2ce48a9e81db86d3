#include <iostream>

#include "dcq/cli.hpp"

int main(int argc, char** argv) { return dcq::run_cli(argc, argv, std::cout, std::cerr); }
