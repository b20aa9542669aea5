#include <iostream>

#include "rescomm/cli.hpp"

int main(int argc, char** argv) { return rescomm::run_cli(argc, argv, std::cout, std::cerr); }
