#include "sntl/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return sntl::parse_and_dispatch(argc, argv, std::cout, std::cerr); }
