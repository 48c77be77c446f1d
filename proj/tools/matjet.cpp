#include <iostream>

#include "matjet/cli.hpp"

int main(int argc, char** argv) {
  return matjet::cli::run(argc, argv, std::cout, std::cerr);
}
