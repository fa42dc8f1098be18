#include <iostream>

#include "chargegrid_cli/run.hpp"

int main(int argc, char** argv) {
  return chargegrid::cli::main_with_args(argc, argv, std::cout, std::cerr);
}
