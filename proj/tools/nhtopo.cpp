#include <iostream>

#include "nhtopo/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return nhtopo::run_cli(args, std::cout, std::cerr);
}
