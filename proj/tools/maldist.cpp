#include <iostream>
#include <string>
#include <vector>

#include "maldist/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return maldist::run_cli(args, std::cout, std::cerr, std::cin);
}
