#include <iostream>
#include <string>
#include <vector>

#include "sirtd/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return sirtd::run_cli(args, std::cout, std::cerr);
}
