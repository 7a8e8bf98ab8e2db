#include <iostream>
#include <string>
#include <vector>

#include "topocons/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return topocons::run_cli(args, std::cout, std::cerr);
}
