#include <iostream>
#include <string>
#include <vector>

#include "blade/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return static_cast<int>(blade::run_cli(args, std::cout, std::cerr));
}
