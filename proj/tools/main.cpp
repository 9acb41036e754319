#include <iostream>
#include <string>
#include <vector>

#include "dts/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dts::run_cli(args, std::cout);
}
