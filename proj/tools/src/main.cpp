#include <iostream>

#include "twomode_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return twomode::cli::run_command(args, std::cout, std::cerr);
}
