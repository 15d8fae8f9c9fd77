#include <iostream>
#include <string>
#include <vector>

#include "geoframe_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return geoframe::cli::run(args, std::cout, std::cerr);
}
