#include <iostream>
#include <string>
#include <vector>

#include "posthoc/app/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return posthoc::app::run_cli(args, std::cout, std::cerr);
}
