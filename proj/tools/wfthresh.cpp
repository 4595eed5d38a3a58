#include <iostream>
#include <string>
#include <vector>

#include "wfthresh/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return wfthresh::run_cli(args, std::cout, std::cerr);
}
