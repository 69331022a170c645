#include <iostream>
#include <string>
#include <vector>

#include "densplit/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return densplit::run(args, std::cout, std::cerr);
}
