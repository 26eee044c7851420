#include <iostream>
#include <string>
#include <vector>

#include "dynkin/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return dynkin::cli::run(args, std::cout, std::cerr);
}
