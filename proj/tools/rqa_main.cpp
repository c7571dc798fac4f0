#include <iostream>
#include <string>
#include <vector>

#include "rqa/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return rqa::cli::run(args, std::cin, std::cout, std::cerr);
}
