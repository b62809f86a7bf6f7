#include <iostream>
#include <string>
#include <vector>

#include "biharm/run_config.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return biharm::run(args, std::cout, std::cerr);
}
