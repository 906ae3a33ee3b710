#include <iostream>
#include <string>
#include <vector>

#include "fpplab/cli.hpp"

int main(int argc, char** argv) {
  return fpplab::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
