#include <iostream>

#include "quadform/cli.hpp"

int main(int argc, char** argv) {
  return quadform::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
