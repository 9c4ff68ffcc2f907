#include <iostream>

#include "gemreason/cli.hpp"

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  return gemreason::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
