#include <iostream>

#include "epida_cli/cli.h"

int main(int argc, char** argv) {
  return epida::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
