#include <vector>

#include "hslab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return hslab::run_cli(std::move(args));
}
