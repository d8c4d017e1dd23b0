#include "c2u/cli/app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return c2u::cli::run_cli(args);
}
