#include "tmlab/cli/app.hpp"

int main(int argc, char** argv) {
  return tmlab::cli::runCli(std::vector<std::string>(argv + 1, argv + argc));
}
