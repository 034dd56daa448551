#include <string>
#include <vector>

#include "ecgd/cli.hpp"

int main(int argc, char** argv) {
  return ecgd::cli::run(std::vector<std::string>(argv, argv + argc));
}
