#include <string>
#include <vector>

#include "mtspace/cli.hpp"

int main(int argc, char** argv) {
  return mts::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
