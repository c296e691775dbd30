#include <string>
#include <vector>

#include "derham/cli.hpp"

int main(int argc, char** argv) {
  return derham::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
