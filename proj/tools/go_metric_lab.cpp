#include <string>
#include <vector>

#include "gomet/cli.hpp"

int main(int argc, char** argv) {
  return gomet::run_command(std::vector<std::string>(argv + 1, argv + argc));
}
