#include <string>
#include <vector>

#include "rrs/cli.hpp"

int main(int argc, char** argv) {
  return rrs::dispatch(std::vector<std::string>(argv + 1, argv + argc));
}
