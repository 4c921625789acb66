#include <string>
#include <vector>

#include "gsreg/acceptance.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> suites(argv + 1, argv + argc);
  return gsreg::report_acceptance(gsreg::run_acceptance(suites));
}
