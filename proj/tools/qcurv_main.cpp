#include <clocale>
#include <string>
#include <vector>

#include "qcurv/cli.hpp"

int main(int argc, char** argv) {
  std::setlocale(LC_NUMERIC, "C");
  std::vector<std::string> args(argv + 1, argv + argc);
  return qcurv::cli_main(args);
}
