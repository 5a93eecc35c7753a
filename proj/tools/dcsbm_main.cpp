#include <iostream>

#include "dcsbm/cli.hpp"

int main(int argc, char** argv) {
  const auto outcome = dcsbm::cli::run(argc, argv);
  std::cout << outcome.payload.dump(2) << '\n';
  return outcome.exit_code;
}
