#include "nca/cli.hpp"

int main(int argc, char** argv) {
  return nca::cli::run({argv + 1, argv + argc});
}
