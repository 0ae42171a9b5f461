#include "roughscat/blas_guard.hpp"
#include "roughscat/cli/commands.hpp"

int main(int argc, char** argv) {
  roughscat::ensure_reliable_blas(argc, argv);
  return roughscat::cli::run_cli(argc, argv);
}
