#include "roughscat/blas_guard.hpp"

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include <Eigen/Core>

#include "roughscat/common.hpp"

extern "C" void openblas_set_num_threads(int num_threads);

namespace roughscat {

bool blas_self_test() {
  const int n = 320;
  Eigen::MatrixXd a(n, n), b(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      a(i, j) = std::sin(0.37 * i + 1.3 * j);
      b(i, j) = std::cos(0.11 * i - 0.7 * j);
    }
  }
  const Eigen::MatrixXd c = a * b;
  double err = 0.0;
  for (int j = 0; j < n; j += 7) {
    for (int i = 0; i < n; i += 5) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += a(i, k) * b(k, j);
      err = std::max(err, std::abs(s - c(i, j)));
    }
  }
  return err < 1e-10;
}

void ensure_reliable_blas(int argc, char** argv) {
  (void)argc;
  openblas_set_num_threads(1);
  if (blas_self_test()) return;
  if (std::getenv("OPENBLAS_CORETYPE") == nullptr) {
    setenv("OPENBLAS_CORETYPE", "SkylakeX", 1);
    std::fflush(nullptr);
    execv("/proc/self/exe", argv);
  }
  throw NumericalError("BLAS self-test failed: matrix products are wrong (try setting OPENBLAS_CORETYPE)");
}

}  // namespace roughscat
