#pragma once

namespace roughscat {

/// Verifies the BLAS backend on a 320x320 product against a plain loop and
/// pins it to a single thread so results do not depend on the machine's
/// thread count.
///
/// Some OpenBLAS builds pick a kernel set for newer Xeon cores that returns
/// wrong DGEMM results.  When the check fails and OPENBLAS_CORETYPE is not
/// set, the process re-executes itself with OPENBLAS_CORETYPE=SkylakeX;
/// otherwise NumericalError is thrown.  Call first thing in main().
void ensure_reliable_blas(int argc, char** argv);

/// True if the last check passed (or ensure_reliable_blas was not called).
bool blas_self_test();

}  // namespace roughscat
