#pragma once

namespace testimation {

/// Selects between the OpenMP kernels and the serial reference path.
/// Both produce bit-identical results; the serial path exists for testing
/// and benchmarking.
enum class Execution { serial, parallel };

/// Number of OpenMP threads that a parallel region would use (1 without OpenMP).
int max_threads();

/// Sets the OpenMP thread count; values < 1 are ignored.
void set_threads(int threads);

}  // namespace testimation
