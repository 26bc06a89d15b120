#pragma once

namespace egolex {

/// Number of OpenMP threads parallel kernels will use.
int thread_count();

/// Caps the OpenMP thread count. Values < 1 are ignored.
void set_thread_count(int n);

/// Applies EGOLEX_THREADS if set. Returns the resulting thread count.
int apply_thread_env();

}  // namespace egolex

namespace egolex {

/// Selects the serial reference path or the OpenMP path of a kernel. Both
/// produce bit-identical results.
enum class Exec { serial, parallel };

}  // namespace egolex
