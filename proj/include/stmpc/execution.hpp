#pragma once

namespace stmpc {

/// Execution policy for the data-parallel kernels (table construction and the
/// per-pattern solves). `serial` is the reference implementation; `parallel`
/// runs the same per-item code under OpenMP. Results are identical either way.
enum class Execution { serial, parallel };

}  // namespace stmpc
