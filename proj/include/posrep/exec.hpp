#pragma once

namespace posrep {

/// Kernel execution: the serial loop is the reference implementation the
/// OpenMP path is tested against; both produce bit-identical results.
enum class Exec { serial, parallel };

} // namespace posrep
