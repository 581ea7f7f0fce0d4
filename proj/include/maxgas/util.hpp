#pragma once

#include <cstddef>
#include <functional>
#include <string>

namespace maxgas {

/// Worker count: min(hardware, MAXWELLGAS_THREADS) with a floor of 1.
int worker_count();

/// Runs fn(begin, end) over disjoint chunks of [0, n) on worker threads.
/// Callers own determinism: chunks must write disjoint state.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

/// Shortest round-trippable decimal (17 significant digits).
std::string format_g17(double v);

/// FNV-1a 64-bit over bytes, hex-encoded; used for provenance hashes.
std::string fnv1a_hex(const std::string& bytes);

} // namespace maxgas
