#pragma once

#include <cstddef>
#include <functional>

namespace rgd {

/// Worker count from the RGD_THREADS environment variable (read on every
/// call). Unset, empty or invalid values fall back to hardware concurrency.
int thread_count();

/// Runs body(begin, end) over [0, count) split into contiguous chunks, one per
/// worker. Chunk boundaries depend on the worker count, so bodies must write
/// disjoint outputs and must not reduce across chunks.
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body);

} // namespace rgd
