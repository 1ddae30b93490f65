#pragma once

#include <cstddef>
#include <functional>

namespace levelset {

// Environment variable holding the worker thread count. A value of 1 runs
// everything on the calling thread.
inline constexpr const char* kThreadsEnvVar = "LEVELSET_THREADS";

// Number of worker threads: LEVELSET_THREADS if set and positive, otherwise
// std::thread::hardware_concurrency().
std::size_t thread_count();

// Samples per reduction chunk. Chunk boundaries depend only on the problem
// size, so chunked sums are bit-identical for any thread count.
inline constexpr std::size_t kReductionChunk = 16;

// Runs body(chunk_index, begin, end) for every chunk of [0, n). Chunks are
// distributed over thread_count() workers; the caller combines per-chunk
// results in chunk order.
void for_each_chunk(std::size_t n, std::size_t chunk,
                    const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

inline std::size_t chunk_count(std::size_t n, std::size_t chunk) {
  return (n + chunk - 1) / chunk;
}

}  // namespace levelset
