#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace qha::parallel {

// Caps the number of worker threads; 0 restores the hardware default.
void set_max_threads(unsigned n);
unsigned max_threads();

// Work is always split into chunks of this many items so that the
// partition (and hence every partial sum) is independent of thread count.
inline constexpr std::size_t kChunk = 64;

inline std::size_t chunk_count(std::size_t items, std::size_t chunk = kChunk) {
  return (items + chunk - 1) / chunk;
}

// Runs body(c) for every c in [0, chunks). Each call must only write to
// state owned by chunk c. The first exception thrown by any call is
// rethrown after all workers finish.
void for_each_chunk(std::size_t chunks, const std::function<void(std::size_t)>& body);

// Pairwise reduction in a fixed tree order: ((p0+p1)+(p2+p3))+...
template <class T, class Add>
T tree_reduce(std::vector<T> parts, Add add) {
  if (parts.empty()) return T{};
  while (parts.size() > 1) {
    std::size_t half = (parts.size() + 1) / 2;
    for (std::size_t i = 0; i < parts.size() / 2; ++i)
      parts[i] = add(std::move(parts[2 * i]), std::move(parts[2 * i + 1]));
    if (parts.size() % 2) parts[half - 1] = std::move(parts.back());
    parts.resize(half);
  }
  return std::move(parts.front());
}

// Chunked reduction: body(begin, end, acc) accumulates items [begin, end)
// into acc, which starts as a copy of zero.
template <class T, class Body, class Add>
T chunked_reduce(std::size_t items, const T& zero, Body body, Add add,
                 std::size_t chunk = kChunk) {
  std::size_t chunks = chunk_count(items, chunk);
  if (chunks == 0) return zero;
  std::vector<T> parts(chunks, zero);
  for_each_chunk(chunks, [&](std::size_t c) {
    std::size_t begin = c * chunk;
    std::size_t end = begin + chunk < items ? begin + chunk : items;
    body(begin, end, parts[c]);
  });
  return tree_reduce(std::move(parts), add);
}

// Chunk size for reductions whose partials are dim x dim matrices: keeps
// the number of partials (and their memory) bounded. Depends only on the
// problem size.
inline std::size_t matrix_chunk(std::size_t items, std::size_t dim) {
  if (items == 0) return 1;
  std::size_t max_chunks = (std::size_t{1} << 22) / (dim * dim);
  if (max_chunks == 0) max_chunks = 1;
  std::size_t chunks = chunk_count(items);
  if (chunks > max_chunks) chunks = max_chunks;
  if (chunks == 0) chunks = 1;
  return (items + chunks - 1) / chunks;
}

// Independent outputs: body(i) for i in [0, items).
template <class Body>
void for_each_index(std::size_t items, Body body, std::size_t chunk = kChunk) {
  for_each_chunk(chunk_count(items, chunk), [&](std::size_t c) {
    std::size_t end = (c + 1) * chunk < items ? (c + 1) * chunk : items;
    for (std::size_t i = c * chunk; i < end; ++i) body(i);
  });
}

}  // namespace qha::parallel
