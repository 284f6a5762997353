#pragma once

#include <cstddef>
#include <functional>

#include "dbi/raster.hpp"

namespace dbi {

/// Process-wide worker cap used when a call site passes threads = 0.
void set_default_threads(int n);
int default_threads();

/// Runs fn(i) for i in [0, count). Work items must not touch shared mutable
/// state. Calls from inside a worker run serially, so nesting cannot
/// oversubscribe.
void parallel_for(std::size_t count, const std::function<void(std::size_t)> &fn,
                  int threads = 0);

/// Mean of item(0..count-1) accumulated in fixed blocks: block sums are
/// computed in parallel, then combined in block order. The result is
/// bit-identical for every thread count.
Raster block_mean_raster(std::size_t count, std::size_t block_size,
                         const std::function<Raster(std::size_t)> &item,
                         int threads = 0);

/// Same scheme, but also accumulates the elementwise mean of item^2 into
/// second_moment (for variance estimates).
Raster block_mean_raster2(std::size_t count, std::size_t block_size,
                          const std::function<Raster(std::size_t)> &item,
                          Raster &second_moment, int threads = 0);

} // namespace dbi
