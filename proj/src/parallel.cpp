#include "dbi/parallel.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dbi {

namespace {

std::atomic<int> g_default_threads{0};
thread_local bool t_in_worker = false;

int resolve_threads(int requested) {
  int n = requested > 0 ? requested : g_default_threads.load();
  if (n <= 0) {
    n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
  }
  return n;
}

} // namespace

void set_default_threads(int n) { g_default_threads.store(n); }

int default_threads() { return resolve_threads(0); }

void parallel_for(std::size_t count,
                  const std::function<void(std::size_t)> &fn, int threads) {
  if (count == 0) return;
  int n = resolve_threads(threads);
  if (n > static_cast<int>(count)) n = static_cast<int>(count);
  if (n <= 1 || t_in_worker) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    t_in_worker = true;
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) break;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        break;
      }
    }
    t_in_worker = false;
  };

  std::vector<std::thread> pool;
  pool.reserve(n - 1);
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto &th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

Raster block_mean_raster(std::size_t count, std::size_t block_size,
                         const std::function<Raster(std::size_t)> &item,
                         int threads) {
  Raster unused;
  return block_mean_raster2(count, block_size, item, unused, threads);
}

Raster block_mean_raster2(std::size_t count, std::size_t block_size,
                          const std::function<Raster(std::size_t)> &item,
                          Raster &second_moment, int threads) {
  if (count == 0 || block_size == 0) return Raster();
  const std::size_t blocks = (count + block_size - 1) / block_size;
  std::vector<Raster> sums(blocks);
  std::vector<Raster> sq_sums(blocks);

  parallel_for(
      blocks,
      [&](std::size_t b) {
        const std::size_t lo = b * block_size;
        const std::size_t hi = std::min(count, lo + block_size);
        Raster sum;
        Raster sq;
        for (std::size_t i = lo; i < hi; ++i) {
          Raster v = item(i);
          if (sum.size() == 0) {
            sum = Raster(v.width(), v.height(), 0.0);
            sq = Raster(v.width(), v.height(), 0.0);
          }
          for (std::size_t k = 0; k < v.size(); ++k) {
            sum[k] += v[k];
            sq[k] += v[k] * v[k];
          }
        }
        sums[b] = std::move(sum);
        sq_sums[b] = std::move(sq);
      },
      threads);

  // Sequential combine in block order keeps the result independent of the
  // thread count.
  Raster total = std::move(sums[0]);
  Raster total_sq = std::move(sq_sums[0]);
  for (std::size_t b = 1; b < blocks; ++b) {
    for (std::size_t k = 0; k < total.size(); ++k) {
      total[k] += sums[b][k];
      total_sq[k] += sq_sums[b][k];
    }
  }
  const double inv = 1.0 / static_cast<double>(count);
  for (std::size_t k = 0; k < total.size(); ++k) {
    total[k] *= inv;
    total_sq[k] *= inv;
  }
  second_moment = std::move(total_sq);
  return total;
}

} // namespace dbi
