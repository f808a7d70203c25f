#pragma once

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <random>
#include <string>
#include <string_view>

namespace injectbench::util {

/// FNV-1a on bytes. Used for content hashes (manifest hash, mock
/// seeding); not cryptographic.
std::uint64_t fnv1a64(std::string_view bytes);

/// splitmix64 finalizer; mixes seeds and stream ids into fresh seeds.
std::uint64_t mix64(std::uint64_t x);

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed ^ mix64(stream + 0x9e3779b97f4a7c15ULL));
}

std::string to_hex(std::uint64_t value);

/// Draw an integer uniformly from [0, n). Rejection sampling on top of
/// mt19937_64 so results are identical on every platform
/// (std::uniform_int_distribution is implementation-defined).
std::uint64_t bounded_rand(std::mt19937_64& rng, std::uint64_t n);

/// Uniform double in [0, 1) from the top 53 bits.
double unit_real(std::mt19937_64& rng);

/// Platform-stable Fisher-Yates shuffle of index vector [0, n).
std::vector<std::uint32_t> shuffled_indices(std::size_t n, std::mt19937_64& rng);

/// Counting semaphore with a runtime limit.
class Semaphore {
public:
  explicit Semaphore(int count) : count_(count) {}

  void acquire() {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [&] { return count_ > 0; });
    --count_;
  }

  void release() {
    {
      std::lock_guard lock(mutex_);
      ++count_;
    }
    cv_.notify_one();
  }

private:
  std::mutex mutex_;
  std::condition_variable cv_;
  int count_;
};

class SemaphoreGuard {
public:
  explicit SemaphoreGuard(Semaphore& sem) : sem_(sem) { sem_.acquire(); }
  ~SemaphoreGuard() { sem_.release(); }
  SemaphoreGuard(const SemaphoreGuard&) = delete;
  SemaphoreGuard& operator=(const SemaphoreGuard&) = delete;

private:
  Semaphore& sem_;
};

/// Run fn(i) for i in [0, n) on up to `workers` threads. Work items are
/// claimed from a shared counter; callers that need ordered output
/// should write into a pre-sized slot per index. With workers <= 1 runs
/// inline. Exceptions are captured and the first one rethrown after all
/// threads join.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace injectbench::util
