#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <numeric>
#include <set>
#include <stdexcept>
#include <vector>

#include "injectbench/util.hpp"

using namespace injectbench;

TEST_CASE("fnv1a64 matches the published test vectors") {
  // Offset basis for the empty string, then the classic single-byte and
  // word vectors from the FNV reference code.
  CHECK(util::fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(util::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(util::fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("to_hex is 16 lowercase digits") {
  CHECK(util::to_hex(0) == "0000000000000000");
  CHECK(util::to_hex(0xcbf29ce484222325ULL) == "cbf29ce484222325");
  CHECK(util::to_hex(0xffffffffffffffffULL) == "ffffffffffffffff");
}

TEST_CASE("mix_seed separates streams and repeats exactly") {
  CHECK(util::mix_seed(1, 2) == util::mix_seed(1, 2));
  CHECK(util::mix_seed(1, 2) != util::mix_seed(2, 1));
  CHECK(util::mix_seed(0, 0) != 0);
}

TEST_CASE("bounded_rand stays in range and hits every residue") {
  std::mt19937_64 rng(42);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    std::uint64_t v = util::bounded_rand(rng, 7);
    REQUIRE(v < 7);
    seen.insert(v);
  }
  CHECK(seen.size() == 7);
}

TEST_CASE("bounded_rand n=1 is always zero") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 16; ++i) CHECK(util::bounded_rand(rng, 1) == 0);
}

TEST_CASE("unit_real lands in [0,1)") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    double v = util::unit_real(rng);
    REQUIRE(v >= 0.0);
    REQUIRE(v < 1.0);
  }
}

TEST_CASE("shuffled_indices is a permutation, stable for a given seed") {
  std::mt19937_64 a(99), b(99);
  auto p1 = util::shuffled_indices(257, a);
  auto p2 = util::shuffled_indices(257, b);
  CHECK(p1 == p2);
  std::vector<std::uint32_t> sorted = p1;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::uint32_t> expect(257);
  std::iota(expect.begin(), expect.end(), 0u);
  CHECK(sorted == expect);
}

TEST_CASE("parallel_for covers every index exactly once") {
  for (int workers : {1, 4, 16}) {
    std::vector<std::atomic<int>> counts(500);
    util::parallel_for(counts.size(), workers, [&](std::size_t i) { counts[i]++; });
    for (auto& c : counts) CHECK(c.load() == 1);
  }
}

TEST_CASE("parallel_for rethrows a worker exception after joining") {
  std::atomic<int> ran{0};
  CHECK_THROWS_AS(util::parallel_for(64, 8,
                                     [&](std::size_t i) {
                                       ran++;
                                       if (i == 13) throw std::runtime_error("boom");
                                     }),
                  std::runtime_error);
  CHECK(ran.load() >= 1);
}

TEST_CASE("semaphore guard enforces the ceiling") {
  util::Semaphore sem(3);
  std::atomic<int> inflight{0}, peak{0};
  util::parallel_for(200, 16, [&](std::size_t) {
    util::SemaphoreGuard guard(sem);
    int now = ++inflight;
    int prev = peak.load();
    while (now > prev && !peak.compare_exchange_weak(prev, now)) {
    }
    --inflight;
  });
  CHECK(peak.load() <= 3);
}
