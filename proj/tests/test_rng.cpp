// Copyright 2026 The dirtygen Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <set>

#include <gtest/gtest.h>

#include "dirtygen/rng.hpp"

namespace dirtygen {
namespace {

TEST(DeriveStream, SameAddressGivesSameDraws) {
  RngStream a = derive_stream(7, "clean", 0, "age");
  RngStream b = derive_stream(7, "clean", 0, "age");
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(DeriveStream, TupleIndexChangesStream) {
  EXPECT_NE(derive_stream(7, "clean", 0, "age").next_u64(), derive_stream(7, "clean", 1, "age").next_u64());
}

TEST(DeriveStream, SeedChangesStream) {
  EXPECT_NE(derive_stream(7, "plan", 0, "age").next_u64(), derive_stream(8, "plan", 0, "age").next_u64());
}

TEST(DeriveStream, KeyFollowsDocumentedDerivation) {
  std::uint64_t k = mix64(7);
  k = mix64(k ^ fnv1a64("clean"));
  k = mix64(k ^ 3);
  k = mix64(k ^ fnv1a64("age"));
  EXPECT_EQ(stream_key(7, "clean", 3, "age"), k);
}

TEST(Fnv, KnownVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("bc", fnv1a64("a")), fnv1a64("abc"));
}

TEST(RngStream, UniformIndexStaysInRange) {
  RngStream r(42);
  for (int i = 0; i < 10000; ++i) EXPECT_LT(r.uniform_index(7), 7u);
  for (int i = 0; i < 1000; ++i) {
    auto x = r.uniform_int(-3, 3);
    EXPECT_GE(x, -3);
    EXPECT_LE(x, 3);
  }
}

TEST(RngStream, Uniform01MeanWithinThreeStandardErrors) {
  RngStream r(99);
  const int n = 100000;
  double sum = 0;
  for (int i = 0; i < n; ++i) sum += r.uniform01();
  const double se = std::sqrt(1.0 / 12.0 / n);
  EXPECT_NEAR(sum / n, 0.5, 3 * se);
}

TEST(IndexPermutation, IsABijectionWithInverse) {
  for (std::uint64_t size : {1ull, 2ull, 3ull, 10ull, 97ull, 1000ull, 4096ull}) {
    IndexPermutation p(size, 1234 + size);
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < size; ++i) {
      const auto x = p.forward(i);
      ASSERT_LT(x, size);
      EXPECT_EQ(p.inverse(x), i);
      seen.insert(x);
    }
    EXPECT_EQ(seen.size(), size);
  }
}

TEST(IndexPermutation, KeyChangesOrder) {
  IndexPermutation a(1000, 1), b(1000, 2);
  int same = 0;
  for (std::uint64_t i = 0; i < 1000; ++i) same += a.forward(i) == b.forward(i);
  EXPECT_LT(same, 20);
}

}  // namespace
}  // namespace dirtygen
