/* Copyright 2026 The dpflow Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "dpflow/datasets/dataset.h"
#include "dpflow/datasets/partition.h"
#include "dpflow/error.h"

using namespace dpflow;
using namespace dpflow::datasets;

namespace {

void PutBE32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

// IDX files as defined for MNIST: big-endian magic (0x00000803 images,
// 0x00000801 labels), big-endian dimension sizes, then raw bytes.
std::vector<std::uint8_t> IdxImages(std::uint32_t count, std::uint32_t rows, std::uint32_t cols,
                                    std::uint8_t fill) {
  std::vector<std::uint8_t> out;
  PutBE32(out, 0x00000803);
  PutBE32(out, count);
  PutBE32(out, rows);
  PutBE32(out, cols);
  out.insert(out.end(), static_cast<std::size_t>(count) * rows * cols, fill);
  return out;
}

std::vector<std::uint8_t> IdxLabels(const std::vector<std::uint8_t>& labels) {
  std::vector<std::uint8_t> out;
  PutBE32(out, 0x00000801);
  PutBE32(out, static_cast<std::uint32_t>(labels.size()));
  out.insert(out.end(), labels.begin(), labels.end());
  return out;
}

std::string ErrorOf(auto&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("idx reader") {
  const Dataset d = ParseIdx(IdxImages(2, 2, 2, 255), IdxLabels({1, 0}));
  CHECK(d.inputs.shape() == engine::Shape{2, 4});
  for (double v : d.inputs.data()) CHECK(v == 1.0);
  CHECK(d.labels == std::vector<int>{1, 0});
  CHECK(d.classes == 2);

  auto mid = IdxImages(1, 1, 2, 0);
  mid[16] = 51;
  CHECK(ParseIdx(mid, IdxLabels({0}), 10).inputs[0] == doctest::Approx(0.2));
}

TEST_CASE("idx errors carry offsets") {
  const auto images = IdxImages(3, 2, 2, 1);
  const std::string wrong_magic = ErrorOf([&] { ParseIdx(images, images); });
  CHECK(wrong_magic.find("0x00000803") != std::string::npos);
  CHECK(wrong_magic.find("offset 0") != std::string::npos);

  const std::string count = ErrorOf([&] { ParseIdx(images, IdxLabels({0, 1})); });
  CHECK(count.find("does not match") != std::string::npos);
  CHECK(count.find("offset 4") != std::string::npos);

  auto truncated = images;
  truncated.resize(truncated.size() - 1);
  const std::string trunc = ErrorOf([&] { ParseIdx(truncated, IdxLabels({0, 1, 2})); });
  CHECK(trunc.find("offset") != std::string::npos);

  const std::string label_range = ErrorOf([&] { ParseIdx(images, IdxLabels({0, 1, 7}), 3); });
  CHECK_FALSE(label_range.empty());
}

TEST_CASE("idx files on disk") {
  const auto dir = std::filesystem::temp_directory_path() / "dpflow_idx_test";
  std::filesystem::create_directories(dir);
  const auto write = [&](const std::string& name, const std::vector<std::uint8_t>& bytes) {
    std::ofstream(dir / name, std::ios::binary)
        .write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    return dir / name;
  };
  const auto img = write("img", IdxImages(4, 3, 3, 128));
  const auto lbl = write("lbl", IdxLabels({0, 1, 2, 3}));
  const Dataset d = LoadIdx(img, lbl);
  CHECK(d.size() == 4);
  CHECK(d.dim() == 9);
  CHECK(d.classes == 4);
  CHECK_THROWS_AS(LoadIdx(dir / "missing", lbl), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("csv reader") {
  const Dataset d = ParseCsv("1,0.5,0.25\n0,0.1,0.9", 0, 2);
  CHECK(d.inputs.shape() == engine::Shape{2, 2});
  CHECK(d.labels == std::vector<int>{1, 0});
  CHECK(d.inputs.at(0, 1) == 0.25);

  const Dataset h = ParseCsv("y,a,b\r\n1,0.5,0.25\r\n0,0.1,0.9\r\n", 0, 2);
  CHECK(h.size() == 2);

  const Dataset last = ParseCsv("0.5,0.25,1\n0.1,0.9,0\n", 2, 0);
  CHECK(last.labels == std::vector<int>{1, 0});
  CHECK(last.classes == 2);
  CHECK(last.inputs.at(1, 0) == 0.1);

  const std::string range = ErrorOf([] { ParseCsv("0,1\n5,2\n", 0, 2); });
  CHECK(range.find("line 2") != std::string::npos);
  const std::string ragged = ErrorOf([] { ParseCsv("0,1,2\n1,2\n", 0, 2); });
  CHECK(ragged.find("line 2") != std::string::npos);
  const std::string text = ErrorOf([] { ParseCsv("0,1\n1,abc\n", 0, 2); });
  CHECK(text.find("line 2") != std::string::npos);
  CHECK_THROWS_AS(ParseCsv("a,b\n", 0, 2), FormatError);
}

TEST_CASE("csv round trip is exact") {
  const Dataset d = Synthetic(5, 50, 6, 3);
  for (std::size_t column : {std::size_t{0}, std::size_t{3}, std::size_t{6}}) {
    std::ostringstream out;
    WriteCsv(out, d, column);
    const Dataset back = ParseCsv(out.str(), column, d.classes);
    CHECK(back.labels == d.labels);
    CHECK(engine::BitwiseEqual(back.inputs, d.inputs));
  }
}

TEST_CASE("synthetic data") {
  const Dataset a = Synthetic(1, 1000, 8, 4);
  const Dataset b = Synthetic(1, 1000, 8, 4);
  const Dataset c = Synthetic(2, 1000, 8, 4);
  CHECK(engine::BitwiseEqual(a.inputs, b.inputs));
  CHECK(a.labels == b.labels);
  CHECK_FALSE(engine::BitwiseEqual(a.inputs, c.inputs));
  const auto hist = a.LabelHistogram();
  REQUIRE(hist.size() == 4);
  for (std::size_t count : hist) CHECK(count > 150);

  // Prefixes agree: sample i does not depend on n.
  const Dataset small = Synthetic(1, 10, 8, 4);
  for (std::size_t i = 0; i < 80; ++i) CHECK(small.inputs[i] == a.inputs[i]);
}

TEST_CASE("noise-free synthetic data is linearly separable") {
  for (int classes : {2, 3, 10, 25}) {
    const std::size_t d = 6;
    const Dataset data = Synthetic(3, 400, d, classes, 0.0);
    std::vector<std::vector<double>> centers;
    for (int c = 0; c < classes; ++c) centers.push_back(SyntheticCenter(d, c));
    // Nearest center is the linear rule argmax <x, c_k> - |c_k|^2 / 2.
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      int best = -1;
      double best_score = -1e300;
      for (int c = 0; c < classes; ++c) {
        double dot = 0, norm = 0;
        for (std::size_t j = 0; j < d; ++j) {
          dot += data.inputs.at(i, j) * centers[c][j];
          norm += centers[c][j] * centers[c][j];
        }
        const double score = dot - norm / 2;
        if (score > best_score) {
          best_score = score;
          best = c;
        }
      }
      correct += best == data.labels[i];
    }
    CHECK(correct == data.size());
  }
}

TEST_CASE("gather batch builds one-hot labels") {
  const Dataset d = Synthetic(1, 10, 3, 4);
  const std::vector<std::size_t> idx{9, 0, 9};
  const Batch b = GatherBatch(d, idx);
  CHECK(b.inputs.shape() == engine::Shape{3, 3});
  CHECK(b.onehot.shape() == engine::Shape{3, 4});
  CHECK(b.inputs.at(1, 2) == d.inputs.at(0, 2));
  for (std::size_t r = 0; r < 3; ++r) {
    double row = 0;
    for (std::size_t c = 0; c < 4; ++c) row += b.onehot.at(r, c);
    CHECK(row == 1.0);
    CHECK(b.onehot.at(r, d.labels[idx[r]]) == 1.0);
  }
  const Batch empty = GatherBatch(d, {});
  CHECK(empty.inputs.shape() == engine::Shape{0, 3});
}

TEST_CASE("shard examples") {
  const std::vector<IndexRange> expected{{0, 3}, {3, 6}, {6, 8}, {8, 10}};
  for (std::size_t r = 0; r < 4; ++r) CHECK(Shard(10, r, 4) == expected[r]);
  CHECK(Shard(7, 0, 1) == IndexRange{0, 7});
  CHECK(Shard(2, 3, 4).size() == 0);
  CHECK_THROWS_AS(Shard(5, 2, 2), Error);
}

TEST_CASE("shard sweep") {
  for (std::size_t n = 0; n <= 300; ++n) {
    for (std::size_t p = 1; p <= 16; ++p) {
      std::size_t next = 0, lo = n, hi = 0;
      for (std::size_t r = 0; r < p; ++r) {
        const IndexRange s = Shard(n, r, p);
        REQUIRE(s.begin == next);
        next = s.end;
        lo = std::min(lo, s.size());
        hi = std::max(hi, s.size());
      }
      CHECK(next == n);
      CHECK(hi - lo <= 1);
    }
  }
}

TEST_CASE("batch slice examples") {
  std::vector<std::size_t> all;
  for (std::size_t r = 0; r < 4; ++r) {
    const BatchSlice s = MakeBatchSlice(100, 8, 0, r, 4);
    CHECK(s.size() == 2);
    for (std::size_t i : s.indices()) all.push_back(i);
  }
  CHECK(all == std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7});

  CHECK(MakeBatchSlice(100, 8, 13, 0, 4).window_start() == 4);
  CHECK(MakeBatchSlice(100, 8, 13, 0, 4).index(0) == 4);

  const std::vector<std::size_t> sizes{2, 1, 1, 1};
  for (std::size_t r = 0; r < 4; ++r) CHECK(MakeBatchSlice(100, 5, 0, r, 4).size() == sizes[r]);

  // Windows wrap around the end of the data.
  const BatchSlice wrap = MakeBatchSlice(10, 4, 2, 0, 1);
  CHECK(wrap.indices() == std::vector<std::size_t>{8, 9, 0, 1});
}

TEST_CASE("more ranks than batch samples leaves some ranks empty") {
  std::size_t total = 0;
  for (std::size_t r = 0; r < 8; ++r) total += MakeBatchSlice(50, 3, 0, r, 8).size();
  CHECK(total == 3);
  CHECK(MakeBatchSlice(50, 3, 0, 7, 8).size() == 0);
}

TEST_CASE("epoch permutations") {
  const auto p0 = EpochPermutation(100, 4, 0);
  const auto p1 = EpochPermutation(100, 4, 1);
  CHECK(p0 == EpochPermutation(100, 4, 0));
  CHECK(p0 != p1);
  auto sorted = p0;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> iota(100);
  std::iota(iota.begin(), iota.end(), 0);
  CHECK(sorted == iota);

  // One epoch of shuffled batches visits every sample once.
  EpochShuffle shuffle(20, 4);
  std::multiset<std::size_t> seen;
  for (std::size_t step = 0; step < 5; ++step) {
    for (std::size_t r = 0; r < 3; ++r) {
      for (std::size_t i : shuffle.indices(MakeBatchSlice(20, 4, step, r, 3))) seen.insert(i);
    }
  }
  CHECK(seen.size() == 20);
  CHECK(std::set<std::size_t>(seen.begin(), seen.end()).size() == 20);
}

TEST_CASE("data source specs") {
  const Dataset s = LoadDataSpec("synthetic:1,100,4,2");
  CHECK(s.size() == 100);
  CHECK(s.dim() == 4);
  CHECK_THROWS_AS(LoadDataSpec("bogus"), DataSpecError);
  CHECK_THROWS_AS(LoadDataSpec("synthetic:1,100,4"), DataSpecError);
  CHECK_THROWS_AS(LoadDataSpec("synthetic:1,x,4,2"), DataSpecError);
  CHECK_THROWS_AS(LoadDataSpec("tar:foo"), DataSpecError);
  CHECK_THROWS_AS(LoadDataSpec("csv:/nonexistent/file.csv,0"), Error);
}
