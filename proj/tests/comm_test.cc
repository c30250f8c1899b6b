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
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstring>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <sys/socket.h>
#include <unistd.h>

#include "doctest.h"
#include "dpflow/comm/collectives.h"
#include "dpflow/comm/inproc.h"
#include "dpflow/comm/socket.h"
#include "dpflow/comm/spawn.h"
#include "dpflow/comm/wire.h"
#include "dpflow/comm/world.h"

using namespace dpflow;
using namespace dpflow::comm;

namespace {

// Messages sent by every rank in a binomial-tree broadcast, by direct
// simulation of the informed set doubling each round.
std::vector<int> SimulatedBroadcastSends(int p, int* rounds) {
  std::vector<int> sends(p, 0);
  std::vector<bool> informed(p, false);
  informed[0] = true;
  int count = 1;
  *rounds = 0;
  while (count < p) {
    std::vector<int> senders;
    for (int r = 0; r < p; ++r) {
      if (informed[r]) senders.push_back(r);
    }
    for (int r : senders) {
      const int target = r + count;
      if (target < p) {
        informed[target] = true;
        ++sends[r];
      }
    }
    count = static_cast<int>(std::count(informed.begin(), informed.end(), true));
    ++*rounds;
  }
  return sends;
}

std::vector<double> SerialSum(const std::vector<std::vector<double>>& inputs) {
  std::vector<double> out(inputs.front().size(), 0.0);
  for (const auto& v : inputs) {
    for (std::size_t i = 0; i < v.size(); ++i) out[i] += v[i];
  }
  return out;
}

bool SameBits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

WorldOptions Socket() {
  WorldOptions o;
  o.transport = TransportKind::kSocket;
  o.timeout = std::chrono::seconds(20);
  return o;
}

}  // namespace

TEST_CASE("frame header layout") {
  FrameHeader h{kWireMagic, MakeTag(TagKind::kAllreduce, 5), WireType::kFloat32, 12};
  const auto bytes = EncodeHeader(h);
  CHECK(bytes.size() == 20);
  // magic, little-endian
  CHECK(bytes[0] == std::byte{0x58});
  CHECK(bytes[3] == std::byte{0x4D});
  CHECK(bytes[4] == std::byte{5});
  CHECK(bytes[7] == std::byte{0x20});
  CHECK(bytes[8] == std::byte{1});
  CHECK(bytes[12] == std::byte{12});
  const FrameHeader back = DecodeHeader(bytes);
  CHECK(back.tag == h.tag);
  CHECK(back.dtype == h.dtype);
  CHECK(back.length == h.length);

  auto bad = bytes;
  bad[0] = std::byte{0};
  CHECK_THROWS_AS(DecodeHeader(bad), ProtocolError);
  bad = bytes;
  bad[8] = std::byte{9};
  CHECK_THROWS_AS(DecodeHeader(bad), ProtocolError);
}

TEST_CASE("payload round trip is bit exact") {
  const std::vector<double> values{1.0, -0.0, 1e-310, 3.141592653589793};
  const auto bytes = EncodePayload<double>(values);
  CHECK(bytes.size() == 32);
  std::vector<double> back(values.size());
  DecodePayload<double>(bytes, std::span<double>(back));
  CHECK(SameBits(values, back));
  CHECK(TagKindOf(MakeTag(TagKind::kBarrier, 77)) == TagKind::kBarrier);
  CHECK(TagKeyOf(MakeTag(TagKind::kBarrier, 77)) == 77);
}

TEST_CASE("spawn returns per-rank values in rank order") {
  CHECK(WorldSpawn(1, [](CommWorld& w) { return w.rank(); }) == std::vector<int>{0});
  CHECK(WorldSpawn(4, [](CommWorld& w) { return w.rank(); }) == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("point to point delivery") {
  const auto got = WorldSpawn(2, [](CommWorld& w) {
    std::string seen;
    if (w.rank() == 0) {
      const std::vector<std::uint8_t> ab{'a', 'b'};
      w.SendArray<std::uint8_t>(1, 3, ab);
    } else {
      std::vector<std::uint8_t> buf(2);
      w.RecvArray<std::uint8_t>(0, 3, std::span<std::uint8_t>(buf));
      seen.assign(buf.begin(), buf.end());
    }
    return seen;
  });
  CHECK(got[1] == "ab");
}

TEST_CASE("messages on one channel arrive in order, across interleaved tags") {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 1 + static_cast<int>(gen() % 50);
    std::vector<std::uint32_t> tags(k);
    for (auto& t : tags) t = static_cast<std::uint32_t>(gen() % 3);
    for (auto options : {WorldOptions{}, Socket()}) {
      const auto received = WorldSpawn(
          2,
          [&](CommWorld& w) {
            std::vector<double> seen;
            if (w.rank() == 0) {
              for (int i = 0; i < k; ++i) {
                const std::vector<double> v{static_cast<double>(i)};
                w.SendArray<double>(1, tags[i], v);
              }
            } else {
              // Drain tag by tag; within a tag the order must be send order.
              for (std::uint32_t t = 0; t < 3; ++t) {
                for (int i = 0; i < k; ++i) {
                  if (tags[i] != t) continue;
                  std::vector<double> v(1);
                  w.RecvArray<double>(0, t, std::span<double>(v));
                  seen.push_back(v[0]);
                }
              }
            }
            return seen;
          },
          options);
      std::vector<double> expected;
      for (std::uint32_t t = 0; t < 3; ++t) {
        for (int i = 0; i < k; ++i) {
          if (tags[i] == t) expected.push_back(i);
        }
      }
      CHECK(received[1] == expected);
    }
  }
}

TEST_CASE("broadcast") {
  for (int p = 1; p <= 9; ++p) {
    CAPTURE(p);
    const auto out = WorldSpawn(p, [](CommWorld& w) {
      std::vector<double> buf{0, 0};
      if (w.rank() == 0) buf = {7, 8};
      Broadcast<double>(w, buf);
      return std::make_pair(buf, w.stats().messages_sent);
    });
    int rounds = 0;
    const auto sends = SimulatedBroadcastSends(p, &rounds);
    std::uint64_t total = 0;
    for (int r = 0; r < p; ++r) {
      CHECK(out[r].first == std::vector<double>{7, 8});
      CHECK(out[r].second == static_cast<std::uint64_t>(sends[r]));
      total += out[r].second;
    }
    CHECK(total == static_cast<std::uint64_t>(p - 1));
    CHECK(rounds == static_cast<int>(std::ceil(std::log2(p))));
  }
}

TEST_CASE("broadcast from a non-zero root") {
  const auto out = WorldSpawn(5, [](CommWorld& w) {
    std::vector<float> buf{static_cast<float>(w.rank())};
    Broadcast<float>(w, buf, 3);
    return buf[0];
  });
  for (float v : out) CHECK(v == 3.0f);
}

TEST_CASE("allreduce small cases") {
  const auto four = WorldSpawn(4, [](CommWorld& w) {
    std::vector<double> v{static_cast<double>(w.rank() + 1)};
    AllreduceSum<double>(w, v);
    return v[0];
  });
  for (double v : four) CHECK(v == 10.0);
  const auto three = WorldSpawn(3, [](CommWorld& w) {
    std::vector<double> v{1.5};
    AllreduceSum<double>(w, v);
    return v[0];
  });
  for (double v : three) CHECK(v == 4.5);
}

TEST_CASE("allreduce matches a serial sum and agrees bitwise across ranks") {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 200; ++trial) {
    const int p = 1 + static_cast<int>(gen() % 9);
    const std::size_t n = 1 + gen() % 1024;
    const bool integer = trial % 4 == 0;
    const bool mixed_sign = trial % 4 == 1;
    std::vector<std::vector<double>> inputs(p, std::vector<double>(n));
    std::uniform_real_distribution<double> mag(-3, 3), sign(-1, 1);
    for (auto& v : inputs) {
      for (double& x : v) {
        if (integer) {
          x = static_cast<double>(static_cast<std::int64_t>(gen() % 2000001) - 1000000);
        } else if (mixed_sign) {
          x = sign(gen);
        } else {
          x = std::pow(10.0, mag(gen));
        }
      }
    }
    const auto out = WorldSpawn(p, [&](CommWorld& w) {
      std::vector<double> v = inputs[w.rank()];
      AllreduceSum<double>(w, v);
      return v;
    });
    const auto oracle = SerialSum(inputs);
    for (int r = 1; r < p; ++r) CHECK(SameBits(out[r], out[0]));
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (integer) {
        CHECK(out[0][i] == oracle[i]);
        continue;
      }
      // Mixed-sign sums are compared against the sum of magnitudes, which
      // bounds the reassociation error; positive sums against themselves.
      double scale = std::abs(oracle[i]);
      if (mixed_sign) {
        scale = 0.0;
        for (const auto& v : inputs) scale += std::abs(v[i]);
      }
      worst = std::max(worst, std::abs(out[0][i] - oracle[i]) / scale);
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("allreduce is deterministic run to run") {
  std::mt19937_64 gen(4);
  std::vector<std::vector<double>> inputs(7, std::vector<double>(33));
  for (auto& v : inputs) {
    for (double& x : v) x = std::uniform_real_distribution<double>(-1, 1)(gen);
  }
  auto run = [&] {
    return WorldSpawn(7, [&](CommWorld& w) {
      std::vector<double> v = inputs[w.rank()];
      AllreduceSum<double>(w, v);
      return v;
    })[0];
  };
  CHECK(SameBits(run(), run()));
}

TEST_CASE("allreduce message counts") {
  for (int p = 1; p <= 16; ++p) {
    CAPTURE(p);
    const auto sent = WorldSpawn(p, [](CommWorld& w) {
      std::vector<double> v(100, 1.0);
      AllreduceSum<double>(w, v);
      return w.stats();
    });
    // Fold the ranks beyond the largest power of two into their partners,
    // recursive doubling among the rest, then send results back.
    int core = 1, rounds = 0;
    while (core * 2 <= p) {
      core *= 2;
      ++rounds;
    }
    for (int r = 0; r < p; ++r) {
      std::uint64_t expected = rounds;
      if (r >= core) expected = 1;
      else if (r < p - core) expected = rounds + 1;
      CHECK(sent[r].messages_sent == expected);
      CHECK(sent[r].bytes_sent == expected * 800);
    }
  }
}

TEST_CASE("traffic stats start at zero and collectives are logged") {
  WorldSpawn(4, [](CommWorld& w) {
    CHECK(w.stats().messages_sent == 0);
    CHECK(w.stats().bytes_sent == 0);
    std::vector<double> v(3, 1.0);
    AllreduceSum<double>(w, v, 42);
    Broadcast<double>(w, v);
    REQUIRE(w.collective_log().size() == 2);
    CHECK(w.collective_log()[0].kind == TagKind::kAllreduce);
    CHECK(w.collective_log()[0].key == 42);
    CHECK(w.collective_log()[0].messages_sent == 2);
    CHECK(w.collective_log()[1].kind == TagKind::kBroadcast);
    return 0;
  });
}

TEST_CASE("barrier holds every rank until all have entered") {
  for (int p : {1, 2, 4, 7}) {
    using Clock = std::chrono::steady_clock;
    const auto times = WorldSpawn(p, [](CommWorld& w) {
      // Stagger arrivals so a broken barrier would show.
      std::this_thread::sleep_for(std::chrono::milliseconds(5 * w.rank()));
      const auto enter = Clock::now();
      Barrier(w);
      const auto exit = Clock::now();
      return std::make_pair(enter, exit);
    });
    for (const auto& a : times) {
      for (const auto& b : times) CHECK(a.first <= b.second);
    }
  }
}

TEST_CASE("a failing rank aborts the world") {
  const auto start = std::chrono::steady_clock::now();
  try {
    RunWorld(4, {}, [](CommWorld& w) {
      if (w.rank() == 2) throw std::runtime_error("boom");
      std::vector<double> v(4, 1.0);
      AllreduceSum<double>(w, v);
    });
    FAIL("expected RankFailure");
  } catch (const RankFailure& e) {
    CHECK(e.rank() == 2);
    CHECK(std::string(e.what()).find("rank 2") != std::string::npos);
    CHECK(std::string(e.what()).find("boom") != std::string::npos);
  }
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(10));
}

TEST_CASE("receive timeout names the peer") {
  WorldOptions o;
  o.timeout = std::chrono::milliseconds(100);
  try {
    RunWorld(2, o, [](CommWorld& w) {
      if (w.rank() == 1) {
        std::vector<double> v(1);
        w.RecvArray<double>(0, 9, std::span<double>(v));
      }
    });
    FAIL("expected a timeout");
  } catch (const RankFailure& e) {
    CHECK(e.rank() == 1);
    CHECK(std::string(e.what()).find("from rank 0") != std::string::npos);
  }
}

TEST_CASE("mismatched payload is a protocol error") {
  CHECK_THROWS_AS(RunWorld(2, {}, [](CommWorld& w) {
                    if (w.rank() == 0) {
                      const std::vector<float> v{1.0f};
                      w.SendArray<float>(1, 1, v);
                    } else {
                      std::vector<double> v(1);
                      w.RecvArray<double>(0, 1, std::span<double>(v));
                    }
                  }),
                  RankFailure);
}

TEST_CASE("socket transport matches inproc bitwise") {
  std::mt19937_64 gen(8);
  for (int p : {1, 2, 3, 5}) {
    CAPTURE(p);
    std::vector<std::vector<double>> inputs(p, std::vector<double>(257));
    for (auto& v : inputs) {
      for (double& x : v) x = std::uniform_real_distribution<double>(-1, 1)(gen);
    }
    auto body = [&](CommWorld& w) {
      std::vector<double> v = inputs[w.rank()];
      AllreduceSum<double>(w, v);
      std::vector<double> b(4, static_cast<double>(w.rank()));
      Broadcast<double>(w, b);
      Barrier(w);
      v.insert(v.end(), b.begin(), b.end());
      return std::make_pair(v, w.stats().messages_sent);
    };
    const auto inproc = WorldSpawn(p, body);
    const auto socket = WorldSpawn(p, body, Socket());
    for (int r = 0; r < p; ++r) {
      CHECK(SameBits(inproc[r].first, socket[r].first));
      CHECK(inproc[r].second == socket[r].second);
    }
  }
}

TEST_CASE("socket frames round trip") {
  int fds[2];
  REQUIRE(::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) == 0);
  Message out{MakeTag(TagKind::kControl, 1), WireType::kUInt8, {std::byte{1}, std::byte{2}}};
  WriteFrame(fds[1], out);
  ::close(fds[1]);
  Message in;
  CHECK(ReadFrame(fds[0], in));
  CHECK(in.tag == out.tag);
  CHECK(in.dtype == out.dtype);
  CHECK(in.payload == out.payload);
  CHECK_FALSE(ReadFrame(fds[0], in));
  ::close(fds[0]);
}

TEST_CASE("endpoint parsing") {
  const Endpoint e = Endpoint::Parse("10.0.0.2:4500");
  CHECK(e.host == "10.0.0.2");
  CHECK(e.port == 4500);
  CHECK(e.ToString() == "10.0.0.2:4500");
  CHECK_THROWS_AS(Endpoint::Parse("nohost"), Error);
  CHECK_THROWS_AS(Endpoint::Parse("h:99999"), Error);
}
