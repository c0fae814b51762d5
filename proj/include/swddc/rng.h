// Copyright 2026 The swddc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SWDDC_RNG_H_
#define SWDDC_RNG_H_

#include <cstddef>
#include <cstdint>
#include <random>

#include "swddc/types.h"

namespace swddc {

// Random stream identified by (seed, stream_id). Two streams with the same
// pair produce the same draws. The engine is seeded through std::seed_seq
// from both words, so different stream ids give unrelated sequences.
//
// Stream layout used by the closed loop (see harness.h): one stream per
// (trial, role), where the role separates the hidden truth, the
// observation noise, the filter and the control solver.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  double normal() { return normal_(engine_); }
  // uniform on [0, 1)
  double uniform();
  // uniform integer in [0, n)
  std::size_t index(std::size_t n);
  Vector normal_vector(int n);

  // Independent child stream; the child id is mixed into the stream id.
  RngStream substream(std::uint64_t child) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace swddc

#endif  // SWDDC_RNG_H_
