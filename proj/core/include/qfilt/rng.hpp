#pragma once

#include <cstdint>
#include <random>

namespace qfilt {

// Deterministic, splittable random stream.
//
// Every stochastic operation in the library takes an explicit stream (or a
// seed from which one is built), so runs are reproducible bit for bit.  A
// stream is identified by a 64-bit key; split(label) derives a child key
// from (key, label) alone, independent of how many values were drawn from
// the parent.  That makes the split tree a pure function of the root seed
// and the labels, which is what lets worker pools hand out per-task streams
// without caring about scheduling order.
//
// Gaussian values use an explicit Box-Muller transform rather than
// std::normal_distribution so the byte stream does not depend on the
// standard library implementation.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  // Child stream derived from this stream's key and the given label.
  RngStream split(std::uint64_t label) const;

  std::uint64_t next_u64();
  double uniform();  // [0, 1), 53-bit resolution
  double normal();   // standard normal

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::mt19937_64 engine_;
};

}  // namespace qfilt
