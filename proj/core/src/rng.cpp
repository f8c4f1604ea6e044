#include "qfilt/rng.hpp"

#include <cmath>
#include <numbers>

namespace qfilt {
namespace {

// splitmix64 finalizer; good avalanche, cheap, and stable across platforms.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed) : key_(mix64(seed)), engine_(mix64(seed) ^ 0x6a09e667f3bcc909ull) {}

RngStream RngStream::split(std::uint64_t label) const {
  RngStream child(0);
  child.key_ = mix64(key_ ^ mix64(label + 0x9e3779b97f4a7c15ull));
  child.engine_.seed(child.key_ ^ 0x6a09e667f3bcc909ull);
  return child;
}

std::uint64_t RngStream::next_u64() { return engine_(); }

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  // Box-Muller; u1 is kept away from zero so the log is finite.
  double u1 = uniform();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace qfilt
