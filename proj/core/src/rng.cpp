#include "nlrt/rng.hpp"

namespace nlrt {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Philox4x32::Block Philox4x32::bijection(Block c, Key k) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  return c;
}

Philox4x32::Philox4x32(const RngStream& stream) : replication_(stream.replication) {
  const std::uint64_t k = splitmix64(stream.seed ^ splitmix64(stream.stream_id + 0x632BE59BD9B4E019ull));
  key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
}

void Philox4x32::refill() {
  const Block ctr = {static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                     static_cast<std::uint32_t>(replication_),
                     static_cast<std::uint32_t>(replication_ >> 32)};
  out_ = bijection(ctr, key_);
  ++block_;
  next_ = 0;
}

Philox4x32::result_type Philox4x32::operator()() {
  if (next_ >= 2) refill();
  const int i = 2 * next_++;
  return (static_cast<std::uint64_t>(out_[i + 1]) << 32) | out_[i];
}

double Philox4x32::uniform_open() {
  // (k + 0.5) / 2^53 for k in [0, 2^53): never 0, never 1.
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

void Philox4x32::discard(std::uint64_t n) {
  while (n > 0 && next_ < 2) {
    ++next_;
    --n;
  }
  block_ += n / 2;
  if (n % 2 == 1) {
    refill();
    next_ = 1;
  }
}

}  // namespace nlrt
