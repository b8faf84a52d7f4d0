#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace nlrt {

/// Identifies one reproducible random stream. The generator state is a pure
/// function of these three numbers, so replication r can be regenerated in
/// isolation, in any order, on any worker.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t replication = 0;
  std::uint64_t stream_id = 0;

  RngStream for_replication(std::uint64_t r) const { return {seed, r, stream_id}; }
  RngStream with_stream(std::uint64_t id) const { return {seed, replication, id}; }

  friend bool operator==(const RngStream&, const RngStream&) = default;
};

/// Philox4x32-10 counter-based generator.
///
/// The 64-bit key is derived from (seed, stream_id); the 128-bit counter holds
/// the replication index in its upper half and a block counter in its lower
/// half. Each block yields two 64-bit outputs.
class Philox4x32 {
 public:
  using result_type = std::uint64_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit Philox4x32(const RngStream& stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on the open interval (0, 1), 53 bits.
  double uniform_open();

  void discard(std::uint64_t n);

  /// Raw ten-round bijection, exposed for known-answer tests.
  static Block bijection(Block counter, Key key);

 private:
  void refill();

  Key key_{};
  std::uint64_t replication_ = 0;
  std::uint64_t block_ = 0;
  Block out_{};
  int next_ = 2;  // index into the two 64-bit halves of out_
};

}  // namespace nlrt
