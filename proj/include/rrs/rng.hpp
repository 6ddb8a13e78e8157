#ifndef RRS_RNG_HPP
#define RRS_RNG_HPP

#include <array>
#include <cstdint>

namespace rrs {

//! Counter-based random stream (Philox4x32-10).
//!
//! A stream is addressed by (seed, stream_id): the seed is the Philox key,
//! the stream id occupies the high counter words.  Equal (seed, stream_id)
//! reproduce the exact same draw sequence; distinct stream ids index
//! non-overlapping counter blocks, so replicate r can simply run on
//! stream_id = r.  Single-owner mutable state: one stream per worker.
class RandomStream {
public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  //! Uniform on the open interval (0,1), 53-bit resolution.
  double uniform01();
  double uniform(double a, double b);
  //! Exponential with the given rate.
  double exponential(double rate);
  //! Standard normal (Marsaglia polar, spare value cached).
  double normal();

private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

//! Streams are partitioned by purpose so that independent phases of one
//! experiment never share counter blocks: stream_id = purpose << 40 | replicate.
RandomStream make_stream(std::uint64_t seed, std::uint32_t purpose,
                         std::uint64_t replicate);

}  // namespace rrs

#endif
