#pragma once

#include <array>
#include <cstdint>

namespace sectorcorr {

//! Splittable, counter-keyed random stream.
//!
//! The generator is xoshiro256++ with its state derived from a 64-bit key via
//! the splitmix64 finalizer. Child streams are derived from the parent *key*
//! (never from its evolving state), so a key path such as
//! (master seed, scenario, replication, role) always names the same stream
//! regardless of draw order or scheduling. This is what makes study reruns
//! bit-identical across any degree of parallelism.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key);

  //! Deterministic child stream for a sub-task index or role tag.
  RngStream split(std::uint64_t index) const;

  std::uint64_t key() const { return key_; }

  std::uint64_t next_u64();

  //! Uniform on [0, 1) with 53 random bits.
  double next_uniform();

  //! Standard normal draw (Marsaglia polar; exact distribution).
  double next_normal();

  //! Binomial(n, p) draw with the exact distribution: sequential inversion
  //! for small n*p, Hormann's BTRD accept-reject otherwise.
  //! Throws std::domain_error for n < 0 or p outside [0, 1].
  std::int64_t next_binomial(std::int64_t n, double p);

 private:
  std::uint64_t key_;
  std::array<std::uint64_t, 4> state_;
  double spare_normal_ = 0.0;
  bool has_spare_normal_ = false;
};

}  // namespace sectorcorr
