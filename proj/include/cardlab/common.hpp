#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cardlab {

// Cards are labeled 1..n; 0 means "no card".
using card_t = std::uint32_t;
using u8 = std::uint8_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Guesser state serialized to more bits than the configured budget allows.
struct MemoryBudgetExceeded : Error {
  using Error::Error;
};

// Dealer emitted an illegal draw (out of range or repeated), or a guesser's
// serialized state disagrees with its declared layout.
struct ProtocolViolation : Error {
  using Error::Error;
};

// Static dealer input is not a permutation of 1..n.
struct InvalidArrangement : Error {
  using Error::Error;
};

// Adversarial arrangement construction requires a deterministic guesser.
struct NotDeterministic : Error {
  using Error::Error;
};

// Power-sum recovery did not find the expected number of roots.
struct RecoveryInconsistent : Error {
  using Error::Error;
};

// Codec input bits are truncated or not a valid codeword.
struct MalformedCodeword : Error {
  using Error::Error;
};

// Codec (alpha, epoch) parameters exceed what the schedule permits.
struct ScheduleMismatch : Error {
  using Error::Error;
};

// Requested schedule has no room for even one suppression epoch.
struct Infeasible : Error {
  using Error::Error;
};

// Bad user-facing configuration (unknown kind, out-of-range parameter, ...).
struct ConfigError : Error {
  using Error::Error;
};

// Min-order randomness is inconsistent with the schedule (wrong reserved-set
// size, missing priority table rows, ...).
struct InvalidRandomness : Error {
  using Error::Error;
};

// Field inverse of zero.
struct DivisionByZero : Error {
  using Error::Error;
};

// rank/unrank argument outside the combinatorial domain (or past uint64).
struct RankOutOfRange : Error {
  using Error::Error;
};

// theory_curve() received a name it does not know.
struct UnknownCurve : Error {
  using Error::Error;
};

}  // namespace cardlab
