#pragma once

// Repetition-block advantage distillation. Alice hides a fresh secret c in
// a block of N raw symbols by announcing m_i = (x_i - c) mod n; Bob accepts
// the block when all of his differences d_i = (y_i - m_i) mod n coincide and
// then takes that common value as his guess for c.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <vector>

#include "qad/channel.hpp"

namespace qad {

/// beta0^N + (n - 1) q^N
double acceptance_probability(const ChannelParams& params, int block_size);

/// (n - 1) q^N / (beta0^N + (n - 1) q^N), Bob's error given acceptance.
double bob_error_after_ad(const ChannelParams& params, int block_size);

/// ln(q / beta0): the per-symbol decay rate of bob_error_after_ad.
/// -infinity when q = 0 (noiseless channel, Bob never errs).
double bob_error_exponent(const ChannelParams& params);

struct BlockTranscript {
  int block_size = 0;
  std::vector<int> alice_symbols;
  int secret = 0;
  std::vector<int> announcements;
  std::vector<int> bob_symbols;
  std::vector<int> bob_differences;
  bool accepted = false;
  std::optional<int> bob_guess;
};

/// Blocks of a session are simulated in groups of kBlocksPerStream
/// consecutive indices. Group g of a session seeded with s draws from
/// mt19937_64 initialized by seed_seq{lo(s), hi(s), lo(g), hi(g)}, and its
/// blocks consume that stream in index order. Groups are independent, so any
/// block can be regenerated by replaying its group alone.
inline constexpr std::uint64_t kBlocksPerStream = 4096;

std::mt19937_64 group_stream(std::uint64_t seed, std::uint64_t group);

BlockTranscript simulate_block(const ChannelParams& params, int block_size, std::mt19937_64& rng);

/// Simulates blocks [first, first + count) of the session and hands each
/// transcript to `visit` in index order.
void simulate_blocks(const ChannelParams& params, int block_size, std::uint64_t seed, std::uint64_t first,
                     std::uint64_t count, const std::function<void(const BlockTranscript&)>& visit);

/// Block `block_index` of the session, regenerated on its own.
BlockTranscript replay_block(const ChannelParams& params, int block_size, std::uint64_t seed,
                             std::uint64_t block_index);

struct SessionStats {
  std::uint64_t blocks_run = 0;
  std::uint64_t blocks_accepted = 0;
  std::uint64_t bob_errors = 0;

  double acceptance_rate() const;
  /// Empty when no block was accepted.
  std::optional<double> bob_error_rate() const;

  SessionStats& operator+=(const SessionStats& other);
};

/// Runs blocks 0 .. blocks-1 of the session. `threads` = 0 picks the
/// hardware concurrency; workers take whole stream groups, so the result does
/// not depend on the thread count.
SessionStats run_session(const ChannelParams& params, int block_size, std::uint64_t blocks,
                         std::uint64_t seed, unsigned threads = 1);

/// Re-derives the differences and the acceptance decision from the public
/// announcements and Bob's symbols; true when the transcript agrees.
bool transcript_consistent(const BlockTranscript& t, int n);

/// One line per block: N, x_1..x_N, c, m_1..m_N, y_1..y_N, d_1..d_N,
/// accepted (0/1), guess (empty when rejected).
void write_transcript_line(std::ostream& os, const BlockTranscript& t);

} // namespace qad
