#include "qad/distill.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

namespace qad {

namespace {

void require_block_size(int block_size)
{
  if (block_size < 1) {
    throw InvalidArgument("block size N must be at least 1");
  }
}

// Unbiased draw from [0, bound) by rejection; avoids the implementation-defined
// std::uniform_int_distribution so transcripts are portable.
int uniform_below(std::mt19937_64& rng, int bound)
{
  const std::uint64_t b = static_cast<std::uint64_t>(bound);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % b;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<int>(x % b);
}

double unit_real(std::mt19937_64& rng)
{
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int mod(int a, int n)
{
  const int r = a % n;
  return r < 0 ? r + n : r;
}

} // namespace

double acceptance_probability(const ChannelParams& params, int block_size)
{
  require_block_size(block_size);
  return std::pow(params.beta0, block_size) + (params.n - 1) * std::pow(params.q, block_size);
}

double bob_error_after_ad(const ChannelParams& params, int block_size)
{
  require_block_size(block_size);
  // divide through by beta0^N to stay finite for large N
  const double wrong = (params.n - 1) * std::pow(params.error_ratio(), block_size);
  return wrong / (1.0 + wrong);
}

double bob_error_exponent(const ChannelParams& params)
{
  if (params.q <= 0.0) {
    return -std::numeric_limits<double>::infinity();
  }
  return std::log(params.q / params.beta0);
}

std::mt19937_64 group_stream(std::uint64_t seed, std::uint64_t group)
{
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(group), static_cast<std::uint32_t>(group >> 32)};
  return std::mt19937_64(seq);
}

BlockTranscript simulate_block(const ChannelParams& params, int block_size, std::mt19937_64& rng)
{
  require_block_size(block_size);
  const int n = params.n;
  BlockTranscript t;
  t.block_size = block_size;
  t.alice_symbols.resize(block_size);
  t.announcements.resize(block_size);
  t.bob_symbols.resize(block_size);
  t.bob_differences.resize(block_size);

  for (int i = 0; i < block_size; ++i) {
    const int x = uniform_below(rng, n);
    int y = x;
    if (unit_real(rng) >= params.beta0) {
      y = mod(x + 1 + uniform_below(rng, n - 1), n);
    }
    t.alice_symbols[i] = x;
    t.bob_symbols[i] = y;
  }
  t.secret = uniform_below(rng, n);

  for (int i = 0; i < block_size; ++i) {
    t.announcements[i] = mod(t.alice_symbols[i] - t.secret, n);
    t.bob_differences[i] = mod(t.bob_symbols[i] - t.announcements[i], n);
  }
  const auto& d = t.bob_differences;
  t.accepted = std::all_of(d.begin(), d.end(), [&](int v) { return v == d.front(); });
  if (t.accepted) {
    t.bob_guess = d.front();
  }
  return t;
}

double SessionStats::acceptance_rate() const
{
  return blocks_run == 0 ? 0.0 : static_cast<double>(blocks_accepted) / static_cast<double>(blocks_run);
}

std::optional<double> SessionStats::bob_error_rate() const
{
  if (blocks_accepted == 0) {
    return std::nullopt;
  }
  return static_cast<double>(bob_errors) / static_cast<double>(blocks_accepted);
}

SessionStats& SessionStats::operator+=(const SessionStats& other)
{
  blocks_run += other.blocks_run;
  blocks_accepted += other.blocks_accepted;
  bob_errors += other.bob_errors;
  return *this;
}

void simulate_blocks(const ChannelParams& params, int block_size, std::uint64_t seed, std::uint64_t first,
                     std::uint64_t count, const std::function<void(const BlockTranscript&)>& visit)
{
  require_block_size(block_size);
  const std::uint64_t end = first + count;
  std::uint64_t b = first;
  while (b < end) {
    const std::uint64_t group = b / kBlocksPerStream;
    std::mt19937_64 rng = group_stream(seed, group);
    // fast-forward to b inside its group
    for (std::uint64_t skip = group * kBlocksPerStream; skip < b; ++skip) {
      simulate_block(params, block_size, rng);
    }
    const std::uint64_t group_end = std::min(end, (group + 1) * kBlocksPerStream);
    for (; b < group_end; ++b) {
      visit(simulate_block(params, block_size, rng));
    }
  }
}

BlockTranscript replay_block(const ChannelParams& params, int block_size, std::uint64_t seed,
                             std::uint64_t block_index)
{
  BlockTranscript out;
  simulate_blocks(params, block_size, seed, block_index, 1, [&](const BlockTranscript& t) { out = t; });
  return out;
}

SessionStats run_session(const ChannelParams& params, int block_size, std::uint64_t blocks,
                         std::uint64_t seed, unsigned threads)
{
  require_block_size(block_size);
  if (blocks < 1) {
    throw InvalidArgument("run_session: need at least one block");
  }
  const std::uint64_t groups = (blocks + kBlocksPerStream - 1) / kBlocksPerStream;
  if (threads == 0) {
    threads = std::max(1u, std::thread::hardware_concurrency());
  }
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, groups));

  auto run_groups = [&](std::uint64_t g_begin, std::uint64_t g_end) {
    SessionStats s;
    const std::uint64_t first = g_begin * kBlocksPerStream;
    const std::uint64_t last = std::min(blocks, g_end * kBlocksPerStream);
    simulate_blocks(params, block_size, seed, first, last - first, [&](const BlockTranscript& t) {
      ++s.blocks_run;
      if (t.accepted) {
        ++s.blocks_accepted;
        if (*t.bob_guess != t.secret) {
          ++s.bob_errors;
        }
      }
    });
    return s;
  };

  if (threads == 1) {
    return run_groups(0, groups);
  }
  std::vector<SessionStats> partial(threads);
  std::vector<std::thread> workers;
  workers.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    const std::uint64_t begin = groups * w / threads;
    const std::uint64_t end = groups * (w + 1) / threads;
    workers.emplace_back([&, w, begin, end] { partial[w] = run_groups(begin, end); });
  }
  for (auto& worker : workers) {
    worker.join();
  }
  SessionStats total;
  for (const auto& s : partial) {
    total += s;
  }
  return total;
}

bool transcript_consistent(const BlockTranscript& t, int n)
{
  const auto size = static_cast<std::size_t>(t.block_size);
  if (t.alice_symbols.size() != size || t.announcements.size() != size || t.bob_symbols.size() != size ||
      t.bob_differences.size() != size) {
    return false;
  }
  bool all_equal = true;
  for (std::size_t i = 0; i < size; ++i) {
    if (mod(t.announcements[i] + t.secret, n) != t.alice_symbols[i]) {
      return false;
    }
    const int d = mod(t.bob_symbols[i] - t.announcements[i], n);
    if (d != t.bob_differences[i]) {
      return false;
    }
    all_equal = all_equal && d == t.bob_differences.front();
  }
  if (all_equal != t.accepted) {
    return false;
  }
  return !t.accepted || (t.bob_guess && *t.bob_guess == t.bob_differences.front());
}

void write_transcript_line(std::ostream& os, const BlockTranscript& t)
{
  os << t.block_size;
  auto list = [&](const std::vector<int>& v) {
    for (int s : v) {
      os << ',' << s;
    }
  };
  list(t.alice_symbols);
  os << ',' << t.secret;
  list(t.announcements);
  list(t.bob_symbols);
  list(t.bob_differences);
  os << ',' << (t.accepted ? 1 : 0) << ',';
  if (t.bob_guess) {
    os << *t.bob_guess;
  }
  os << '\n';
}

} // namespace qad
