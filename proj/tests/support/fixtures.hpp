// Synthetic log generators shared by unit tests, the acceptance suite and
// the benchmarks. Every generator is seeded and deterministic.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "uqsched/ingest.hpp"

namespace uqsched::fixtures {

Timestamp base_time();

TaskRecord make_record(std::string id, std::string sequence, std::string op, Season season, double predicted,
                       double observed, Timestamp ts);

struct BiasSpec {
  std::size_t groups = 4;
  std::size_t per_group = 50;
  double factor = 1.2;       // observed mean = factor * predicted
  double noise_frac = 0.02;  // noise std as a fraction of predicted
  double predicted_lo = 30.0;
  double predicted_hi = 600.0;
  std::uint64_t seed = 20190301;
};

// Groups are spread over two sequences (S1 summer, S2 winter) with operators
// OP0, OP1, ...; predicted durations are uniform on [lo, hi].
Snapshot biased_snapshot(const BiasSpec& spec);

// Same layout as biased_snapshot with observed == predicted.
Snapshot identity_snapshot(std::size_t groups, std::size_t per_group, std::uint64_t seed);

// Sequence SEQ-T in summer with two operators of `n` records each: "tight"
// errors uniform on [-1, 1], "wide" errors uniform on [-50, 50].
Snapshot tight_wide_snapshot(std::size_t n = 30, std::uint64_t seed = 7);

// One group of `n` records with errors drawn uniform on [-spread, spread].
Snapshot single_group_snapshot(std::string sequence, std::string op, Season season, std::size_t n,
                               double spread, std::uint64_t seed);

// Directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace uqsched::fixtures
