#include "fixtures.hpp"

#include <atomic>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

namespace uqsched::fixtures {

using namespace std::chrono;

Timestamp base_time() { return sys_days{year{2019} / 3 / 1} + hours{8}; }

TaskRecord make_record(std::string id, std::string sequence, std::string op, Season season, double predicted,
                       double observed, Timestamp ts) {
  TaskRecord r;
  r.record_id = std::move(id);
  r.sequence_id = std::move(sequence);
  r.operator_id = std::move(op);
  r.season = season;
  r.predicted_s = predicted;
  r.observed_s = observed;
  r.timestamp = ts;
  return r;
}

namespace {

Snapshot layout(std::size_t groups, std::size_t per_group, std::uint64_t seed, double factor, double noise_frac,
                double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> nominal(lo, hi);
  std::normal_distribution<double> unit(0.0, 1.0);
  Snapshot snap;
  snap.created_at = base_time();
  std::size_t id = 0;
  for (std::size_t g = 0; g < groups; ++g) {
    const std::string seq = g % 2 == 0 ? "S1" : "S2";
    const Season season = g % 2 == 0 ? Season::Summer : Season::Winter;
    const std::string op = "OP" + std::to_string(g);
    for (std::size_t i = 0; i < per_group; ++i) {
      const double p = nominal(rng);
      const double o = factor * p + noise_frac * p * unit(rng);
      snap.records.push_back(make_record("r" + std::to_string(id++), seq, op, season, p, o,
                                         base_time() + hours{static_cast<long>(i * groups + g)}));
    }
  }
  return snap;
}

}  // namespace

Snapshot biased_snapshot(const BiasSpec& s) {
  return layout(s.groups, s.per_group, s.seed, s.factor, s.noise_frac, s.predicted_lo, s.predicted_hi);
}

Snapshot identity_snapshot(std::size_t groups, std::size_t per_group, std::uint64_t seed) {
  return layout(groups, per_group, seed, 1.0, 0.0, 30.0, 600.0);
}

Snapshot tight_wide_snapshot(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> nominal(100.0, 200.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Snapshot snap;
  snap.created_at = base_time();
  for (std::size_t i = 0; i < n; ++i) {
    const double pt = nominal(rng);
    snap.records.push_back(make_record("t" + std::to_string(i), "SEQ-T", "tight", Season::Summer, pt,
                                       pt + unit(rng), base_time() + hours{static_cast<long>(2 * i)}));
    const double pw = nominal(rng);
    snap.records.push_back(make_record("w" + std::to_string(i), "SEQ-T", "wide", Season::Summer, pw,
                                       pw + 50.0 * unit(rng), base_time() + hours{static_cast<long>(2 * i + 1)}));
  }
  return snap;
}

Snapshot single_group_snapshot(std::string sequence, std::string op, Season season, std::size_t n,
                               double spread, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> nominal(100.0, 200.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Snapshot snap;
  snap.created_at = base_time();
  for (std::size_t i = 0; i < n; ++i) {
    const double p = nominal(rng);
    snap.records.push_back(make_record("g" + std::to_string(i), sequence, op, season, p, p + spread * unit(rng),
                                       base_time() + hours{static_cast<long>(i)}));
  }
  return snap;
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("uqsched-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot read " + path.string());
  }
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
}

}  // namespace uqsched::fixtures
