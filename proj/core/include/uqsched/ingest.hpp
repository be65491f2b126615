#ifndef UQSCHED_INGEST_HPP
#define UQSCHED_INGEST_HPP

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace uqsched {

enum class Season { Winter, Spring, Summer, Autumn };

std::string_view to_string(Season season) noexcept;
std::optional<Season> parse_season(std::string_view text) noexcept;

/// Northern-hemisphere meteorological season of a calendar month (1-12).
Season season_of_month(unsigned month) noexcept;

using Timestamp = std::chrono::sys_seconds;

/// Strict ISO-8601 UTC, `YYYY-MM-DDTHH:MM:SSZ`.
std::optional<Timestamp> parse_timestamp(std::string_view text) noexcept;
std::string format_timestamp(Timestamp ts);

struct TaskRecord {
  std::string record_id;
  std::string sequence_id;
  std::string operator_id;
  Season season = Season::Winter;
  std::optional<int> skill;  // 0-10 grade, carried but unused by the math
  double predicted_s = 0.0;
  double observed_s = 0.0;
  Timestamp timestamp{};

  friend bool operator==(const TaskRecord&, const TaskRecord&) = default;
};

/// (sequence, operator, season). Ordered lexicographically on the textual
/// components, season by name.
struct GroupKey {
  std::string sequence_id;
  std::string operator_id;
  Season season = Season::Winter;

  friend bool operator==(const GroupKey&, const GroupKey&) = default;
  friend bool operator<(const GroupKey& a, const GroupKey& b) noexcept;
};

std::string to_string(const GroupKey& key);

/// Signed duration error of one record: observed - predicted (positive = late).
struct ErrorSample {
  GroupKey group;
  std::string record_id;
  double error_s = 0.0;
  double nominal_s = 0.0;   // predicted_s of the source record
  double observed_s = 0.0;
  Timestamp timestamp{};
};

struct Reject {
  std::size_t line = 0;
  std::string reason;

  friend bool operator==(const Reject&, const Reject&) = default;
};

inline constexpr int kSnapshotSchemaVersion = 1;

inline constexpr std::string_view kCsvHeader =
    "record_id,sequence_id,operator_id,season,skill,predicted_s,observed_s,timestamp";

/// Validated log rows plus the rows that were turned away. Treated as an
/// immutable value once built.
struct Snapshot {
  int schema_version = kSnapshotSchemaVersion;
  std::vector<TaskRecord> records;
  std::vector<Reject> rejects;
  Timestamp created_at{};

  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

/// Parses the execution-log CSV. Bad rows land in `rejects` with their 1-based
/// line number; only a missing or wrong header is fatal (FormatError).
Snapshot parse_csv(std::istream& in, Timestamp created_at);

/// Opens and parses a CSV file. Throws IoError if it cannot be read.
Snapshot parse_csv_file(const std::filesystem::path& path, Timestamp created_at);

/// Writes records back in the input schema (rejects are not emitted).
void write_csv(const Snapshot& snapshot, std::ostream& out);

/// Reason a record violates the row invariants, or nullopt if it is valid.
/// Uniqueness of record_id is a snapshot-level check and not covered here.
std::optional<std::string> record_problem(const TaskRecord& record);

ErrorSample compute_error(const TaskRecord& record);

/// Error samples per group, each list in chronological order (ties by record_id).
std::map<GroupKey, std::vector<ErrorSample>> group_error_samples(const Snapshot& snapshot);

/// Same partition with bare error values.
std::map<GroupKey, std::vector<double>> group_errors(const Snapshot& snapshot);

void save_snapshot(const Snapshot& snapshot, const std::filesystem::path& path);

/// Throws IoError, FormatError (corrupt/truncated) or SchemaError (version).
Snapshot load_snapshot(const std::filesystem::path& path);

}  // namespace uqsched

#endif  // UQSCHED_INGEST_HPP
