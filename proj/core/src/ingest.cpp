#include "uqsched/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <variant>
#include <cstdio>

#include "uqsched/errors.hpp"
#include "uqsched/serialization.hpp"

namespace uqsched {

std::string_view to_string(Season season) noexcept {
  switch (season) {
    case Season::Winter:
      return "winter";
    case Season::Spring:
      return "spring";
    case Season::Summer:
      return "summer";
    case Season::Autumn:
      return "autumn";
  }
  return "winter";
}

std::optional<Season> parse_season(std::string_view text) noexcept {
  for (Season s : {Season::Winter, Season::Spring, Season::Summer, Season::Autumn}) {
    if (text == to_string(s)) {
      return s;
    }
  }
  return std::nullopt;
}

Season season_of_month(unsigned month) noexcept {
  switch (month) {
    case 3:
    case 4:
    case 5:
      return Season::Spring;
    case 6:
    case 7:
    case 8:
      return Season::Summer;
    case 9:
    case 10:
    case 11:
      return Season::Autumn;
    default:
      return Season::Winter;
  }
}

namespace {

bool read_digits(std::string_view text, std::size_t pos, std::size_t len, int& out) {
  int value = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (text[i] < '0' || text[i] > '9') {
      return false;
    }
    value = value * 10 + (text[i] - '0');
  }
  out = value;
  return true;
}

}  // namespace

std::optional<Timestamp> parse_timestamp(std::string_view text) noexcept {
  // YYYY-MM-DDTHH:MM:SSZ
  if (text.size() != 20 || text[4] != '-' || text[7] != '-' || text[10] != 'T' ||
      text[13] != ':' || text[16] != ':' || text[19] != 'Z') {
    return std::nullopt;
  }
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (!read_digits(text, 0, 4, y) || !read_digits(text, 5, 2, mo) || !read_digits(text, 8, 2, d) ||
      !read_digits(text, 11, 2, h) || !read_digits(text, 14, 2, mi) || !read_digits(text, 17, 2, s)) {
    return std::nullopt;
  }
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59) {
    return std::nullopt;
  }
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

std::string format_timestamp(Timestamp ts) {
  using namespace std::chrono;
  const auto day_point = floor<days>(ts);
  const year_month_day ymd{day_point};
  const hh_mm_ss hms{ts - day_point};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

bool operator<(const GroupKey& a, const GroupKey& b) noexcept {
  if (a.sequence_id != b.sequence_id) {
    return a.sequence_id < b.sequence_id;
  }
  if (a.operator_id != b.operator_id) {
    return a.operator_id < b.operator_id;
  }
  return to_string(a.season) < to_string(b.season);
}

std::string to_string(const GroupKey& key) {
  return key.sequence_id + "/" + key.operator_id + "/" + std::string(to_string(key.season));
}

namespace {

// Splits one CSV line. Double quotes delimit fields that contain commas; a
// doubled quote inside a quoted field is a literal quote.
std::optional<std::vector<std::string>> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  bool field_started_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"' && cur.empty() && !field_started_quoted) {
      quoted = true;
      field_started_quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
      field_started_quoted = false;
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) {
    return std::nullopt;
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::optional<double> parse_number(std::string_view text) {
  if (text.empty()) {
    return std::nullopt;
  }
  if (text.front() == '+') {
    text.remove_prefix(1);
  }
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"") == std::string::npos) {
    return field;
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') {
      out += "\"\"";
    } else {
      out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

// Converts one split row into a record, or returns the reject reason.
std::variant<TaskRecord, std::string> parse_row(const std::vector<std::string>& f) {
  if (f.size() != 8) {
    return std::string("wrong field count");
  }
  TaskRecord r;
  r.record_id = f[0];
  r.sequence_id = f[1];
  r.operator_id = f[2];

  const auto ts = parse_timestamp(f[7]);
  if (!ts) {
    return std::string("bad timestamp");
  }
  r.timestamp = *ts;

  if (f[3].empty()) {
    const std::chrono::year_month_day ymd{std::chrono::floor<std::chrono::days>(*ts)};
    r.season = season_of_month(static_cast<unsigned>(ymd.month()));
  } else if (auto s = parse_season(f[3])) {
    r.season = *s;
  } else {
    return std::string("unknown season");
  }

  if (!f[4].empty()) {
    int skill = 0;
    const auto [ptr, ec] = std::from_chars(f[4].data(), f[4].data() + f[4].size(), skill);
    if (ec != std::errc{} || ptr != f[4].data() + f[4].size()) {
      return std::string("bad skill");
    }
    r.skill = skill;
  }

  const auto predicted = parse_number(f[5]);
  const auto observed = parse_number(f[6]);
  if (!predicted || !observed) {
    return std::string("bad number");
  }
  r.predicted_s = *predicted;
  r.observed_s = *observed;

  if (auto problem = record_problem(r)) {
    return *problem;
  }
  return r;
}

}  // namespace

std::optional<std::string> record_problem(const TaskRecord& r) {
  if (r.record_id.empty() || r.sequence_id.empty() || r.operator_id.empty()) {
    return "empty identifier";
  }
  if (r.skill && (*r.skill < 0 || *r.skill > 10)) {
    return "skill out of range";
  }
  if (!std::isfinite(r.predicted_s) || !std::isfinite(r.observed_s)) {
    return "bad number";
  }
  if (!(r.predicted_s > 0.0) || !(r.observed_s > 0.0)) {
    return "non-positive duration";
  }
  return std::nullopt;
}

Snapshot parse_csv(std::istream& in, Timestamp created_at) {
  Snapshot snap;
  snap.created_at = created_at;

  std::string line;
  if (!std::getline(in, line)) {
    throw FormatError("missing CSV header");
  }
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) {
    line.erase(0, 3);
  }
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  if (line != kCsvHeader) {
    throw FormatError("invalid CSV header: expected '" + std::string(kCsvHeader) + "'");
  }

  std::set<std::string> seen_ids;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.find_first_not_of(" \t") == std::string::npos) {
      continue;
    }
    const auto fields = split_csv_line(line);
    if (!fields) {
      snap.rejects.push_back({line_no, "malformed quoting"});
      continue;
    }
    auto parsed = parse_row(*fields);
    if (auto* reason = std::get_if<std::string>(&parsed)) {
      snap.rejects.push_back({line_no, std::move(*reason)});
      continue;
    }
    auto& record = std::get<TaskRecord>(parsed);
    if (!seen_ids.insert(record.record_id).second) {
      snap.rejects.push_back({line_no, "duplicate record_id"});
      continue;
    }
    snap.records.push_back(std::move(record));
  }
  if (in.bad()) {
    throw IoError("read failure while parsing CSV");
  }
  return snap;
}

Snapshot parse_csv_file(const std::filesystem::path& path, Timestamp created_at) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  return parse_csv(in, created_at);
}

void write_csv(const Snapshot& snapshot, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const auto& r : snapshot.records) {
    out << csv_escape(r.record_id) << ',' << csv_escape(r.sequence_id) << ','
        << csv_escape(r.operator_id) << ',' << to_string(r.season) << ','
        << (r.skill ? std::to_string(*r.skill) : std::string()) << ','
        << format_number(r.predicted_s) << ',' << format_number(r.observed_s) << ','
        << format_timestamp(r.timestamp) << '\n';
  }
}

ErrorSample compute_error(const TaskRecord& record) {
  return ErrorSample{
      GroupKey{record.sequence_id, record.operator_id, record.season},
      record.record_id,
      record.observed_s - record.predicted_s,
      record.predicted_s,
      record.observed_s,
      record.timestamp,
  };
}

std::map<GroupKey, std::vector<ErrorSample>> group_error_samples(const Snapshot& snapshot) {
  std::map<GroupKey, std::vector<ErrorSample>> groups;
  for (const auto& r : snapshot.records) {
    ErrorSample e = compute_error(r);
    groups[e.group].push_back(std::move(e));
  }
  for (auto& [key, samples] : groups) {
    std::sort(samples.begin(), samples.end(), [](const ErrorSample& a, const ErrorSample& b) {
      if (a.timestamp != b.timestamp) {
        return a.timestamp < b.timestamp;
      }
      return a.record_id < b.record_id;
    });
  }
  return groups;
}

std::map<GroupKey, std::vector<double>> group_errors(const Snapshot& snapshot) {
  std::map<GroupKey, std::vector<double>> out;
  for (const auto& [key, samples] : group_error_samples(snapshot)) {
    auto& values = out[key];
    values.reserve(samples.size());
    for (const auto& s : samples) {
      values.push_back(s.error_s);
    }
  }
  return out;
}

void save_snapshot(const Snapshot& snapshot, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out << to_json(snapshot).dump(2) << '\n';
  if (!out) {
    throw IoError("write failure on " + path.string());
  }
}

Snapshot load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(buffer.str());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("corrupt snapshot file " + path.string() + ": " + e.what());
  }
  return snapshot_from_json(doc);
}

}  // namespace uqsched
