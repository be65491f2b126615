#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "uqsched/errors.hpp"
#include "uqsched/ingest.hpp"

namespace uqsched {
namespace {

const std::string kHeader = std::string(kCsvHeader) + "\n";

Snapshot parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse_csv(in, fixtures::base_time());
}

TEST(ParseCsv, OneValidRow) {
  const Snapshot s = parse_text(kHeader + "r1,S,O,summer,3,100,120,2019-07-01T08:30:00Z\n");
  ASSERT_EQ(s.records.size(), 1u);
  EXPECT_TRUE(s.rejects.empty());
  const TaskRecord& r = s.records[0];
  EXPECT_EQ(r.record_id, "r1");
  EXPECT_EQ(r.season, Season::Summer);
  EXPECT_EQ(r.skill, 3);
  EXPECT_EQ(r.predicted_s, 100.0);
  EXPECT_EQ(r.observed_s, 120.0);
  EXPECT_EQ(format_timestamp(r.timestamp), "2019-07-01T08:30:00Z");
}

TEST(ParseCsv, NegativeObservedRejected) {
  const Snapshot s = parse_text(kHeader + "r1,S,O,summer,3,100,-5,2019-07-01T08:30:00Z\n");
  EXPECT_TRUE(s.records.empty());
  ASSERT_EQ(s.rejects.size(), 1u);
  EXPECT_EQ(s.rejects[0], (Reject{2, "non-positive duration"}));
}

TEST(ParseCsv, FixtureThreeValidOneMalformed) {
  const Snapshot s = parse_csv_file(UQSCHED_FIXTURE_DIR "/three_valid_one_bad.csv", fixtures::base_time());
  EXPECT_EQ(s.records.size(), 3u);
  ASSERT_EQ(s.rejects.size(), 1u);
  EXPECT_EQ(s.rejects[0], (Reject{4, "bad number"}));
  // empty season cell falls back to the timestamp month (January)
  EXPECT_EQ(s.records[2].season, Season::Winter);
  EXPECT_FALSE(s.records[1].skill.has_value());
}

TEST(ParseCsv, RejectReasons) {
  const std::string body = kHeader +
                           "a,S,O,summer,1,10,10,2019-07-01T08:30:00Z\n"
                           "a,S,O,summer,1,10,10,2019-07-01T08:30:00Z\n"
                           "b,S,O,monsoon,1,10,10,2019-07-01T08:30:00Z\n"
                           "c,S,O,summer,x,10,10,2019-07-01T08:30:00Z\n"
                           "d,S,O,summer,11,10,10,2019-07-01T08:30:00Z\n"
                           "e,S,O,summer,1,0,10,2019-07-01T08:30:00Z\n"
                           "f,S,O,summer,1,10,10,yesterday\n"
                           "g,S,O,summer,1,10\n"
                           ",S,O,summer,1,10,10,2019-07-01T08:30:00Z\n"
                           "h,\"S,O,summer,1,10,10,2019-07-01T08:30:00Z\n"
                           "i,S,O,summer,1,nan,10,2019-07-01T08:30:00Z\n";
  const Snapshot s = parse_text(body);
  EXPECT_EQ(s.records.size(), 1u);
  const std::vector<Reject> expected{{3, "duplicate record_id"},   {4, "unknown season"},
                                     {5, "bad skill"},             {6, "skill out of range"},
                                     {7, "non-positive duration"}, {8, "bad timestamp"},
                                     {9, "wrong field count"},     {10, "empty identifier"},
                                     {11, "malformed quoting"},    {12, "bad number"}};
  EXPECT_EQ(s.rejects, expected);
}

TEST(ParseCsv, RecordsPlusRejectsEqualsRows) {
  const Snapshot s = parse_csv_file(UQSCHED_FIXTURE_DIR "/three_valid_one_bad.csv", fixtures::base_time());
  EXPECT_EQ(s.records.size() + s.rejects.size(), 4u);
}

TEST(ParseCsv, HeaderOnlyGivesEmptySnapshot) {
  const Snapshot s = parse_text(kHeader);
  EXPECT_TRUE(s.records.empty());
  EXPECT_TRUE(s.rejects.empty());
}

TEST(ParseCsv, BomCrlfAndQuotedFields) {
  const Snapshot s = parse_text("\xEF\xBB\xBF" + std::string(kCsvHeader) +
                                "\r\n\"r,1\",\"S \"\"x\"\"\",O,autumn,,1.5e2,151,2019-10-01T00:00:00Z\r\n\r\n");
  ASSERT_EQ(s.records.size(), 1u);
  EXPECT_EQ(s.records[0].record_id, "r,1");
  EXPECT_EQ(s.records[0].sequence_id, "S \"x\"");
  EXPECT_EQ(s.records[0].predicted_s, 150.0);
}

TEST(ParseCsv, BadHeaderIsFatal) {
  EXPECT_THROW(parse_text(""), FormatError);
  EXPECT_THROW(parse_text("id,seq\n1,2\n"), FormatError);
}

TEST(ParseCsv, MissingFileIsIoError) {
  EXPECT_THROW(parse_csv_file("/nonexistent/uqsched.csv", fixtures::base_time()), IoError);
}

TEST(ParseCsv, WriteThenReparseIsIdentity) {
  Snapshot s = parse_csv_file(UQSCHED_FIXTURE_DIR "/ten_records.csv", fixtures::base_time());
  s.records.push_back(fixtures::make_record("q,\"1\"", "S", "O", Season::Spring, 0.1 + 0.2, 1.0 / 3.0,
                                            fixtures::base_time()));
  std::ostringstream out;
  write_csv(s, out);
  std::istringstream in(out.str());
  const Snapshot again = parse_csv(in, s.created_at);
  EXPECT_EQ(again.records, s.records);
  EXPECT_TRUE(again.rejects.empty());
}

TEST(Timestamps, StrictFormat) {
  EXPECT_TRUE(parse_timestamp("2019-03-01T08:30:00Z").has_value());
  EXPECT_FALSE(parse_timestamp("2019-03-01 08:30:00").has_value());
  EXPECT_FALSE(parse_timestamp("2019-02-30T08:30:00Z").has_value());
  EXPECT_FALSE(parse_timestamp("2019-03-01T25:30:00Z").has_value());
  EXPECT_EQ(format_timestamp(*parse_timestamp("2020-12-31T23:59:59Z")), "2020-12-31T23:59:59Z");
}

TEST(Seasons, MonthMapping) {
  EXPECT_EQ(season_of_month(12), Season::Winter);
  EXPECT_EQ(season_of_month(1), Season::Winter);
  EXPECT_EQ(season_of_month(2), Season::Winter);
  EXPECT_EQ(season_of_month(3), Season::Spring);
  EXPECT_EQ(season_of_month(6), Season::Summer);
  EXPECT_EQ(season_of_month(9), Season::Autumn);
  EXPECT_EQ(season_of_month(11), Season::Autumn);
  EXPECT_EQ(parse_season("autumn"), Season::Autumn);
  EXPECT_FALSE(parse_season("fall").has_value());
}

TEST(ComputeError, SignConvention) {
  const auto rec = [](double p, double o) {
    return fixtures::make_record("r", "S", "O", Season::Summer, p, o, fixtures::base_time());
  };
  EXPECT_EQ(compute_error(rec(100, 120)).error_s, 20.0);
  EXPECT_EQ(compute_error(rec(100, 100)).error_s, 0.0);
  EXPECT_EQ(compute_error(rec(120, 100)).error_s, -20.0);
}

TEST(ComputeError, ReconstructsObservedWithinFactorTwo) {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> pred(1.0, 1e5);
  std::uniform_real_distribution<double> ratio(0.5, 2.0);
  for (int i = 0; i < 10000; ++i) {
    const double p = pred(rng);
    const double o = p * ratio(rng);
    const ErrorSample e =
        compute_error(fixtures::make_record("r", "S", "O", Season::Summer, p, o, fixtures::base_time()));
    ASSERT_EQ(e.error_s + p, o);
    ASSERT_EQ(e.nominal_s, p);
  }
}

TEST(GroupErrors, SingleRecord) {
  Snapshot s;
  s.records.push_back(fixtures::make_record("r", "S", "O", Season::Summer, 1, 2, fixtures::base_time()));
  const auto g = group_errors(s);
  ASSERT_EQ(g.size(), 1u);
  EXPECT_EQ(g.begin()->second, std::vector<double>{1.0});
}

TEST(GroupErrors, SeasonsSplit) {
  Snapshot s;
  s.records.push_back(fixtures::make_record("r1", "S", "O", Season::Summer, 1, 2, fixtures::base_time()));
  s.records.push_back(fixtures::make_record("r2", "S", "O", Season::Winter, 1, 2, fixtures::base_time()));
  EXPECT_EQ(group_errors(s).size(), 2u);
}

TEST(GroupErrors, TenRecordFixtureMatchesHandCount) {
  const Snapshot s = parse_csv_file(UQSCHED_FIXTURE_DIR "/ten_records.csv", fixtures::base_time());
  ASSERT_EQ(s.records.size(), 10u);
  const auto g = group_errors(s);
  const std::map<std::string, std::size_t> expected{
      {"SEQ-1/alice/summer", 1}, {"SEQ-1/alice/winter", 2}, {"SEQ-1/bob/winter", 3},
      {"SEQ-2/bob/spring", 1},   {"SEQ-2/carol/autumn", 1}, {"SEQ-2/carol/spring", 2}};
  std::map<std::string, std::size_t> got;
  std::size_t total = 0;
  for (const auto& [k, v] : g) {
    got[to_string(k)] = v.size();
    total += v.size();
  }
  EXPECT_EQ(got, expected);
  EXPECT_EQ(total, s.records.size());
  const auto alice_winter = g.at(GroupKey{"SEQ-1", "alice", Season::Winter});
  EXPECT_EQ(alice_winter, (std::vector<double>{10.0, -5.0}));
}

TEST(GroupErrors, ChronologicalWithinGroup) {
  Snapshot s;
  const auto t = fixtures::base_time();
  s.records.push_back(fixtures::make_record("late", "S", "O", Season::Summer, 1, 4, t + std::chrono::hours{2}));
  s.records.push_back(fixtures::make_record("early", "S", "O", Season::Summer, 1, 2, t));
  s.records.push_back(fixtures::make_record("b", "S", "O", Season::Summer, 1, 3, t + std::chrono::hours{1}));
  s.records.push_back(fixtures::make_record("a", "S", "O", Season::Summer, 1, 5, t + std::chrono::hours{1}));
  EXPECT_EQ(group_errors(s).begin()->second, (std::vector<double>{1.0, 4.0, 2.0, 3.0}));
}

TEST(Snapshot, SaveLoadRoundTrip) {
  fixtures::TempDir dir("snap");
  const Snapshot s = parse_csv_file(UQSCHED_FIXTURE_DIR "/three_valid_one_bad.csv", fixtures::base_time());
  save_snapshot(s, dir / "s.json");
  EXPECT_EQ(load_snapshot(dir / "s.json"), s);
}

TEST(Snapshot, SchemaMismatchAndCorruption) {
  fixtures::TempDir dir("snapbad");
  const Snapshot s = parse_csv_file(UQSCHED_FIXTURE_DIR "/ten_records.csv", fixtures::base_time());
  save_snapshot(s, dir / "s.json");
  std::string text = fixtures::read_file(dir / "s.json");

  std::string bumped = text;
  const auto pos = bumped.find("\"schema_version\": 1");
  ASSERT_NE(pos, std::string::npos);
  bumped.replace(pos, 19, "\"schema_version\": 999");
  fixtures::write_file(dir / "v.json", bumped);
  EXPECT_THROW(load_snapshot(dir / "v.json"), SchemaError);

  fixtures::write_file(dir / "t.json", text.substr(0, text.size() / 2));
  EXPECT_THROW(load_snapshot(dir / "t.json"), FormatError);

  EXPECT_THROW(load_snapshot(dir / "missing.json"), IoError);
}

}  // namespace
}  // namespace uqsched
