#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "tmg/csv.hpp"
#include "tmg/events.hpp"

using namespace tmg;

TEST_CASE("date parsing accepts strict ISO and rejects the rest") {
  auto d = Date::parse_iso("2001-09-11");
  REQUIRE(d.has_value());
  CHECK(d->year() == 2001);
  CHECK(d->month() == 9);
  CHECK(d->day() == 11);
  CHECK(d->to_iso() == "2001-09-11");

  CHECK(Date::parse_iso("2000-02-29").has_value());   // leap year
  CHECK(!Date::parse_iso("2001-02-29").has_value());  // not a leap year
  CHECK(!Date::parse_iso("1900-02-29").has_value());  // century rule
  CHECK(Date::parse_iso("2000-12-31").has_value());
  CHECK(!Date::parse_iso("2000-13-01").has_value());
  CHECK(!Date::parse_iso("2000-00-10").has_value());
  CHECK(!Date::parse_iso("2000-01-32").has_value());
  CHECK(!Date::parse_iso("2000/01/02").has_value());
  CHECK(!Date::parse_iso("2000-1-02").has_value());
  CHECK(!Date::parse_iso("20000102").has_value());
  CHECK(!Date::parse_iso("2000-01-0a").has_value());
  CHECK(!Date::parse_iso("").has_value());
}

TEST_CASE("date arithmetic is consistent with the civil calendar") {
  Date epoch(1970, 1, 1);
  CHECK(epoch.day_number() == 0);
  CHECK(Date(1970, 1, 2).day_number() == 1);
  CHECK(Date(2001, 1, 1).plus_days(58).to_iso() == "2001-02-28");
  CHECK(Date(2001, 1, 1).plus_days(59).to_iso() == "2001-03-01");
  CHECK(Date(2000, 2, 28).plus_days(1).to_iso() == "2000-02-29");
  CHECK(days_inclusive(Date(2001, 1, 1), Date(2001, 1, 1)) == 1);
  CHECK(days_inclusive(Date(2001, 1, 1), Date(2018, 12, 31)) == 6574);
  CHECK(Date(2001, 1, 1) < Date(2001, 1, 2));
  CHECK(Date(2001, 1, 2) == Date(2001, 1, 1).plus_days(1));

  // round trip across a few thousand days, including leap boundaries
  Date d(1999, 12, 31);
  for (int i = 0; i < 1500; ++i) {
    Date n = d.plus_days(1);
    CHECK(n.day_number() == d.day_number() + 1);
    CHECK(Date::parse_iso(n.to_iso()).value() == n);
    d = n;
  }
}

TEST_CASE("string helpers") {
  CHECK(trim("  a b  ") == "a b");
  CHECK(trim("\t\r\n x \r\n") == "x");
  CHECK(trim("") == "");
  CHECK(split("a|b||c", '|') == std::vector<std::string>{"a", "b", "", "c"});
  CHECK(split("", '|') == std::vector<std::string>{""});
}

TEST_CASE("fnv1a64 matches published test vectors") {
  CHECK(fnv1a64("") == 14695981039346656037ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
  CHECK(hex64(fnv1a64("foobar")) == "85944171f73967e8");
  // chaining equals hashing the concatenation
  CHECK(fnv1a64("bar", fnv1a64("foo")) == fnv1a64("foobar"));
}

TEST_CASE("canonical formatting") {
  CHECK(format6(0.0) == "0.000000");
  CHECK(format6(1.0 / 3.0) == "0.333333");
  CHECK(canonical6(1.0 / 3.0) == 0.333333);
  CHECK(canonical6(canonical6(0.7162391)) == canonical6(0.7162391));
  double v = 0.1 + 0.2;  // 0.30000000000000004
  CHECK(std::stod(format_full(v)) == v);
  CHECK(std::stod(format_full(1e-300)) == 1e-300);
}

TEST_CASE("csv reader handles quoting, embedded delimiters and CRLF") {
  std::istringstream in(
      "a,b,c\r\n"
      "1,\"x,y\",2\n"
      "\"multi\nline\",\"he said \"\"hi\"\"\",3\n"
      ",,\n");
  std::vector<std::string> rec;
  REQUIRE(csv::read_record(in, rec));
  CHECK(rec == std::vector<std::string>{"a", "b", "c"});
  REQUIRE(csv::read_record(in, rec));
  CHECK(rec == std::vector<std::string>{"1", "x,y", "2"});
  REQUIRE(csv::read_record(in, rec));
  CHECK(rec == std::vector<std::string>{"multi\nline", "he said \"hi\"", "3"});
  REQUIRE(csv::read_record(in, rec));
  CHECK(rec == std::vector<std::string>{"", "", ""});
  CHECK(!csv::read_record(in, rec));
}

TEST_CASE("csv writer escapes exactly the fields that need it") {
  std::ostringstream out;
  csv::write_record(out, {"plain", "with,comma", "with\"quote", "with\nnewline"});
  CHECK(out.str() ==
        "plain,\"with,comma\",\"with\"\"quote\",\"with\nnewline\"\n");

  // write -> read round trip
  std::istringstream in(out.str());
  std::vector<std::string> rec;
  REQUIRE(csv::read_record(in, rec));
  CHECK(rec == std::vector<std::string>{"plain", "with,comma", "with\"quote",
                                        "with\nnewline"});
}

namespace {

const char* kRawGtd =
    "eventid,iyear,imonth,iday,country_txt,doubtterr,attacktype1_txt,"
    "attacktype2_txt,attacktype3_txt,weaptype1_txt,weaptype2_txt,"
    "weaptype3_txt,weaptype4_txt,targtype1_txt,targtype2_txt,targtype3_txt\n"
    "1,2001,1,1,Afghanistan,0,Bombing/Explosion,,,Explosives,,,,Police,Military,\n"
    "2,2001,1,2,Afghanistan,0,Armed Assault,Bombing/Explosion,,Firearms,"
    "Explosives,,,Private Citizens & Property,,\n"
    "3,2001,1,0,Afghanistan,0,Hijacking,,,Melee,,,,Business,,\n"
    "4,2001,2,30,Afghanistan,0,Armed Assault,,,Firearms,,,,Police,,\n"
    "5,2001,2,3,Iraq,1,Assassination,,,Firearms,,,,Government (General),,\n"
    ",2001,3,4,Iraq,0,Armed Assault,,,.,,,,Police,,\n";

}  // namespace

TEST_CASE("gtd parsing: dates, policies, doubt flag, category slots") {
  std::istringstream in(kRawGtd);
  GtdParseResult r = parse_events(in, GtdSchemaMap{});
  CHECK(r.rows_read == 6);
  REQUIRE(r.events.size() == 4);  // row 3 dropped (day 0), row 4 invalid date
  REQUIRE(r.warnings.size() == 2);
  CHECK(r.warnings[0].find("unknown month/day") != std::string::npos);
  CHECK(r.warnings[1].find("invalid date") != std::string::npos);

  const EventRecord& e1 = r.events[0];
  CHECK(e1.event_id == "1");
  CHECK(e1.date == Date(2001, 1, 1));
  CHECK(e1.targets == std::vector<std::string>{"Police", "Military"});
  CHECK(!e1.doubt);

  const EventRecord& e2 = r.events[1];
  CHECK(e2.tactics ==
        std::vector<std::string>{"Armed Assault", "Bombing/Explosion"});

  CHECK(r.events[2].doubt);          // doubtterr == "1"
  CHECK(r.events[3].event_id == "row7");  // blank id falls back to file row
  CHECK(r.events[3].weapons.empty());     // "." cells are dropped

  // clamp policy keeps the unknown-day row at the first of the month
  std::istringstream in2(kRawGtd);
  GtdParseResult rc =
      parse_events(in2, GtdSchemaMap{}, UnknownDatePolicy::ClampToFirstOfMonth);
  REQUIRE(rc.events.size() == 5);
  CHECK(rc.events[2].date == Date(2001, 1, 1));
  CHECK(rc.warnings[0].find("clamped") != std::string::npos);
}

TEST_CASE("gtd parsing: schema errors and empty input") {
  std::istringstream empty("");
  CHECK_THROWS_AS(parse_events(empty, GtdSchemaMap{}), DataError);

  std::istringstream missing("eventid,iyear,imonth,iday,country_txt\n");
  CHECK_THROWS_AS(parse_events(missing, GtdSchemaMap{}), DataError);

  // optional higher slots may be absent entirely
  std::istringstream minimal(
      "eventid,iyear,imonth,iday,country_txt,doubtterr,attacktype1_txt,"
      "weaptype1_txt,targtype1_txt\n"
      "9,2002,5,6,Iraq,0,Armed Assault,Firearms,Police\n");
  GtdParseResult r = parse_events(minimal, GtdSchemaMap{});
  REQUIRE(r.events.size() == 1);
  CHECK(r.events[0].tactics == std::vector<std::string>{"Armed Assault"});
}

TEST_CASE("canonical event csv round trip") {
  std::vector<EventRecord> events;
  EventRecord a;
  a.event_id = "e1";
  a.date = Date(2010, 3, 4);
  a.country = "Testland";
  a.doubt = false;
  a.tactics = {"Bombing/Explosion"};
  a.weapons = {"Explosives"};
  a.targets = {"Police", "Private Citizens & Property"};
  EventRecord b;
  b.event_id = "e2";
  b.date = Date(2010, 3, 5);
  b.country = "Other, Land";  // comma forces quoting
  b.doubt = true;
  b.tactics = {"Armed Assault", "Hostage Taking (Kidnapping)"};
  b.weapons = {"Firearms"};
  b.targets = {"Military"};
  events = {a, b};

  std::ostringstream out;
  write_events(out, events);
  std::istringstream in(out.str());
  auto back = read_events(in);
  REQUIRE(back.size() == 2);
  CHECK(back[0].event_id == a.event_id);
  CHECK(back[0].date == a.date);
  CHECK(back[0].targets == a.targets);
  CHECK(back[1].country == b.country);
  CHECK(back[1].doubt);
  CHECK(back[1].tactics == b.tactics);
}

TEST_CASE("canonical event csv rejects malformed rows with row numbers") {
  std::istringstream bad_header("event_id,date,country\n");
  CHECK_THROWS_AS(read_events(bad_header), DataError);

  std::istringstream bad_date(
      "event_id,date,country,doubt,tactics,weapons,targets\n"
      "e1,2010-13-01,X,0,a,b,c\n");
  CHECK_THROWS_WITH_AS(read_events(bad_date),
                       doctest::Contains("row 2"), DataError);

  std::istringstream bad_doubt(
      "event_id,date,country,doubt,tactics,weapons,targets\n"
      "e1,2010-01-01,X,maybe,a,b,c\n");
  CHECK_THROWS_AS(read_events(bad_doubt), DataError);
}

TEST_CASE("filtering applies country, window and doubt, then sorts") {
  std::vector<EventRecord> events;
  auto mk = [](const char* id, Date d, const char* country, bool doubt) {
    EventRecord e;
    e.event_id = id;
    e.date = d;
    e.country = country;
    e.doubt = doubt;
    e.tactics = {"t"};
    e.weapons = {"w"};
    e.targets = {"y"};
    return e;
  };
  events.push_back(mk("b", Date(2005, 1, 2), "A", false));
  events.push_back(mk("a", Date(2005, 1, 2), "A", false));  // same day, id ties
  events.push_back(mk("c", Date(2004, 12, 31), "A", false));
  events.push_back(mk("d", Date(2005, 1, 3), "B", false));  // other country
  events.push_back(mk("e", Date(2005, 1, 4), "A", true));   // doubted
  events.push_back(mk("f", Date(2006, 1, 1), "A", false));  // after window

  IngestConfig cfg;
  cfg.country = "A";
  cfg.start = Date(2005, 1, 1);
  cfg.end = Date(2005, 12, 31);
  cfg.drop_doubt = true;
  auto got = filter_events(events, cfg);
  REQUIRE(got.size() == 2);
  CHECK(got[0].event_id == "a");  // date ties break on event id
  CHECK(got[1].event_id == "b");

  cfg.drop_doubt = false;
  got = filter_events(events, cfg);
  REQUIRE(got.size() == 3);
  CHECK(got[2].event_id == "e");

  cfg.country.clear();
  got = filter_events(events, cfg);
  CHECK(got.size() == 4);  // both countries, doubt kept
}
