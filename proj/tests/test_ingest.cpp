#include <doctest.h>

#include "muselet/error.hpp"
#include "muselet/ingest.hpp"
#include "muselet/zip.hpp"
#include "support.hpp"

using namespace muselet;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::Io;
}

// Sum of durations plus gaps between consecutive non-overlapping events.
bool covers_measure(const Measure& m) {
  Fraction end{0};
  for (const NoteEvent& e : m.events) {
    if (e.onset < end) return false;
    end = e.onset + e.duration;
  }
  return end == Fraction(1);
}

}  // namespace

TEST_CASE("C major scale fixture") {
  const Score s = load_score(testing::fixture("cmaj_scale.xml"));
  CHECK(s.title == "C major scale");
  REQUIRE(s.parts.size() == 1);
  REQUIRE(s.measures[0].size() == 2);
  for (const Measure& m : s.measures[0]) {
    REQUIRE(m.events.size() == 8);
    CHECK(m.divisions == 2);
    for (std::size_t i = 0; i < 8; ++i) {
      const NoteEvent& e = m.events[i];
      CHECK_FALSE(e.is_rest());
      CHECK(e.alter == 0);
      CHECK(e.onset == Fraction(static_cast<std::int64_t>(i), 8));
      CHECK(e.duration == Fraction(1, 8));
    }
    CHECK(covers_measure(m));
  }
  CHECK(s.measures[0][0].index == 1);
  CHECK(s.measures[0][1].index == 2);
  CHECK(s.measures[0][0].events[0].step == Step::C);
  CHECK(s.measures[0][0].events[0].octave == 4);
  CHECK(s.measures[0][0].events[7].octave == 5);
  CHECK(s.measures[0][1].events[7].step == Step::C);
}

TEST_CASE("whole-measure rest spans the measure") {
  const Score s = load_score(testing::fixture("one_rest.xml"));
  REQUIRE(s.measures[0].size() == 1);
  const Measure& m = s.measures[0][0];
  REQUIRE(m.events.size() == 1);
  CHECK(m.events[0].is_rest());
  CHECK(m.events[0].onset == Fraction(0));
  CHECK(m.events[0].duration == Fraction(1));
}

TEST_CASE("mxl container loads the same score as the bare xml") {
  Score zipped = load_score(testing::fixture("cmaj_scale.mxl"));
  Score plain = load_score(testing::fixture("cmaj_scale.xml"));
  CHECK(zipped.source_path != plain.source_path);
  zipped.source_path = plain.source_path;
  CHECK(zipped == plain);
}

TEST_CASE("loading twice is deterministic") {
  CHECK(load_score(testing::fixture("china1.xml")) == load_score(testing::fixture("china1.xml")));
}

TEST_CASE("load errors") {
  CHECK(code_of([] { load_score(testing::fixture("does_not_exist.xml")); }) == ErrorCode::FileNotFound);
  CHECK(code_of([] { load_score(testing::fixture("no_container.mxl")); }) == ErrorCode::MalformedContainer);
  CHECK(code_of([] { load_score(testing::fixture("corrupt.xml")); }) == ErrorCode::MalformedXml);
  CHECK(code_of([] { load_score(testing::fixture("timewise.xml")); }) == ErrorCode::UnsupportedFormat);
  CHECK(code_of([] { load_score(testing::fixture("make_fixtures.py")); }) == ErrorCode::UnsupportedFormat);
  CHECK(code_of([] { parse_musicxml("<opus/>"); }) == ErrorCode::MalformedXml);
  CHECK(code_of([] { parse_musicxml("<score-partwise/>"); }) == ErrorCode::MalformedXml);
}

TEST_CASE("corrupt zip is a container error") {
  const auto dir = testing::scratch_dir("badzip");
  testing::write_file(dir / "x.mxl", "PK\x03\x04 this is not really a zip");
  CHECK(code_of([&] { load_score(dir / "x.mxl"); }) == ErrorCode::MalformedContainer);
}

TEST_CASE("zip reader lists entries and inflates") {
  const std::string archive = testing::slurp(testing::fixture("cmaj_scale.mxl"));
  const auto names = zip::list_entries(archive);
  REQUIRE(names.size() == 3);
  CHECK(names[0] == "mimetype");
  CHECK(zip::read_entry(archive, "mimetype") == std::optional<std::string>("application/vnd.recordare.musicxml"));
  CHECK(zip::read_entry(archive, "score/cmaj_scale.xml") == testing::slurp(testing::fixture("cmaj_scale.xml")));
  CHECK_FALSE(zip::read_entry(archive, "nope").has_value());
}

TEST_CASE("backup and forward move the cursor") {
  const std::string xml = R"(<score-partwise><part-list/><part id="P1"><measure number="1">
    <attributes><divisions>1</divisions></attributes>
    <note><pitch><step>C</step><octave>4</octave></pitch><duration>4</duration></note>
    <backup><duration>4</duration></backup>
    <forward><duration>2</duration></forward>
    <note><pitch><step>E</step><octave>4</octave></pitch><duration>2</duration></note>
  </measure></part></score-partwise>)";
  const Score s = parse_musicxml(xml);
  const auto& ev = s.measures[0][0].events;
  REQUIRE(ev.size() == 2);
  CHECK(ev[0].step == Step::C);
  CHECK(ev[0].duration == Fraction(1));
  CHECK(ev[1].step == Step::E);
  CHECK(ev[1].onset == Fraction(1, 2));
}

TEST_CASE("grace notes dropped, cue notes take time, overlong notes clipped") {
  const std::string xml = R"(<score-partwise><part-list/><part id="P1"><measure number="1">
    <attributes><divisions>1</divisions><time><beats>3</beats><beat-type>4</beat-type></time></attributes>
    <note><grace/><pitch><step>D</step><octave>4</octave></pitch></note>
    <note><cue/><pitch><step>F</step><octave>4</octave></pitch><duration>1</duration></note>
    <note><pitch><step>G</step><alter>1</alter><octave>4</octave></pitch><duration>4</duration></note>
  </measure></part></score-partwise>)";
  const Score parsed = parse_musicxml(xml);
  const auto& ev = parsed.measures[0][0].events;
  REQUIRE(ev.size() == 1);
  CHECK(ev[0].step == Step::G);
  CHECK(ev[0].alter == 1);
  CHECK(ev[0].onset == Fraction(1, 3));
  CHECK(ev[0].duration == Fraction(2, 3));
}

TEST_CASE("attributes persist and decimal durations stay exact") {
  const std::string xml = R"(<score-partwise><movement-title>Moves</movement-title><part-list/><part id="P1">
    <measure number="1"><attributes><divisions>2</divisions><time><beats>2</beats><beat-type>4</beat-type></time></attributes>
      <note><pitch><step>A</step><octave>4</octave></pitch><duration>1.5</duration></note>
      <note><rest/><duration>2.5</duration></note></measure>
    <measure number="2"><note><pitch><step>B</step><alter>-1</alter><octave>3</octave></pitch><duration>4</duration></note></measure>
  </part></score-partwise>)";
  const Score s = parse_musicxml(xml);
  CHECK(s.title == "Moves");
  const auto& ms = s.measures[0];
  REQUIRE(ms.size() == 2);
  CHECK(ms[0].events[0].duration == Fraction(3, 8));
  CHECK(ms[0].events[1].onset == Fraction(3, 8));
  CHECK(covers_measure(ms[0]));
  CHECK(ms[1].events[0].duration == Fraction(1));
  CHECK(ms[1].divisions == 2);
}

TEST_CASE("events sort by onset with pitched before rest") {
  const std::string xml = R"(<score-partwise><part-list/><part id="P1"><measure number="1">
    <attributes><divisions>1</divisions></attributes>
    <note><rest/><duration>4</duration></note>
    <backup><duration>4</duration></backup>
    <note><pitch><step>C</step><octave>5</octave></pitch><duration>4</duration></note>
  </measure></part></score-partwise>)";
  const Score parsed = parse_musicxml(xml);
  const auto& ev = parsed.measures[0][0].events;
  REQUIRE(ev.size() == 2);
  CHECK_FALSE(ev[0].is_rest());
  CHECK(ev[1].is_rest());
}

TEST_CASE("first melodic line") {
  SUBCASE("monophonic input is unchanged") {
    const Score s = load_score(testing::fixture("cmaj_scale.xml"));
    CHECK(first_melodic_line(s) == s.measures[0]);
  }
  SUBCASE("chord collapses to its highest note") {
    const auto line = first_melodic_line(load_score(testing::fixture("chord.xml")));
    REQUIRE(line[0].events.size() == 1);
    CHECK(line[0].events[0].step == Step::G);
    CHECK(line[0].events[0].octave == 4);
  }
  SUBCASE("octave dominates spelling in the chord rule") {
    const std::string xml = R"(<score-partwise><part-list/><part id="P1"><measure number="1">
      <attributes><divisions>1</divisions></attributes>
      <note><pitch><step>C</step><alter>-1</alter><octave>5</octave></pitch><duration>4</duration></note>
      <note><chord/><pitch><step>B</step><alter>1</alter><octave>4</octave></pitch><duration>4</duration></note>
    </measure></part></score-partwise>)";
    const auto line = first_melodic_line(parse_musicxml(xml));
    CHECK(line[0].events[0].octave == 5);
  }
  SUBCASE("two parts keep only the first") {
    const Score s = load_score(testing::fixture("two_part.xml"));
    REQUIRE(s.parts.size() == 2);
    const auto line = first_melodic_line(s);
    CHECK(line == s.measures[0]);
    CHECK(line[0].events[0].step == Step::C);
  }
  SUBCASE("empty score") {
    Score empty;
    CHECK(code_of([&] { first_melodic_line(empty); }) == ErrorCode::EmptyScore);
    empty.parts = {"P1"};
    empty.measures = {{}};
    CHECK(code_of([&] { first_melodic_line(empty); }) == ErrorCode::EmptyScore);
  }
}

TEST_CASE("every event stays inside its measure") {
  for (const char* name : {"cmaj_scale.xml", "one_rest.xml", "bflat_eighth.xml", "china1.xml", "half_notes.xml",
                           "chord.xml", "two_part.xml"}) {
    const Score s = load_score(testing::fixture(name));
    for (const auto& part : s.measures)
      for (const Measure& m : part)
        for (const NoteEvent& e : m.events) {
          CHECK(e.onset >= Fraction(0));
          CHECK(e.onset < Fraction(1));
          CHECK(e.duration > Fraction(0));
          CHECK(e.onset + e.duration <= Fraction(1));
          if (e.is_rest()) CHECK(e.octave == 0);
        }
  }
}
