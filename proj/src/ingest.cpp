#include "muselet/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

#include "muselet/error.hpp"
#include "muselet/zip.hpp"

namespace muselet {

namespace pt = boost::property_tree;

char step_letter(Step s) noexcept { return "CDEFGAB"[static_cast<int>(s)]; }

int step_semitone(Step s) noexcept {
  static constexpr int kSemitones[] = {0, 2, 4, 5, 7, 9, 11};
  return kSemitones[static_cast<int>(s)];
}

namespace {

[[noreturn]] void malformed(const std::string& why) { throw Error(ErrorCode::MalformedXml, why); }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

pt::ptree parse_tree(std::string_view xml, const std::string& what) {
  pt::ptree tree;
  std::istringstream in{std::string(xml)};
  try {
    pt::read_xml(in, tree, pt::xml_parser::trim_whitespace | pt::xml_parser::no_comments);
  } catch (const pt::xml_parser_error& e) {
    malformed(what + ": " + e.message());
  }
  return tree;
}

// MusicXML divisions and durations are decimals; keep them exact.
Fraction parse_decimal(const std::string& text, const char* field) {
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  std::int64_t num = 0, den = 1;
  bool seen_digit = false, seen_dot = false;
  for (char c : s) {
    if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else if (c >= '0' && c <= '9') {
      if (num > (INT64_MAX / 10) - 10 || den > INT64_MAX / 10) malformed(std::string("number too long in <") + field + ">");
      num = num * 10 + (c - '0');
      if (seen_dot) den *= 10;
      seen_digit = true;
    } else {
      malformed(std::string("bad number '") + text + "' in <" + field + ">");
    }
  }
  if (!seen_digit) malformed(std::string("empty <") + field + ">");
  return Fraction(negative ? -num : num, den);
}

int parse_int(const std::string& text, const char* field) {
  int value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) malformed(std::string("bad integer '") + text + "' in <" + field + ">");
  return value;
}

// "3+2" style additive meters sum their parts.
int parse_beats(const std::string& text) {
  int total = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t plus = text.find('+', start);
    const std::string piece = text.substr(start, plus == std::string::npos ? std::string::npos : plus - start);
    total += parse_int(piece, "beats");
    if (plus == std::string::npos) break;
    start = plus + 1;
  }
  return total;
}

Step parse_step(const std::string& text) {
  static constexpr std::string_view kLetters = "CDEFGAB";
  if (text.size() != 1 || kLetters.find(text[0]) == std::string_view::npos) malformed("bad <step> '" + text + "'");
  return static_cast<Step>(kLetters.find(text[0]));
}

struct PartState {
  Fraction divisions{1};
  int beats = 4;
  int beat_type = 4;

  Fraction measure_length() const { return divisions * Fraction(4 * beats, beat_type); }
};

void read_attributes(const pt::ptree& attrs, PartState& state) {
  if (auto d = attrs.get_optional<std::string>("divisions")) {
    state.divisions = parse_decimal(*d, "divisions");
    if (state.divisions <= Fraction(0)) malformed("non-positive <divisions>");
  }
  if (auto time = attrs.get_child_optional("time")) {
    auto beats = time->get_optional<std::string>("beats");
    auto type = time->get_optional<std::string>("beat-type");
    if (beats && type) {
      state.beats = parse_beats(*beats);
      state.beat_type = parse_int(*type, "beat-type");
      if (state.beats <= 0 || state.beat_type <= 0) malformed("non-positive time signature");
    }
  }
}

Measure read_measure(const pt::ptree& node, int index, PartState& state) {
  struct Raw {
    Fraction onset, duration;
    NoteEvent proto;
    bool whole_measure_rest;
  };
  std::vector<Raw> raw;
  Fraction position{0};
  Fraction last_onset{0};

  for (const auto& [tag, child] : node) {
    if (tag == "attributes") {
      read_attributes(child, state);
    } else if (tag == "backup" || tag == "forward") {
      const Fraction d = parse_decimal(child.get<std::string>("duration", "0"), "duration");
      position = tag == "backup" ? position - d : position + d;
      if (position < Fraction(0)) position = Fraction(0);
    } else if (tag == "note") {
      if (child.get_child_optional("grace")) continue;
      const bool chord = child.get_child_optional("chord").has_value();
      const auto dur_text = child.get_optional<std::string>("duration");
      if (!dur_text) malformed("<note> without <duration> in measure " + std::to_string(index));
      const Fraction duration = parse_decimal(*dur_text, "duration");
      const Fraction onset = chord ? last_onset : position;
      if (!chord) {
        last_onset = position;
        position += duration;
      }
      if (child.get_child_optional("cue")) continue;

      NoteEvent proto;
      bool whole = false;
      if (auto rest = child.get_child_optional("rest")) {
        proto.kind = EventKind::Rest;
        whole = rest->get<std::string>("<xmlattr>.measure", "") == "yes";
      } else if (auto pitch = child.get_child_optional("pitch")) {
        proto.kind = EventKind::Pitched;
        proto.step = parse_step(pitch->get<std::string>("step", ""));
        if (auto alter = pitch->get_optional<std::string>("alter")) {
          // Microtonal alters are rounded to the nearest semitone.
          proto.alter = static_cast<int>(std::lround(parse_decimal(*alter, "alter").to_double()));
          if (proto.alter < -2 || proto.alter > 2) malformed("<alter> outside -2..2");
        }
        proto.octave = parse_int(pitch->get<std::string>("octave", ""), "octave");
      } else {
        continue;  // unpitched percussion occupies time but carries no pitch
      }
      raw.push_back({onset, duration, proto, whole});
    }
  }

  const Fraction length = state.measure_length();
  Measure m;
  m.index = index;
  m.divisions = static_cast<int>(std::max<std::int64_t>(1, state.divisions.num() / state.divisions.den()));
  for (const Raw& r : raw) {
    if (r.onset >= length) continue;
    Fraction end = r.whole_measure_rest ? length : std::min(r.onset + r.duration, length);
    if (end <= r.onset) continue;
    NoteEvent ev = r.proto;
    ev.onset = r.onset / length;
    ev.duration = (end - r.onset) / length;
    m.events.push_back(ev);
  }
  std::stable_sort(m.events.begin(), m.events.end(), [](const NoteEvent& a, const NoteEvent& b) {
    if (a.onset != b.onset) return a.onset < b.onset;
    return !a.is_rest() && b.is_rest();
  });
  return m;
}

std::string container_rootfile(std::string_view archive, const std::string& path) {
  const auto container = zip::read_entry(archive, "META-INF/container.xml");
  if (!container) throw Error(ErrorCode::MalformedContainer, path + ": missing META-INF/container.xml");
  pt::ptree tree;
  std::istringstream in(*container);
  try {
    pt::read_xml(in, tree, pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error& e) {
    throw Error(ErrorCode::MalformedContainer, path + ": container.xml: " + e.message());
  }
  auto rootfiles = tree.get_child_optional("container.rootfiles");
  if (rootfiles) {
    for (const auto& [tag, rf] : *rootfiles) {
      if (tag != "rootfile") continue;
      if (auto full = rf.get_optional<std::string>("<xmlattr>.full-path"); full && !full->empty()) return *full;
    }
  }
  throw Error(ErrorCode::MalformedContainer, path + ": container.xml names no rootfile");
}

}  // namespace

Score parse_musicxml(std::string_view xml, std::string source_path) {
  const pt::ptree tree = parse_tree(xml, source_path);
  if (tree.get_child_optional("score-timewise")) {
    throw Error(ErrorCode::UnsupportedFormat, source_path + ": score-timewise documents are not supported");
  }
  const auto root = tree.get_child_optional("score-partwise");
  if (!root) malformed(source_path + ": no <score-partwise> root element");

  Score score;
  score.source_path = std::move(source_path);
  score.title = root->get<std::string>("work.work-title", "");
  if (score.title.empty()) score.title = root->get<std::string>("movement-title", "");

  for (const auto& [tag, part] : *root) {
    if (tag != "part") continue;
    score.parts.push_back(part.get<std::string>("<xmlattr>.id", "P" + std::to_string(score.parts.size() + 1)));
    PartState state;
    std::vector<Measure> measures;
    for (const auto& [mtag, measure] : part) {
      if (mtag != "measure") continue;
      measures.push_back(read_measure(measure, static_cast<int>(measures.size()) + 1, state));
    }
    score.measures.push_back(std::move(measures));
  }
  if (score.parts.empty()) malformed(score.source_path + ": score has no <part>");
  return score;
}

Score load_score(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) throw Error(ErrorCode::FileNotFound, path.string());
  const std::string ext = lower_extension(path);
  if (ext == ".xml" || ext == ".musicxml") return parse_musicxml(read_file(path), path.string());
  if (ext == ".mxl") {
    const std::string archive = read_file(path);
    const std::string root = container_rootfile(archive, path.string());
    const auto payload = zip::read_entry(archive, root);
    if (!payload) throw Error(ErrorCode::MalformedContainer, path.string() + ": rootfile " + root + " not in archive");
    Score s = parse_musicxml(*payload, path.string());
    return s;
  }
  throw Error(ErrorCode::UnsupportedFormat, path.string() + ": unrecognized extension '" + ext + "'");
}

std::vector<Measure> first_melodic_line(const Score& score) {
  if (score.measures.empty() || score.measures.front().empty()) {
    throw Error(ErrorCode::EmptyScore, score.source_path + ": no measures in first part");
  }
  std::vector<Measure> line = score.measures.front();
  for (Measure& m : line) {
    std::vector<NoteEvent> kept;
    kept.reserve(m.events.size());
    for (const NoteEvent& ev : m.events) {
      if (ev.is_rest()) {
        kept.push_back(ev);
        continue;
      }
      auto same_onset = std::find_if(kept.begin(), kept.end(),
                                     [&](const NoteEvent& k) { return !k.is_rest() && k.onset == ev.onset; });
      if (same_onset == kept.end()) {
        kept.push_back(ev);
      } else if (ev.pitch_key() > same_onset->pitch_key()) {
        *same_onset = ev;
      }
    }
    m.events = std::move(kept);
  }
  return line;
}

}  // namespace muselet
