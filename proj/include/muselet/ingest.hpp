#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "muselet/fraction.hpp"

namespace muselet {

enum class Step : std::uint8_t { C, D, E, F, G, A, B };

char step_letter(Step s) noexcept;
/// Semitones above C of the natural note.
int step_semitone(Step s) noexcept;

enum class EventKind : std::uint8_t { Pitched, Rest };

/// A timed note or rest; onset and duration are fractions of the measure.
struct NoteEvent {
  Fraction onset;
  Fraction duration;
  EventKind kind = EventKind::Rest;
  Step step = Step::C;  // pitched only
  int alter = 0;        // pitched only
  int octave = 0;       // pitched only

  bool is_rest() const noexcept { return kind == EventKind::Rest; }
  /// Absolute semitone height, comparable across events (C4 = 48).
  int height() const noexcept { return octave * 12 + step_semitone(step) + alter; }
  /// Ordering key for "highest pitch": octave first, then step plus alter.
  std::pair<int, int> pitch_key() const noexcept { return {octave, step_semitone(step) + alter}; }
  bool sounds_at(Fraction t) const noexcept { return onset <= t && t < onset + duration; }

  friend bool operator==(const NoteEvent&, const NoteEvent&) = default;

  static NoteEvent rest(Fraction onset, Fraction duration) {
    return NoteEvent{onset, duration, EventKind::Rest, Step::C, 0, 0};
  }
  static NoteEvent note(Fraction onset, Fraction duration, Step step, int alter, int octave) {
    return NoteEvent{onset, duration, EventKind::Pitched, step, alter, octave};
  }
};

struct Measure {
  int index = 1;                  // 1-based ordinal within the part
  std::vector<NoteEvent> events;  // sorted by onset, pitched before rest
  int divisions = 1;              // MusicXML divisions per quarter note as read

  friend bool operator==(const Measure&, const Measure&) = default;
};

struct Score {
  std::string title;
  std::string source_path;
  std::vector<std::string> parts;              // part ids in document order
  std::vector<std::vector<Measure>> measures;  // one list per part

  friend bool operator==(const Score&, const Score&) = default;
};

/// Loads .mxl (zipped), .xml or .musicxml score-partwise files.
Score load_score(const std::filesystem::path& path);

/// Parses an in-memory score-partwise document.
Score parse_musicxml(std::string_view xml, std::string source_path = {});

/// Measures of the first part with every chord collapsed to its highest note.
std::vector<Measure> first_melodic_line(const Score& score);

}  // namespace muselet
