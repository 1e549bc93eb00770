#pragma once

#include <array>
#include <bitset>
#include <string>
#include <string_view>
#include <vector>

#include "muselet/ingest.hpp"

namespace muselet {

enum class Scheme { NoteBased, MeasureBased };

std::string_view to_string(Scheme s) noexcept;
/// Accepts "note_based" / "measure_based"; throws Error(InvalidArgument) otherwise.
Scheme parse_scheme(std::string_view text);

/// Pitch class 1..12 (C = 1, C#/Db = 2, ..., B/Cb = 12), enharmonics merged.
int pitch_class_of(Step step, int alter) noexcept;

/// Which of the 12 pitch classes sound in a measure.
class PitchClassVector {
 public:
  void set(int pitch_class) { bits_.set(static_cast<std::size_t>(pitch_class - 1)); }
  bool test(int pitch_class) const { return bits_.test(static_cast<std::size_t>(pitch_class - 1)); }
  /// Exactly 12 '0'/'1' characters, pitch class 1 first.
  std::string str() const;

  friend bool operator==(const PitchClassVector&, const PitchClassVector&) = default;

 private:
  std::bitset<12> bits_;
};

/// Eight equal time slots, each "O" or a spelled note name such as "Bb" or "F#".
class MeasureToken {
 public:
  static constexpr std::size_t kSlots = 8;

  const std::array<std::string, kSlots>& slots() const noexcept { return slots_; }
  std::array<std::string, kSlots>& slots() noexcept { return slots_; }
  /// Slots joined by single spaces.
  std::string str() const;

 private:
  std::array<std::string, kSlots> slots_;
};

PitchClassVector note_based_token(const Measure& measure);
/// Throws Error(UnsupportedAlteration) for double sharps and flats.
MeasureToken measure_based_token(const Measure& measure);

/// One song: an ordered token stream, one token per measure.
struct Document {
  std::string name;
  std::string label;
  Scheme scheme = Scheme::NoteBased;
  std::vector<std::string> tokens;
};

Document tokenize_song(const Score& score, Scheme scheme, std::string label);

}  // namespace muselet
