#include "muselet/represent.hpp"

#include <filesystem>

#include "muselet/error.hpp"

namespace muselet {

std::string_view to_string(Scheme s) noexcept {
  return s == Scheme::NoteBased ? "note_based" : "measure_based";
}

Scheme parse_scheme(std::string_view text) {
  if (text == "note_based") return Scheme::NoteBased;
  if (text == "measure_based") return Scheme::MeasureBased;
  throw Error(ErrorCode::InvalidArgument, "unknown scheme '" + std::string(text) + "'");
}

int pitch_class_of(Step step, int alter) noexcept {
  const int semitone = ((step_semitone(step) + alter) % 12 + 12) % 12;
  return semitone + 1;
}

std::string PitchClassVector::str() const {
  std::string out(12, '0');
  for (std::size_t i = 0; i < 12; ++i) {
    if (bits_.test(i)) out[i] = '1';
  }
  return out;
}

std::string MeasureToken::str() const {
  std::string out;
  for (std::size_t i = 0; i < kSlots; ++i) {
    if (i) out += ' ';
    out += slots_[i];
  }
  return out;
}

PitchClassVector note_based_token(const Measure& measure) {
  PitchClassVector v;
  for (const NoteEvent& ev : measure.events) {
    if (!ev.is_rest()) v.set(pitch_class_of(ev.step, ev.alter));
  }
  return v;
}

MeasureToken measure_based_token(const Measure& measure) {
  MeasureToken token;
  for (std::size_t slot = 0; slot < MeasureToken::kSlots; ++slot) {
    const Fraction t(static_cast<std::int64_t>(slot), MeasureToken::kSlots);
    const NoteEvent* sounding = nullptr;
    for (const NoteEvent& ev : measure.events) {
      if (ev.is_rest() || !ev.sounds_at(t)) continue;
      if (!sounding || ev.pitch_key() > sounding->pitch_key()) sounding = &ev;
    }
    std::string& symbol = token.slots()[slot];
    if (!sounding) {
      symbol = "O";
      continue;
    }
    if (sounding->alter < -1 || sounding->alter > 1) {
      throw Error(ErrorCode::UnsupportedAlteration,
                  "double accidental in measure " + std::to_string(measure.index));
    }
    symbol = std::string(1, step_letter(sounding->step));
    if (sounding->alter == 1) symbol += '#';
    if (sounding->alter == -1) symbol += 'b';
  }
  return token;
}

Document tokenize_song(const Score& score, Scheme scheme, std::string label) {
  Document doc;
  doc.name = !score.title.empty() ? score.title : std::filesystem::path(score.source_path).stem().string();
  doc.label = std::move(label);
  doc.scheme = scheme;
  for (const Measure& m : first_melodic_line(score)) {
    doc.tokens.push_back(scheme == Scheme::NoteBased ? note_based_token(m).str() : measure_based_token(m).str());
  }
  return doc;
}

}  // namespace muselet
