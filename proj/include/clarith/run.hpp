#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace clarith {

enum class Label { Top, Bot };

inline Label opposite(Label l) { return l == Label::Top ? Label::Bot : Label::Top; }
inline char label_char(Label l) { return l == Label::Top ? 'T' : 'B'; }

struct Labmove {
  Label label;
  std::string move;
  friend bool operator==(const Labmove& a, const Labmove& b) { return a.label == b.label && a.move == b.move; }
  friend bool operator!=(const Labmove& a, const Labmove& b) { return !(a == b); }
};

using Run = std::vector<Labmove>;

inline Labmove top(std::string m) { return {Label::Top, std::move(m)}; }
inline Labmove bot(std::string m) { return {Label::Bot, std::move(m)}; }

// Structured view of a move: address tokens, payload, optional "#"+numer.
struct MoveView {
  std::vector<std::string> address;  // "0." / "1." tokens
  std::string payload;               // text between address and '#'
  bool numeric = false;
  std::string numer;
  std::string str() const;
};

MoveView view_move(const std::string& m);

// `T <move>` / `B <move>` lines; blank lines and '%' comments skipped.
Run read_run(std::istream& in);
void write_run(std::ostream& out, const Run& r);
std::string run_str(const Run& r);  // <T a, B b> style, for messages

}  // namespace clarith
