#include "clarith/run.hpp"

#include <sstream>
#include <stdexcept>

namespace clarith {

std::string MoveView::str() const {
  std::string s;
  for (const auto& a : address) s += a;
  s += payload;
  if (numeric) s += "#" + numer;
  return s;
}

MoveView view_move(const std::string& m) {
  MoveView v;
  std::size_t i = 0;
  while (i + 1 < m.size() && (m[i] == '0' || m[i] == '1') && m[i + 1] == '.') {
    v.address.push_back(m.substr(i, 2));
    i += 2;
  }
  std::size_t hash = m.rfind('#');
  if (hash != std::string::npos && hash >= i) {
    v.numeric = true;
    v.payload = m.substr(i, hash - i);
    v.numer = m.substr(hash + 1);
  } else {
    v.payload = m.substr(i);
  }
  return v;
}

Run read_run(std::istream& in) {
  Run r;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '%') continue;
    if ((line[0] != 'T' && line[0] != 'B') || (line.size() > 1 && line[1] != ' '))
      throw std::invalid_argument("run line " + std::to_string(lineno) + ": expected 'T <move>' or 'B <move>'");
    r.push_back({line[0] == 'T' ? Label::Top : Label::Bot, line.size() > 2 ? line.substr(2) : ""});
  }
  return r;
}

void write_run(std::ostream& out, const Run& r) {
  for (const auto& lm : r) out << label_char(lm.label) << ' ' << lm.move << '\n';
}

std::string run_str(const Run& r) {
  std::ostringstream os;
  os << '<';
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (i) os << ", ";
    os << label_char(r[i].label) << r[i].move;
  }
  os << '>';
  return os.str();
}

}  // namespace clarith
