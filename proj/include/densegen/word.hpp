#pragma once

#include <string>
#include <vector>

namespace densegen {

enum class Gen { A, B };

struct Letter {
  Gen gen;
  long exp;  // positive
};

/// A finite product of the two generators in normalized form: adjacent
/// letters alternate generators and exponents are positive.
struct Word {
  std::vector<Letter> letters;

  void append(Gen g, long exp) {
    if (exp <= 0) return;
    if (!letters.empty() && letters.back().gen == g)
      letters.back().exp += exp;
    else
      letters.push_back({g, exp});
  }

  void append(const Word& w) {
    for (const Letter& l : w.letters) append(l.gen, l.exp);
  }

  long degree() const {
    long d = 0;
    for (const Letter& l : letters) d += l.exp;
    return d;
  }

  bool empty() const { return letters.empty(); }

  std::string str() const {
    std::string s;
    for (const Letter& l : letters) {
      s += l.gen == Gen::A ? 'A' : 'B';
      if (l.exp != 1) s += "^" + std::to_string(l.exp);
    }
    return s.empty() ? "<empty>" : s;
  }

  bool operator==(const Word& rhs) const {
    if (letters.size() != rhs.letters.size()) return false;
    for (std::size_t i = 0; i < letters.size(); ++i)
      if (letters[i].gen != rhs.letters[i].gen || letters[i].exp != rhs.letters[i].exp)
        return false;
    return true;
  }

  /// Lexicographic order on the letter sequence (A < B, then exponent).
  bool operator<(const Word& rhs) const {
    const std::size_t n = std::min(letters.size(), rhs.letters.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (letters[i].gen != rhs.letters[i].gen) return letters[i].gen == Gen::A;
      if (letters[i].exp != rhs.letters[i].exp) return letters[i].exp < rhs.letters[i].exp;
    }
    return letters.size() < rhs.letters.size();
  }
};

inline Word concat(const Word& a, const Word& b) {
  Word out = a;
  out.append(b);
  return out;
}

}  // namespace densegen
