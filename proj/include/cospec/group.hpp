#pragma once

// Element arithmetic for the two concrete group families: free groups F_d
// (reduced words) and the wreath product F_2^(+Z) x| Z, whose elements are
// pairs (f, n) of a finitely supported lamp configuration and a shift.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cospec/errors.hpp"

namespace cospec {

inline constexpr std::string_view kFreeAlphabet = "abcdefghijklmnopqrstuvwxyz";
inline constexpr std::string_view kWreathAlphabet = "sab";

struct Generator {
  int index = 0;
  int sign = 1;

  constexpr Generator inverse() const { return {index, -sign}; }
  // Slot 2i is the i-th generator, slot 2i+1 its inverse.
  constexpr int slot() const { return 2 * index + (sign < 0 ? 1 : 0); }
  static constexpr Generator from_slot(int slot) { return {slot / 2, (slot % 2) ? -1 : 1}; }

  friend constexpr auto operator<=>(const Generator&, const Generator&) = default;
};

// A reduced word. Construction always reduces.
class Word {
 public:
  Word() = default;
  explicit Word(std::span<const Generator> letters) {
    letters_.reserve(letters.size());
    for (const auto& g : letters) push_back(g);
  }
  Word(std::initializer_list<Generator> letters) : Word(std::span<const Generator>(letters.begin(), letters.size())) {}

  const std::vector<Generator>& letters() const { return letters_; }
  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  const Generator& operator[](std::size_t i) const { return letters_[i]; }

  // Right multiplication by one generator, cancelling if needed.
  void push_back(Generator g) {
    if (!letters_.empty() && letters_.back() == g.inverse()) {
      letters_.pop_back();
    } else {
      letters_.push_back(g);
    }
  }

  Word inverse() const {
    Word w;
    w.letters_.reserve(letters_.size());
    for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) w.letters_.push_back(it->inverse());
    return w;
  }

  int max_index() const {
    int m = -1;
    for (const auto& g : letters_) m = std::max(m, g.index);
    return m;
  }

  friend bool operator==(const Word&, const Word&) = default;
  friend auto operator<=>(const Word& x, const Word& y) {
    // Shortlex, so sorted containers list shorter words first.
    if (x.size() != y.size()) return x.size() <=> y.size();
    return std::lexicographical_compare_three_way(x.letters_.begin(), x.letters_.end(), y.letters_.begin(),
                                                  y.letters_.end());
  }

 private:
  std::vector<Generator> letters_;
};

// Freely reduces a letter sequence over F_rank.
inline Word reduce_word(std::span<const Generator> letters, int rank) {
  for (const auto& g : letters) {
    if (g.index < 0 || g.index >= rank || (g.sign != 1 && g.sign != -1)) {
      throw ValidationError("generator index " + std::to_string(g.index) + " outside rank " + std::to_string(rank));
    }
  }
  return Word(letters);
}

inline Word multiply(const Word& x, const Word& y) {
  Word out = x;
  for (const auto& g : y.letters()) out.push_back(g);
  return out;
}

inline Word invert(const Word& x) { return x.inverse(); }

inline Word operator*(const Word& x, const Word& y) { return multiply(x, y); }

// Lowercase letter = generator, uppercase = inverse; "1" is the identity.
inline std::string to_string(const Word& w, std::string_view alphabet = kFreeAlphabet) {
  if (w.empty()) return "1";
  std::string s;
  s.reserve(w.size());
  for (const auto& g : w.letters()) {
    char c = alphabet.at(static_cast<std::size_t>(g.index));
    if (g.sign < 0) c = static_cast<char>(c - 'a' + 'A');
    s.push_back(c);
  }
  return s;
}

inline Word parse_word(std::string_view text, int rank, std::string_view alphabet = kFreeAlphabet) {
  std::vector<Generator> letters;
  if (text == "1" || text == "e") return {};
  for (char c : text) {
    if (c == ' ' || c == '\t') continue;
    const bool upper = c >= 'A' && c <= 'Z';
    const char lower = upper ? static_cast<char>(c - 'A' + 'a') : c;
    const auto pos = alphabet.find(lower);
    if (pos == std::string_view::npos || static_cast<int>(pos) >= rank) {
      throw ValidationError(std::string("letter '") + c + "' is not a generator of rank " + std::to_string(rank));
    }
    letters.push_back({static_cast<int>(pos), upper ? -1 : 1});
  }
  return reduce_word(letters, rank);
}

// Element (f, n) of F_2^(+Z) x| Z. Lamp words are over F_2 = <a, b>
// (indices 0, 1); positions holding the identity are absent from the map.
class WreathElement {
 public:
  using Support = std::map<std::int64_t, Word>;

  WreathElement() = default;
  WreathElement(Support support, std::int64_t shift) : shift_(shift) {
    for (auto& [pos, w] : support) {
      if (w.max_index() >= 2) throw ValidationError("wreath lamp words must be over F_2");
      if (!w.empty()) support_.emplace(pos, std::move(w));
    }
  }

  static WreathElement identity() { return {}; }
  // Generator indices: 0 = s (shift), 1 = a, 2 = b.
  static WreathElement generator(Generator g) {
    if (g.index == 0) return WreathElement({}, g.sign);
    if (g.index == 1 || g.index == 2) return WreathElement({{0, Word{{g.index - 1, g.sign}}}}, 0);
    throw ValidationError("wreath generator index must be 0 (s), 1 (a) or 2 (b)");
  }

  const Support& support() const { return support_; }
  std::int64_t shift() const { return shift_; }
  bool is_identity() const { return support_.empty() && shift_ == 0; }

  Word at(std::int64_t pos) const {
    auto it = support_.find(pos);
    return it == support_.end() ? Word{} : it->second;
  }

  // In-place right multiplication by a generator of S = {s, a, b}^{+-1}.
  void apply(Generator g) {
    if (g.index == 0) {
      shift_ += g.sign;
      return;
    }
    auto [it, inserted] = support_.try_emplace(shift_);
    it->second.push_back({g.index - 1, g.sign});
    if (it->second.empty()) support_.erase(it);
  }

  friend bool operator==(const WreathElement&, const WreathElement&) = default;

 private:
  Support support_;
  std::int64_t shift_ = 0;
};

// (f, n)(g, m) = (f * shift_n(g), n + m) with shift_n(g)(k) = g(k - n).
inline WreathElement multiply(const WreathElement& x, const WreathElement& y) {
  WreathElement::Support out = x.support();
  for (const auto& [pos, w] : y.support()) {
    const std::int64_t k = pos + x.shift();
    auto it = out.find(k);
    if (it == out.end()) {
      out.emplace(k, w);
    } else {
      it->second = it->second * w;
    }
  }
  return WreathElement(std::move(out), x.shift() + y.shift());
}

// (f, n)^{-1} = (shift_{-n}(f^{-1}), -n).
inline WreathElement invert(const WreathElement& x) {
  WreathElement::Support out;
  for (const auto& [pos, w] : x.support()) out.emplace(pos - x.shift(), w.inverse());
  return WreathElement(std::move(out), -x.shift());
}

inline WreathElement operator*(const WreathElement& x, const WreathElement& y) { return multiply(x, y); }

// Evaluates a word over {s, a, b} (indices 0, 1, 2).
inline WreathElement evaluate_wreath_word(const Word& w) {
  WreathElement x;
  for (const auto& g : w.letters()) {
    if (g.index > 2) throw ValidationError("wreath words use generators s, a, b only");
    x.apply(g);
  }
  return x;
}

// "(pos:word, pos:word; shift)", e.g. "(0:a, 1:bA; 1)"; identity is "(; 0)".
inline std::string to_string(const WreathElement& x) {
  std::string s = "(";
  bool first = true;
  for (const auto& [pos, w] : x.support()) {
    if (!first) s += ", ";
    first = false;
    s += std::to_string(pos) + ":" + to_string(w, "ab");
  }
  s += "; " + std::to_string(x.shift()) + ")";
  return s;
}

inline WreathElement parse_wreath(std::string_view text) {
  auto trim = [](std::string_view v) {
    while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
    while (!v.empty() && (v.back() == ' ' || v.back() == '\t')) v.remove_suffix(1);
    return v;
  };
  text = trim(text);
  if (text.size() < 2 || text.front() != '(' || text.back() != ')') {
    throw ValidationError("wreath element must look like (pos:word, ...; shift)");
  }
  text = text.substr(1, text.size() - 2);
  const auto semi = text.find(';');
  if (semi == std::string_view::npos) throw ValidationError("wreath element is missing '; shift'");
  auto to_int = [](std::string_view v) -> std::int64_t {
    try {
      std::size_t used = 0;
      const auto r = std::stoll(std::string(v), &used);
      if (used != v.size()) throw ValidationError("bad integer");
      return r;
    } catch (const std::logic_error&) {
      throw ValidationError("bad integer '" + std::string(v) + "' in wreath element");
    }
  };
  const std::int64_t shift = to_int(trim(text.substr(semi + 1)));
  WreathElement::Support support;
  std::string_view body = trim(text.substr(0, semi));
  while (!body.empty()) {
    const auto comma = body.find(',');
    std::string_view item = trim(body.substr(0, comma));
    body = comma == std::string_view::npos ? std::string_view{} : trim(body.substr(comma + 1));
    const auto colon = item.find(':');
    if (colon == std::string_view::npos) throw ValidationError("wreath support entry needs pos:word");
    const std::int64_t pos = to_int(trim(item.substr(0, colon)));
    Word w = parse_word(trim(item.substr(colon + 1)), 2, "ab");
    if (support.contains(pos)) throw ValidationError("duplicate wreath support position");
    support.emplace(pos, std::move(w));
  }
  return WreathElement(std::move(support), shift);
}

}  // namespace cospec
