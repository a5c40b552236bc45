#include "hotel/io/input.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <complex>
#include <map>

#include "hotel/error.hpp"

namespace hotel::io {

namespace {

using well::cplx;

class Parser {
 public:
  explicit Parser(std::string text) : s_(strip(std::move(text))) {}

  bool is_random() const { return s_ == "random"; }

  // level -> coefficient
  std::map<std::size_t, cplx> parse() {
    std::map<std::size_t, cplx> terms;
    bool paren = eat('(');
    double sign = 1.0;
    if (eat('-')) sign = -1.0;
    else eat('+');
    while (true) {
      const auto [level, coef] = term();
      terms[level] += sign * coef;
      if (eat('+')) sign = 1.0;
      else if (eat('-')) sign = -1.0;
      else break;
    }
    if (paren && !eat(')')) fail("missing ')'");
    if (eat('/')) divisor();
    if (pos_ != s_.size()) fail("unexpected text");
    return terms;
  }

 private:
  static std::string strip(std::string t) {
    std::string out;
    for (char c : t) {
      if (!std::isspace(static_cast<unsigned char>(c))) out += c;
    }
    return out;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("input '" + s_ + "': " + what + " at position " + std::to_string(pos_));
  }

  bool eat(char c) {
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool eat(std::string_view word) {
    if (s_.compare(pos_, word.size(), word) == 0) {
      pos_ += word.size();
      return true;
    }
    return false;
  }

  bool number(double& v) {
    const char* b = s_.data() + pos_;
    const auto r = std::from_chars(b, s_.data() + s_.size(), v);
    if (r.ec != std::errc{} || r.ptr == b) return false;
    pos_ += static_cast<std::size_t>(r.ptr - b);
    return true;
  }

  std::pair<std::size_t, cplx> term() {
    cplx coef{1.0, 0.0};
    double v = 0.0;
    if (number(v)) {
      coef = v;
      if (eat('i')) coef = {0.0, v};
      eat('*');
    } else if (s_.compare(pos_, 2, "i*") == 0 || s_.compare(pos_, 2, "ih") == 0) {
      ++pos_;
      eat('*');
      coef = {0.0, 1.0};
    }
    if (!eat('h')) fail("expected hN");
    double n = 0.0;
    const std::size_t at = pos_;
    if (!number(n) || n < 1.0 || n != static_cast<double>(static_cast<std::size_t>(n)) ||
        s_.find_first_of(".eE", at) < pos_) {
      fail("expected a level number >= 1");
    }
    return {static_cast<std::size_t>(n), coef};
  }

  void divisor() {
    double v = 0.0;
    if (eat("\xE2\x88\x9A") || eat("sqrt")) {
      const bool p = eat('(');
      if (!number(v)) fail("expected a number under the root");
      if (p && !eat(')')) fail("missing ')'");
    } else if (!number(v)) {
      fail("expected a divisor");
    }
    if (!(v > 0.0)) fail("divisor must be positive");
  }

  std::string s_;
  std::size_t pos_ = 0;
};

}  // namespace

well::SpectralState parse_input_state(const std::string& expr, const well::WellGeometry& g,
                                      std::size_t modes, std::size_t support, std::uint64_t seed) {
  Parser parser(expr);
  if (parser.is_random()) {
    if (support == 0 || support > modes) throw ConfigError("random input needs 1 <= support <= N");
    return well::random_state(g, support, modes, seed);
  }
  const auto terms = parser.parse();
  well::Amplitudes a = well::Amplitudes::Zero(static_cast<Eigen::Index>(modes));
  for (const auto& [level, coef] : terms) {
    if (level > modes) {
      throw ConfigError("input '" + expr + "' uses level " + std::to_string(level) +
                        " above N = " + std::to_string(modes));
    }
    a[static_cast<Eigen::Index>(level - 1)] += coef;
  }
  if (a.norm() == 0.0) throw ConfigError("input '" + expr + "' is the zero state");
  a /= a.norm();
  return {g, std::move(a)};
}

std::size_t input_max_level(const std::string& expr, std::size_t support) {
  Parser parser(expr);
  if (parser.is_random()) return support;
  std::size_t top = 0;
  for (const auto& [level, coef] : parser.parse()) {
    if (coef != cplx{0.0, 0.0}) top = std::max(top, level);
  }
  return top;
}

}  // namespace hotel::io
