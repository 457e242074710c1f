#include "scanmix/rational.hpp"

#include <cctype>

namespace scanmix {

Rational parse_rational(const std::string& text) {
  if (text.empty()) fail(Errc::ParseError, "empty rational");
  for (char ch : text) {
    if (!(std::isdigit(static_cast<unsigned char>(ch)) || ch == '/' || ch == '-' || ch == '+'))
      fail(Errc::ParseError, "bad rational '" + text + "'");
  }
  Rational r;
  if (mpq_set_str(r.get_mpq_t(), text.c_str(), 10) != 0)
    fail(Errc::ParseError, "bad rational '" + text + "'");
  if (r.get_den() == 0) fail(Errc::ParseError, "zero denominator in '" + text + "'");
  r.canonicalize();
  return r;
}

std::string rational_str(const Rational& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

}  // namespace scanmix
