#include "serialize.hpp"

#include <cstdio>
#include <set>

#include "hlat/errors.hpp"

namespace hlat::cli {

namespace {

double parse_double_strict(const std::string& text, const char* what) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw InvalidArgument(std::string("malformed ") + what + ": '" + text + "'");
  }
  if (pos != text.size()) {
    throw InvalidArgument(std::string("trailing characters in ") + what + ": '" +
                          text + "'");
  }
  return v;
}

int parse_int_strict(const std::string& text, const char* what) {
  std::size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(text, &pos);
  } catch (const std::exception&) {
    throw InvalidArgument(std::string("malformed ") + what + ": '" + text + "'");
  }
  if (pos != text.size()) {
    throw InvalidArgument(std::string("trailing characters in ") + what + ": '" +
                          text + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t p = text.find(sep, start);
    if (p == std::string::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, p - start));
    start = p + 1;
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_site(const std::vector<int>& x) {
  std::string out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(x[i]);
  }
  return out;
}

std::vector<int> parse_site(const std::string& text) {
  if (text.empty()) throw InvalidArgument("empty lattice site literal");
  std::vector<int> site;
  for (const std::string& part : split(text, ';')) {
    site.push_back(parse_int_strict(part, "site coordinate"));
  }
  return site;
}

std::string format_complex(std::complex<double> v) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%.17g%+.17gi", v.real(), v.imag());
  return buf;
}

std::complex<double> parse_complex(const std::string& text) {
  if (text.empty()) throw InvalidArgument("empty complex literal");
  if (text.back() != 'i') {
    return {parse_double_strict(text, "complex literal"), 0.0};
  }
  const std::string body = text.substr(0, text.size() - 1);
  // Split real and imaginary parts at the last sign that does not belong to
  // an exponent; absent such a sign the whole body is the imaginary part.
  std::size_t cut = std::string::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' &&
        body[i - 1] != 'E') {
      cut = i;
      break;
    }
  }
  std::string real_part, imag_part;
  if (cut == std::string::npos) {
    imag_part = body;
  } else {
    real_part = body.substr(0, cut);
    imag_part = body.substr(cut);
  }
  double re = 0.0;
  if (!real_part.empty()) re = parse_double_strict(real_part, "complex literal");
  double im = 0.0;
  if (imag_part.empty() || imag_part == "+") {
    im = 1.0;
  } else if (imag_part == "-") {
    im = -1.0;
  } else {
    im = parse_double_strict(imag_part, "complex literal");
  }
  return {re, im};
}

LatticeFunction parse_probe(const std::string& text, int d) {
  if (text.empty()) throw InvalidArgument("empty probe function literal");
  LatticeFunction f(d);
  std::set<std::vector<int>> seen;
  for (const std::string& term : split(text, ',')) {
    const std::size_t colon = term.find(':');
    if (colon == std::string::npos || term.find(':', colon + 1) != std::string::npos) {
      throw InvalidArgument("probe term must be site:value, got '" + term + "'");
    }
    std::vector<int> site = parse_site(term.substr(0, colon));
    if (!seen.insert(site).second) {
      throw InvalidArgument("duplicate site in probe literal: '" +
                            format_site(site) + "'");
    }
    f.set(site, parse_complex(term.substr(colon + 1)));
  }
  return f;
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  out += '\n';
  return out;
}

}  // namespace hlat::cli
