#pragma once

#include <complex>
#include <string>
#include <vector>

#include "hlat/lattice.hpp"

namespace hlat::cli {

// Doubles are serialized with 17 significant digits so parsing the text
// recovers the exact bit pattern.
std::string format_double(double v);

// Lattice sites as semicolon-joined integers: {3, -2} -> "3;-2".
std::string format_site(const std::vector<int>& x);
std::vector<int> parse_site(const std::string& text);

// Complex literals in re+imi form: (0.5, -1.25) -> "0.5-1.25i".  Parsing
// accepts pure reals ("1.5"), pure imaginaries ("0.25i", "-i"), and the
// combined form; formatting always emits both parts.
std::string format_complex(std::complex<double> v);
std::complex<double> parse_complex(const std::string& text);

// A finitely supported function literal "site:value,site:value", e.g.
// "0:0.5-1.25i,2:1".  Sites use semicolon-joined coordinates and may not
// repeat.  Throws InvalidArgument on any malformed piece.
LatticeFunction parse_probe(const std::string& text, int d);

// One CSV row: fields joined with commas, newline-terminated.
std::string csv_row(const std::vector<std::string>& fields);

}  // namespace hlat::cli
