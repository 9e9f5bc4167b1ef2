#pragma once

// Plain-text complex matrices: one row per line, entries separated by
// whitespace or commas, each entry "re", "imj" or "re+imj" / "re-imj".
// Lines starting with '#' and blank lines are ignored.

#include <iosfwd>
#include <string>
#include <string_view>

#include "ptomo/linalg.hpp"

namespace ptomo {

cplx parse_complex(std::string_view token);
CMat parse_matrix(std::istream& in);
CMat parse_matrix_text(const std::string& text);
CMat read_matrix_file(const std::string& path);

std::string format_complex(cplx z, int precision = 17);
void write_matrix(std::ostream& out, const CMat& m, int precision = 17);

}  // namespace ptomo
