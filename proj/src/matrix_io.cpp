#include "ptomo/matrix_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "ptomo/error.hpp"

namespace ptomo {

namespace {

// strtod-based so that "inf"/"nan" and exponents behave as usual.
bool parse_double_prefix(std::string_view s, std::size_t& pos, double& out) {
  const std::string buf(s.substr(pos));
  char* end = nullptr;
  out = std::strtod(buf.c_str(), &end);
  if (end == buf.c_str()) return false;
  pos += static_cast<std::size_t>(end - buf.c_str());
  return true;
}

}  // namespace

cplx parse_complex(std::string_view token) {
  const std::string original(token);
  if (token.empty()) throw_invalid("empty complex token");
  std::size_t pos = 0;
  double first = 0.0;
  if (!parse_double_prefix(token, pos, first)) throw_invalid("malformed complex number '" + original + "'");
  if (pos == token.size()) return {first, 0.0};
  if ((token[pos] == 'j' || token[pos] == 'i') && pos + 1 == token.size()) return {0.0, first};
  if (token[pos] != '+' && token[pos] != '-') throw_invalid("malformed complex number '" + original + "'");
  double second = 0.0;
  if (pos + 1 < token.size() && (token[pos + 1] == 'j' || token[pos + 1] == 'i') && pos + 2 == token.size()) {
    second = token[pos] == '-' ? -1.0 : 1.0;  // "1+j"
    pos += 1;
  } else if (!parse_double_prefix(token, pos, second)) {
    throw_invalid("malformed complex number '" + original + "'");
  }
  if (pos + 1 != token.size() || (token[pos] != 'j' && token[pos] != 'i')) {
    throw_invalid("malformed complex number '" + original + "'");
  }
  return {first, second};
}

CMat parse_matrix(std::istream& in) {
  std::vector<std::vector<cplx>> rows;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    for (char& c : line) {
      if (c == ',' || c == '\t' || c == '\r') c = ' ';
    }
    std::istringstream ls(line);
    std::vector<cplx> row;
    std::string tok;
    while (ls >> tok) row.push_back(parse_complex(tok));
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw_invalid("matrix text contains no rows");
  const std::size_t cols = rows.front().size();
  CMat m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) {
      throw_invalid("ragged matrix: row " + std::to_string(r + 1) + " has " + std::to_string(rows[r].size()) +
                    " entries, expected " + std::to_string(cols));
    }
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

CMat parse_matrix_text(const std::string& text) {
  std::istringstream in(text);
  return parse_matrix(in);
}

CMat read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open matrix file '" + path + "'");
  return parse_matrix(in);
}

std::string format_complex(cplx z, int precision) {
  char buf[96];
  if (z.imag() == 0.0) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, z.real());
  } else {
    std::snprintf(buf, sizeof buf, "%.*g%+.*gj", precision, z.real(), precision, z.imag());
  }
  return buf;
}

void write_matrix(std::ostream& out, const CMat& m, int precision) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << "  ";
      out << format_complex(m(r, c), precision);
    }
    out << '\n';
  }
}

}  // namespace ptomo
