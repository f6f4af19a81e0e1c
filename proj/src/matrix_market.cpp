#include "seqkrylov/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace seqkrylov {

namespace {

[[noreturn]] void fail(const std::string& path, long line,
                       const std::string& msg) {
  throw ParseError(path + ":" + std::to_string(line) + ": " + msg);
}

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string t;
  while (ss >> t) out.push_back(t);
  return out;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool parse_index(const std::string& t, Index* out) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(t, &pos);
    if (pos != t.size()) return false;
    *out = static_cast<Index>(v);
    return true;
  } catch (...) {
    return false;
  }
}

bool parse_real(const std::string& t, double* out) {
  const char* begin = t.c_str();
  char* end = nullptr;
  *out = std::strtod(begin, &end);
  // Entries must be finite reals; "nan"/"inf" are rejected.
  return end == begin + t.size() && t.size() > 0 && std::isfinite(*out);
}

struct Header {
  bool symmetric = false;
  bool array = false;
};

Header read_header(std::ifstream& in, const std::string& path, long* line_no) {
  std::string line;
  if (!std::getline(in, line)) fail(path, 1, "empty file");
  *line_no = 1;
  auto t = tokens(line);
  if (t.size() != 5 || t[0] != "%%MatrixMarket" || lower(t[1]) != "matrix")
    fail(path, 1, "malformed MatrixMarket header");
  Header h;
  const std::string format = lower(t[2]);
  if (format == "coordinate")
    h.array = false;
  else if (format == "array")
    h.array = true;
  else
    fail(path, 1, "unsupported format '" + t[2] + "'");
  if (lower(t[3]) != "real")
    fail(path, 1, "unsupported field '" + t[3] + "' (only real)");
  const std::string sym = lower(t[4]);
  if (sym == "symmetric")
    h.symmetric = true;
  else if (sym == "general")
    h.symmetric = false;
  else
    fail(path, 1, "unsupported symmetry '" + t[4] + "'");
  return h;
}

// First non-comment, non-blank line after the header.
bool next_data_line(std::ifstream& in, std::string* line, long* line_no) {
  while (std::getline(in, *line)) {
    ++*line_no;
    if (line->empty()) continue;
    const std::size_t pos = line->find_first_not_of(" \t\r");
    if (pos == std::string::npos) continue;
    if ((*line)[pos] == '%') continue;
    return true;
  }
  return false;
}

}  // namespace

SparseMatrix load_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  long line_no = 0;
  const Header h = read_header(in, path, &line_no);
  if (h.array) fail(path, 1, "expected coordinate format for a sparse matrix");

  std::string line;
  if (!next_data_line(in, &line, &line_no))
    fail(path, line_no, "missing size line");
  auto t = tokens(line);
  Index rows = 0, cols = 0, nnz = 0;
  if (t.size() != 3 || !parse_index(t[0], &rows) || !parse_index(t[1], &cols) ||
      !parse_index(t[2], &nnz) || rows < 0 || cols < 0 || nnz < 0)
    fail(path, line_no, "malformed size line");

  std::vector<Triplet> entries;
  entries.reserve(h.symmetric ? 2 * nnz : nnz);
  for (Index e = 0; e < nnz; ++e) {
    if (!next_data_line(in, &line, &line_no))
      fail(path, line_no, "unexpected end of file, expected " +
                              std::to_string(nnz) + " entries");
    t = tokens(line);
    Index i = 0, j = 0;
    double v = 0.0;
    if (t.size() != 3 || !parse_index(t[0], &i) || !parse_index(t[1], &j))
      fail(path, line_no, "malformed entry line");
    if (!parse_real(t[2], &v)) fail(path, line_no, "non-real value field");
    if (i < 1 || i > rows || j < 1 || j > cols)
      fail(path, line_no, "index out of bounds: (" + std::to_string(i) + ", " +
                              std::to_string(j) + ") in " +
                              std::to_string(rows) + "x" +
                              std::to_string(cols));
    entries.push_back({i - 1, j - 1, v});
    if (h.symmetric && i != j) entries.push_back({j - 1, i - 1, v});
  }
  return SparseMatrix::from_triplets(rows, cols, entries, h.symmetric);
}

void save_matrix_market(const std::string& path, const SparseMatrix& a) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open file for writing");
  const bool sym = a.symmetric();
  out << "%%MatrixMarket matrix coordinate real "
      << (sym ? "symmetric" : "general") << "\n";

  std::vector<std::string> lines;
  char buf[96];
  Index count = 0;
  for (Index j = 0; j < a.cols(); ++j) {
    auto rows = a.col_rows(j);
    auto vals = a.col_vals(j);
    for (std::size_t p = 0; p < rows.size(); ++p) {
      if (sym && rows[p] < j) continue;  // store the lower triangle only
      std::snprintf(buf, sizeof(buf), "%lld %lld %.17g",
                    static_cast<long long>(rows[p] + 1),
                    static_cast<long long>(j + 1), vals[p]);
      lines.emplace_back(buf);
      ++count;
    }
  }
  out << a.rows() << " " << a.cols() << " " << count << "\n";
  for (const auto& l : lines) out << l << "\n";
  if (!out) throw std::runtime_error(path + ": write failed");
}

Vector load_vector(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  long line_no = 0;
  const Header h = read_header(in, path, &line_no);

  std::string line;
  if (!next_data_line(in, &line, &line_no))
    fail(path, line_no, "missing size line");
  auto t = tokens(line);

  if (h.array) {
    Index rows = 0, cols = 0;
    if (t.size() != 2 || !parse_index(t[0], &rows) || !parse_index(t[1], &cols))
      fail(path, line_no, "malformed size line");
    if (cols != 1) fail(path, line_no, "expected a single-column vector");
    Vector v(rows);
    for (Index i = 0; i < rows; ++i) {
      if (!next_data_line(in, &line, &line_no))
        fail(path, line_no, "unexpected end of file");
      double x = 0.0;
      if (!parse_real(line, &x)) {
        auto tt = tokens(line);
        if (tt.size() != 1 || !parse_real(tt[0], &x))
          fail(path, line_no, "non-real value field");
      }
      v[i] = x;
    }
    return v;
  }

  // Coordinate n x 1 also accepted.
  Index rows = 0, cols = 0, nnz = 0;
  if (t.size() != 3 || !parse_index(t[0], &rows) || !parse_index(t[1], &cols) ||
      !parse_index(t[2], &nnz))
    fail(path, line_no, "malformed size line");
  if (cols != 1) fail(path, line_no, "expected a single-column vector");
  Vector v = Vector::Zero(rows);
  for (Index e = 0; e < nnz; ++e) {
    if (!next_data_line(in, &line, &line_no))
      fail(path, line_no, "unexpected end of file");
    t = tokens(line);
    Index i = 0, j = 0;
    double x = 0.0;
    if (t.size() != 3 || !parse_index(t[0], &i) || !parse_index(t[1], &j))
      fail(path, line_no, "malformed entry line");
    if (!parse_real(t[2], &x)) fail(path, line_no, "non-real value field");
    if (i < 1 || i > rows || j != 1) fail(path, line_no, "index out of bounds");
    v[i - 1] += x;
  }
  return v;
}

void save_vector(const std::string& path, const Vector& v) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open file for writing");
  out << "%%MatrixMarket matrix array real general\n";
  out << v.size() << " 1\n";
  char buf[32];
  for (Index i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", v[i]);
    out << buf << "\n";
  }
  if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace seqkrylov
