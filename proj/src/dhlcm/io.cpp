#include "io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace dhlcm {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::string prepared = line;
  for (char& c : prepared)
    if (c == ',' || c == '\t' || c == '\r') c = ' ';
  std::vector<std::string> tokens;
  std::istringstream ss(prepared);
  std::string tok;
  while (ss >> tok) tokens.push_back(tok);
  return tokens;
}

bool parse_number(const std::string& tok, double& out) {
  char* end = nullptr;
  errno = 0;
  out = std::strtod(tok.c_str(), &end);
  return errno == 0 && end == tok.c_str() + tok.size() && !tok.empty();
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open \"" + path + "\" for reading");
  return in;
}

std::ofstream open_out_or_throw(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open \"" + path + "\" for writing");
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Matrix read_dense_matrix(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  size_t line_no = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    std::vector<double> row;
    row.reserve(tokens.size());
    bool numeric = true;
    for (const auto& tok : tokens) {
      double v;
      if (!parse_number(tok, v)) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (first_content) {  // header line
        first_content = false;
        continue;
      }
      std::ostringstream msg;
      msg << "\"" << path << "\" line " << line_no << ": non-numeric value";
      throw IoError(msg.str());
    }
    first_content = false;
    if (!rows.empty() && row.size() != rows.front().size()) {
      std::ostringstream msg;
      msg << "\"" << path << "\" line " << line_no << ": expected "
          << rows.front().size() << " columns, got " << row.size();
      throw IoError(msg.str());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("\"" + path + "\" contains no data rows");

  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (size_t r = 0; r < rows.size(); ++r)
    for (size_t c = 0; c < rows.front().size(); ++c)
      m(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
  return m;
}

ObservationMatrix read_observation_matrix(const std::string& path,
                                          const ModelFamily& family) {
  ObservationMatrix obs{read_dense_matrix(path), family};
  validate(obs);
  return obs;
}

Labels read_labels(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  Labels labels;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    double v;
    if (tokens.size() != 1 || !parse_number(tokens.front(), v) ||
        v != static_cast<long>(v) || v < 1) {
      std::ostringstream msg;
      msg << "\"" << path << "\" line " << line_no
          << ": expected a single 1-based integer label";
      throw IoError(msg.str());
    }
    labels.push_back(static_cast<int>(v) - 1);
  }
  if (labels.empty()) throw IoError("\"" + path + "\" contains no labels");
  return labels;
}

Vector read_vector(const std::string& path) {
  const Matrix m = read_dense_matrix(path);
  if (m.cols() != 1 && m.rows() != 1)
    throw IoError("\"" + path + "\" is not a single row or column of numbers");
  if (m.cols() == 1) return m.col(0);
  return m.row(0).transpose();
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
  std::ofstream out = open_out_or_throw(path);
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing \"" + path + "\"");
}

void write_labels(const std::string& path, const Labels& labels) {
  std::ofstream out = open_out_or_throw(path);
  for (int l : labels) out << (l + 1) << '\n';
  if (!out) throw IoError("failed writing \"" + path + "\"");
}

void write_vector(const std::string& path, const Vector& v) {
  std::ofstream out = open_out_or_throw(path);
  for (Index i = 0; i < v.size(); ++i) out << format_double(v(i)) << '\n';
  if (!out) throw IoError("failed writing \"" + path + "\"");
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out = open_out_or_throw(path);
  out << text;
  if (!out) throw IoError("failed writing \"" + path + "\"");
}

}  // namespace dhlcm
