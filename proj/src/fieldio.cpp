#include "obsdual/fieldio.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "obsdual/errors.hpp"

namespace obsdual {

std::string format_g15(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io_error, "cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::io_error, "cannot write '" + path + "'");
  out << content;
  if (!out) fail(errc::io_error, "write failed for '" + path + "'");
}

namespace {

// Rows are "index,coords...,payload..."; the reader keeps only the payload.
std::vector<std::vector<double>> read_rows(const std::string& path, int expect_rows,
                                           int payload) {
  std::ifstream in(path);
  if (!in) fail(errc::io_error, "cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (!std::isdigit(static_cast<unsigned char>(line[0])) && line[0] != '-' &&
        line[0] != '+')
      continue; // header or comment
    std::vector<double> cols;
    std::istringstream is(line);
    std::string tok;
    while (std::getline(is, tok, ',')) {
      try {
        cols.push_back(std::stod(tok));
      } catch (...) {
        fail(errc::io_error,
             path + ":" + std::to_string(lineno) + ": bad number '" + tok + "'");
      }
    }
    if (static_cast<int>(cols.size()) < payload + 1)
      fail(errc::io_error, path + ":" + std::to_string(lineno) + ": too few columns");
    rows.push_back(std::vector<double>(cols.end() - payload, cols.end()));
  }
  if (static_cast<int>(rows.size()) != expect_rows)
    fail(errc::io_error, path + ": expected " + std::to_string(expect_rows) +
                             " data rows, found " + std::to_string(rows.size()));
  return rows;
}

} // namespace

void write_scalar_csv(const std::string& path, const ScalarField& f) {
  const Grid& g = f.grid;
  std::ostringstream os;
  os << (g.dim == 1 ? "node,x,value\n" : "node,x,y,value\n");
  for (int id = 0; id < g.node_count(); ++id) {
    auto xy = g.node_coord(id);
    os << id << ',' << format_g15(xy[0]);
    if (g.dim == 2) os << ',' << format_g15(xy[1]);
    os << ',' << format_g15(f.v[id]) << '\n';
  }
  write_text_file(path, os.str());
}

ScalarField read_scalar_csv(const std::string& path, const Grid& grid) {
  auto rows = read_rows(path, grid.node_count(), 1);
  ScalarField f(grid);
  for (int id = 0; id < grid.node_count(); ++id) f.v[id] = rows[id][0];
  return f;
}

void write_vector_csv(const std::string& path, const VectorField& f) {
  const Grid& g = f.grid;
  std::ostringstream os;
  os << (g.dim == 1 ? "cell,x,sx\n" : "cell,x,y,sx,sy\n");
  for (int c = 0; c < g.cell_count(); ++c) {
    auto xy = g.cell_center(c);
    const double* s = f.at(c);
    os << c << ',' << format_g15(xy[0]);
    if (g.dim == 2) os << ',' << format_g15(xy[1]);
    os << ',' << format_g15(s[0]);
    if (g.dim == 2) os << ',' << format_g15(s[1]);
    os << '\n';
  }
  write_text_file(path, os.str());
}

VectorField read_vector_csv(const std::string& path, const Grid& grid) {
  auto rows = read_rows(path, grid.cell_count(), grid.dim);
  VectorField f(grid);
  for (int c = 0; c < grid.cell_count(); ++c) {
    double* s = f.at(c);
    s[0] = rows[c][0];
    if (grid.dim == 2) s[1] = rows[c][1];
  }
  return f;
}

void write_weights_csv(const std::string& path, const DivergenceWeights& w) {
  const Grid& g = w.grid;
  std::ostringstream os;
  os << (g.dim == 1 ? "node,x,interior,w\n" : "node,x,y,interior,w\n");
  for (int id = 0; id < g.node_count(); ++id) {
    auto xy = g.node_coord(id);
    os << id << ',' << format_g15(xy[0]);
    if (g.dim == 2) os << ',' << format_g15(xy[1]);
    os << ',' << (g.is_boundary_node(id) ? 0 : 1) << ',' << format_g15(w.w[id]) << '\n';
  }
  write_text_file(path, os.str());
}

void JsonWriter::separate() {
  if (pending_key_) {
    pending_key_ = false;
    return;
  }
  if (!first_.empty()) {
    if (!first_.back()) out_ += ',';
    first_.back() = false;
  }
}

JsonWriter& JsonWriter::begin_object() {
  separate();
  out_ += '{';
  first_.push_back(true);
  return *this;
}

JsonWriter& JsonWriter::end_object() {
  out_ += '}';
  first_.pop_back();
  return *this;
}

JsonWriter& JsonWriter::begin_array() {
  separate();
  out_ += '[';
  first_.push_back(true);
  return *this;
}

JsonWriter& JsonWriter::end_array() {
  out_ += ']';
  first_.pop_back();
  return *this;
}

JsonWriter& JsonWriter::key(const std::string& k) {
  value(k);
  pending_key_ = true;
  out_ += ':';
  return *this;
}

JsonWriter& JsonWriter::value(double x) {
  if (!std::isfinite(x)) return value(x > 0 ? "inf" : (x < 0 ? "-inf" : "nan"));
  separate();
  out_ += format_g15(x);
  return *this;
}

JsonWriter& JsonWriter::value(int x) { return value(static_cast<long long>(x)); }

JsonWriter& JsonWriter::value(long long x) {
  separate();
  out_ += std::to_string(x);
  return *this;
}

JsonWriter& JsonWriter::value(unsigned long long x) {
  separate();
  out_ += std::to_string(x);
  return *this;
}

JsonWriter& JsonWriter::value(bool x) {
  separate();
  out_ += x ? "true" : "false";
  return *this;
}

JsonWriter& JsonWriter::value(const std::string& s) {
  separate();
  out_ += '"';
  for (char c : s) {
    switch (c) {
      case '"': out_ += "\\\""; break;
      case '\\': out_ += "\\\\"; break;
      case '\n': out_ += "\\n"; break;
      case '\r': out_ += "\\r"; break;
      case '\t': out_ += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out_ += buf;
        } else {
          out_ += c;
        }
    }
  }
  out_ += '"';
  return *this;
}

JsonWriter& JsonWriter::value(const char* s) { return value(std::string(s)); }

} // namespace obsdual
