#include "pqlab/field_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pqlab {

namespace {

std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, int line) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::runtime_error("field file line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

std::string expect_key(std::istream& is, const std::string& key, int line) {
  std::string l;
  if (!std::getline(is, l)) throw std::runtime_error("field file: missing '" + key + "' header");
  std::istringstream ls(l);
  std::string k, v;
  ls >> k >> v;
  if (k != key || v.empty())
    throw std::runtime_error("field file line " + std::to_string(line) + ": expected '" + key + " <value>'");
  return v;
}

}  // namespace

void write_field(std::ostream& os, const DiscreteField& u, const std::string& family) {
  os << "N " << u.N << "\n";
  os << "side " << shortest(u.side) << "\n";
  os << "family " << family << "\n";
  for (int j = 0; j < u.N; ++j) {
    for (int i = 0; i < u.N; ++i) {
      if (i) os << ' ';
      os << shortest(u.at(i, j));
    }
    os << "\n";
  }
}

FieldFile read_field(std::istream& is) {
  FieldFile f;
  int N = std::stoi(expect_key(is, "N", 1));
  if (N < 2) throw std::runtime_error("field file: N must be >= 2");
  f.field.N = N;
  f.field.side = parse_double(expect_key(is, "side", 2), 2);
  f.family = expect_key(is, "family", 3);
  f.field.u.resize(static_cast<size_t>(N) * N);
  for (int j = 0; j < N; ++j) {
    std::string l;
    if (!std::getline(is, l)) throw std::runtime_error("field file: expected " + std::to_string(N) + " rows");
    std::istringstream ls(l);
    std::string tok;
    int i = 0;
    while (ls >> tok) {
      if (i >= N) throw std::runtime_error("field file line " + std::to_string(j + 4) + ": too many values");
      f.field.at(i++, j) = parse_double(tok, j + 4);
    }
    if (i != N) throw std::runtime_error("field file line " + std::to_string(j + 4) + ": too few values");
  }
  return f;
}

void save_field(const std::string& path, const DiscreteField& u, const std::string& family) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_field(os, u, family);
}

FieldFile load_field(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  return read_field(is);
}

}  // namespace pqlab
