#include "pqlab/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace pqlab {

namespace {

struct Value {
  std::string text;
  int line = 0;
  int column = 0;
  bool used = false;
};

using Section = std::map<std::string, Value>;

std::string trim(const std::string& s, size_t& lead) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) {
    lead = s.size();
    return "";
  }
  size_t b = s.find_last_not_of(" \t\r");
  lead = a;
  return s.substr(a, b - a + 1);
}

const std::map<std::string, std::set<std::string>> kKeys = {
    {"family",
     {"kind", "p", "q", "tau", "b", "a", "a_lipschitz", "exponent", "exponent_lipschitz", "a11", "a11_lipschitz",
      "a12", "a12_lipschitz", "a22", "a22_lipschitz", "base", "base_lipschitz", "c1", "c2", "c3"}},
    {"grid", {"N", "side", "x0", "y0", "boundary"}},
    {"ball", {"center", "rho", "R"}},
    {"schedule", {"mode", "n", "omega", "two_star", "alpha", "beta", "gamma", "delta", "nu", "mu", "theta"}},
    {"sweep", {"amplitudes", "pairs"}},
    {"solver", {"max_iter", "tolerance", "armijo", "backtrack", "epsilon"}},
    {"check", {"directions", "tol", "fd_tol"}},
    {"run", {"seed"}},
};

class Reader {
 public:
  explicit Reader(std::map<std::string, Section>& s) : secs_(s) {}

  const Value* find(const std::string& sec, const std::string& key) {
    auto it = secs_.find(sec);
    if (it == secs_.end()) return nullptr;
    auto jt = it->second.find(key);
    if (jt == it->second.end()) return nullptr;
    jt->second.used = true;
    return &jt->second;
  }

  const Value& need(const std::string& sec, const std::string& key, const std::string& why = "") {
    const Value* v = find(sec, key);
    if (!v) {
      int line = 0;
      auto it = header_line.find(sec);
      if (it != header_line.end()) line = it->second;
      throw ParseError("[" + sec + "] missing required key '" + key + "'" + (why.empty() ? "" : " (" + why + ")"),
                       line, 1);
    }
    return *v;
  }

  static double number(const Value& v) {
    double d = 0.0;
    const char* b = v.text.data();
    const char* e = b + v.text.size();
    auto r = std::from_chars(b, e, d);
    if (r.ec != std::errc() || r.ptr != e) throw ParseError("expected a number, got '" + v.text + "'", v.line, v.column);
    return d;
  }

  static long integer(const Value& v) {
    long d = 0;
    const char* b = v.text.data();
    const char* e = b + v.text.size();
    auto r = std::from_chars(b, e, d);
    if (r.ec != std::errc() || r.ptr != e) throw ParseError("expected an integer, got '" + v.text + "'", v.line, v.column);
    return d;
  }

  static std::vector<double> list(const Value& v) {
    std::vector<double> out;
    size_t pos = 0;
    while (pos <= v.text.size()) {
      size_t comma = v.text.find(',', pos);
      if (comma == std::string::npos) comma = v.text.size();
      size_t lead = 0;
      std::string item = trim(v.text.substr(pos, comma - pos), lead);
      Value iv{item, v.line, v.column + static_cast<int>(pos + lead)};
      if (item.empty()) throw ParseError("empty list item", v.line, iv.column);
      out.push_back(number(iv));
      pos = comma + 1;
    }
    return out;
  }

  std::optional<double> opt_number(const std::string& sec, const std::string& key) {
    const Value* v = find(sec, key);
    return v ? std::optional<double>(number(*v)) : std::nullopt;
  }

  double number_or(const std::string& sec, const std::string& key, double dflt) {
    return opt_number(sec, key).value_or(dflt);
  }

  Coefficient coefficient(const std::string& sec, const std::string& key, std::optional<double> dflt) {
    const Value* v = dflt ? find(sec, key) : &need(sec, key);
    if (!v) return Coefficient::constant(*dflt);
    Expr e = Expr::parse(v->text, v->line, v->column);
    const Value* L = find(sec, key + "_lipschitz");
    if (!L && !e.is_constant())
      throw ParseError("[" + sec + "] non-constant '" + key + "' needs '" + key + "_lipschitz'", v->line, v->column);
    double lip = L ? number(*L) : 0.0;
    if (lip < 0.0) throw ParseError("Lipschitz constant must be >= 0", L->line, L->column);
    return {e, lip};
  }

  std::map<std::string, int> header_line;

 private:
  std::map<std::string, Section>& secs_;
};

Family build_family(Reader& rd) {
  const Value& kv = rd.need("family", "kind");
  std::optional<FamilyKind> kind = kind_from_name(kv.text);
  if (!kind) throw ParseError("unknown family kind '" + kv.text + "'", kv.line, kv.column);
  auto num = [&](const std::string& k) { return Reader::number(rd.need("family", k)); };
  try {
    switch (*kind) {
      case FamilyKind::PLaplacian:
        return p_laplacian(num("p"), rd.coefficient("family", "a", 1.0));
      case FamilyKind::Anisotropic: {
        const Value* base = rd.find("family", "base");
        if (base) {
          return anisotropic_power(rd.coefficient("family", "base", std::nullopt), num("p"), num("q"),
                                   rd.opt_number("family", "c1"), rd.opt_number("family", "c2"),
                                   rd.opt_number("family", "c3"));
        }
        return anisotropic(rd.coefficient("family", "a11", 1.0), rd.coefficient("family", "a12", 0.0),
                           rd.coefficient("family", "a22", 1.0), num("q"));
      }
      case FamilyKind::Exponential:
        return exponential(rd.coefficient("family", "a", std::nullopt), rd.number_or("family", "tau", 2.0));
      case FamilyKind::PxLaplacian:
        return px_laplacian(rd.coefficient("family", "exponent", std::nullopt));
      case FamilyKind::LogPxLaplacian:
        return log_px_laplacian(rd.coefficient("family", "exponent", std::nullopt));
      case FamilyKind::DoublePhase:
        return double_phase(num("p"), num("q"), rd.coefficient("family", "a", std::nullopt));
      case FamilyKind::MultiPhase:
        return multi_phase(num("p"), num("q"), rd.coefficient("family", "a", std::nullopt), num("b"));
      case FamilyKind::VeryDegenerate:
        return very_degenerate(num("p"));
    }
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("[family] ") + e.what(), kv.line, kv.column);
  }
  throw ParseError("unsupported family", kv.line, kv.column);
}

}  // namespace

Grid ProblemConfig::grid() const {
  Expr b = boundary;
  return Grid::make(N, side, [b](double x, double y) { return b(x, y); }, x0, y0);
}

Point ProblemConfig::ball_center() const { return center.value_or(Point{x0 + 0.5 * side, y0 + 0.5 * side}); }

ProblemConfig parse_config(const std::string& text) {
  std::map<std::string, Section> secs;
  std::map<std::string, int> header_line;
  std::istringstream is(text);
  std::string raw, current;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    size_t hash = raw.find('#');
    std::string body = hash == std::string::npos ? raw : raw.substr(0, hash);
    size_t lead = 0;
    std::string s = trim(body, lead);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ParseError("unterminated section header", line, static_cast<int>(lead + 1));
      size_t l2 = 0;
      current = trim(s.substr(1, s.size() - 2), l2);
      if (!kKeys.count(current)) throw ParseError("unknown section [" + current + "]", line, static_cast<int>(lead + 2));
      if (header_line.count(current)) throw ParseError("duplicate section [" + current + "]", line, static_cast<int>(lead + 1));
      header_line[current] = line;
      secs[current];
      continue;
    }
    size_t eq = body.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line, static_cast<int>(lead + 1));
    if (current.empty()) throw ParseError("key outside of any section", line, static_cast<int>(lead + 1));
    size_t klead = 0, vlead = 0;
    std::string key = trim(body.substr(0, eq), klead);
    std::string val = trim(body.substr(eq + 1), vlead);
    int kcol = static_cast<int>(klead + 1), vcol = static_cast<int>(eq + 1 + vlead + 1);
    if (key.empty()) throw ParseError("empty key", line, kcol);
    if (!kKeys.at(current).count(key)) throw ParseError("unknown key '" + key + "' in [" + current + "]", line, kcol);
    if (val.empty()) throw ParseError("empty value for '" + key + "'", line, vcol);
    if (secs[current].count(key)) throw ParseError("duplicate key '" + key + "'", line, kcol);
    secs[current][key] = Value{val, line, vcol};
  }

  Reader rd(secs);
  rd.header_line = header_line;
  ProblemConfig c;
  c.family = build_family(rd);

  c.N = static_cast<int>(rd.find("grid", "N") ? Reader::integer(*rd.find("grid", "N")) : 33);
  c.side = rd.number_or("grid", "side", 1.0);
  c.x0 = rd.number_or("grid", "x0", 0.0);
  c.y0 = rd.number_or("grid", "y0", 0.0);
  if (const Value* v = rd.find("grid", "boundary")) c.boundary = Expr::parse(v->text, v->line, v->column);
  if (c.N < 8) {
    const Value* v = rd.find("grid", "N");
    throw ParseError("[grid] N must be >= 8", v ? v->line : 0, v ? v->column : 1);
  }
  if (!(c.side > 0.0)) throw ParseError("[grid] side must be positive", rd.find("grid", "side")->line, 1);

  if (const Value* v = rd.find("ball", "center")) {
    std::vector<double> xy = Reader::list(*v);
    if (xy.size() != 2) throw ParseError("center needs two coordinates", v->line, v->column);
    c.center = Point{xy[0], xy[1]};
  }
  c.rho = rd.number_or("ball", "rho", 0.2 * c.side);
  c.R = rd.number_or("ball", "R", 0.4 * c.side);

  ScheduleSpec& s = c.schedule;
  if (const Value* v = rd.find("schedule", "mode")) {
    if (v->text == "auto")
      s.automatic = true;
    else if (v->text == "explicit")
      s.automatic = false;
    else
      throw ParseError("schedule mode must be 'auto' or 'explicit'", v->line, v->column);
  }
  if (const Value* v = rd.find("schedule", "n")) s.n = static_cast<int>(Reader::integer(*v));
  if (s.n < 2) throw ParseError("[schedule] n must be >= 2", rd.find("schedule", "n")->line, 1);
  s.omega = rd.number_or("schedule", "omega", 0.01);
  s.two_star = rd.opt_number("schedule", "two_star");
  s.alpha = rd.opt_number("schedule", "alpha");
  s.beta = rd.opt_number("schedule", "beta");
  s.gamma = rd.opt_number("schedule", "gamma");
  s.delta = rd.opt_number("schedule", "delta");
  s.nu = rd.opt_number("schedule", "nu");
  s.theta = rd.opt_number("schedule", "theta");
  if (const Value* v = rd.find("schedule", "mu")) {
    if (v->text == "inf" || v->text == "unbounded")
      s.mu_unbounded = true;
    else
      s.mu = Reader::number(*v);
  }
  if (!s.automatic) {
    rd.need("schedule", "alpha", "explicit schedule");
    if (s.beta && !s.gamma) rd.need("schedule", "gamma", "beta given");
    if (s.gamma && !s.beta) rd.need("schedule", "beta", "gamma given");
  }

  if (const Value* v = rd.find("sweep", "amplitudes")) c.sweep.amplitudes = Reader::list(*v);
  if (const Value* v = rd.find("sweep", "pairs")) {
    std::vector<double> flat = Reader::list(*v);
    if (flat.size() % 2) throw ParseError("pairs need an even count: rho1, R1, rho2, R2, ...", v->line, v->column);
    for (size_t i = 0; i < flat.size(); i += 2) c.sweep.pairs.push_back({flat[i], flat[i + 1]});
  }

  if (const Value* v = rd.find("solver", "max_iter")) c.solver.max_iter = static_cast<int>(Reader::integer(*v));
  c.solver.tolerance = rd.number_or("solver", "tolerance", c.solver.tolerance);
  c.solver.armijo = rd.number_or("solver", "armijo", c.solver.armijo);
  c.solver.backtrack = rd.number_or("solver", "backtrack", c.solver.backtrack);
  c.solver.epsilon = rd.number_or("solver", "epsilon", c.solver.epsilon);
  if (!(c.solver.tolerance > 0.0)) throw ParseError("[solver] tolerance must be positive", rd.find("solver", "tolerance")->line, 1);
  if (!(c.solver.backtrack > 0.0 && c.solver.backtrack < 1.0))
    throw ParseError("[solver] backtrack must be in (0, 1)", rd.find("solver", "backtrack")->line, 1);

  if (const Value* v = rd.find("check", "directions")) c.check.directions = static_cast<int>(Reader::integer(*v));
  c.check.tol = rd.number_or("check", "tol", c.check.tol);
  c.check.fd_tol = rd.number_or("check", "fd_tol", c.check.fd_tol);
  if (const Value* v = rd.find("run", "seed")) c.seed = static_cast<std::uint64_t>(Reader::integer(*v));

  for (auto& [name, sec] : secs)
    for (auto& [key, v] : sec)
      if (!v.used) throw ParseError("key '" + key + "' is not used by family kind", v.line, v.column);
  return c;
}

ProblemConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

}  // namespace pqlab
