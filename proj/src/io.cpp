#include "vimflow/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace vimflow {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_field_csv(const ScalarField& f, const std::string& path,
                     const SliceSelector& sel) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  const GridSpec& g = f.grid;
  auto range = [](std::optional<std::size_t> fixed, std::size_t n)
      -> std::pair<std::size_t, std::size_t> {
    if (fixed) {
      if (*fixed >= n) throw IoError("slice index out of range");
      return {*fixed, *fixed + 1};
    }
    return {0, n};
  };
  const auto [a1, b1] = range(sel.i1, g.n1);
  const auto [a2, b2] = range(sel.i2, g.n2);
  const auto [a3, b3] = range(sel.i3, g.n3);
  const auto [a4, b4] = range(sel.it, g.nt);
  out << "x1,x2,x3,t,value\n";
  for (std::size_t i1 = a1; i1 < b1; ++i1)
    for (std::size_t i2 = a2; i2 < b2; ++i2)
      for (std::size_t i3 = a3; i3 < b3; ++i3)
        for (std::size_t it = a4; it < b4; ++it) {
          const std::size_t idx = g.index(i1, i2, i3, it);
          const auto x = g.point(idx);
          out << fmt17(x[0]) << ',' << fmt17(x[1]) << ',' << fmt17(x[2]) << ','
              << fmt17(x[3]) << ',' << fmt17(f.values[idx]) << '\n';
        }
  if (!out) throw IoError("write failed: " + path);
}

ScalarField read_field_csv(const std::string& path, const GridSpec& g) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty CSV: " + path);
  ScalarField f(g);
  std::size_t count = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::size_t pos = line.rfind(',');
    if (pos == std::string::npos) throw IoError("malformed CSV row in " + path);
    if (count >= f.size()) throw IoError("too many rows in " + path);
    f.values[count++] = std::stod(line.substr(pos + 1));
  }
  if (count != f.size()) throw IoError("row count mismatch in " + path);
  return f;
}

void write_report(const ConvergenceReport& rep, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  for (const auto& r : rep.records) {
    out << "{\"n\":" << r.n << ",\"d_u\":" << fmt17(r.d_u)
        << ",\"d_w\":" << fmt17(r.d_w ? *r.d_w : 0.0)
        << ",\"d_p\":" << fmt17(r.d_p)
        << ",\"gamma\":" << (r.gamma ? fmt17(*r.gamma) : std::string("null"))
        << ",\"status\":\"running\"}\n";
  }
  out << "{\"status\":\"" << status_name(rep.status)
      << "\",\"iterations\":" << rep.iterations << "}\n";
  if (!out) throw IoError("write failed: " + path);
}

namespace {

double json_number(const std::string& line, const std::string& key) {
  const std::string needle = "\"" + key + "\":";
  const std::size_t pos = line.find(needle);
  if (pos == std::string::npos) throw IoError("missing key " + key + " in report line");
  const std::string rest = line.substr(pos + needle.size());
  if (rest.rfind("null", 0) == 0) return std::nan("");
  return std::stod(rest);
}

}  // namespace

std::vector<ReportLine> read_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::vector<ReportLine> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find("\"d_u\"") == std::string::npos) continue;  // summary line
    ReportLine r;
    r.n = std::size_t(json_number(line, "n"));
    r.d_u = json_number(line, "d_u");
    r.d_w = json_number(line, "d_w");
    r.d_p = json_number(line, "d_p");
    const double gm = json_number(line, "gamma");
    if (!std::isnan(gm)) r.gamma = gm;
    lines.push_back(r);
  }
  return lines;
}

void write_manifest(const RunManifest& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "{\n"
      << "  \"config_hash\": \"" << m.config_hash << "\",\n"
      << "  \"command\": \"" << m.command << "\",\n"
      << "  \"grid\": [" << m.grid.n1 << ", " << m.grid.n2 << ", " << m.grid.n3 << ", "
      << m.grid.nt << "],\n"
      << "  \"spacing\": [" << fmt17(m.grid.h1) << ", " << fmt17(m.grid.h2) << ", "
      << fmt17(m.grid.h3) << ", " << fmt17(m.grid.dt) << "],\n"
      << "  \"status\": \"" << m.status << "\",\n"
      << "  \"iterations\": " << m.iterations << ",\n"
      << "  \"final_d\": {\"u\": " << fmt17(m.final_d_u) << ", \"w\": " << fmt17(m.final_d_w)
      << ", \"p\": " << fmt17(m.final_d_p) << "}\n"
      << "}\n";
  if (!out) throw IoError("write failed: " + path);
}

std::string config_hash(std::string_view text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)h);
  return buf;
}

// ---------------------------------------------------------------------------
// Config parsing

namespace {

struct Entry {
  std::string value;
  int line = 0;
  mutable bool consumed = false;
};

struct ConfigTable {
  std::map<std::string, std::map<std::string, Entry>> sections;
  std::map<std::string, int> section_lines;

  bool has(const std::string& sec, const std::string& key) const {
    auto s = sections.find(sec);
    return s != sections.end() && s->second.count(key) > 0;
  }

  const Entry* find(const std::string& sec, const std::string& key) const {
    auto s = sections.find(sec);
    if (s == sections.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    k->second.consumed = true;
    return &k->second;
  }

  std::string require(const std::string& sec, const std::string& key) const {
    const Entry* e = find(sec, key);
    if (!e)
      throw ConfigError("missing required key '" + key + "' in section [" + sec + "]",
                        section_lines.count(sec) ? section_lines.at(sec) : 0);
    return e->value;
  }

  std::string get(const std::string& sec, const std::string& key,
                  const std::string& def) const {
    const Entry* e = find(sec, key);
    return e ? e->value : def;
  }

  void finish() const {
    for (const auto& [sec, keys] : sections)
      for (const auto& [key, e] : keys)
        if (!e.consumed)
          throw ConfigError("unknown key '" + key + "' in section [" + sec + "]", e.line);
  }
};

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

ConfigTable tokenize_config(const std::string& text) {
  static const std::map<std::string, bool> known_sections = {
      {"grid", true},   {"params", true},    {"forcing", true}, {"boundary", true},
      {"initial", true}, {"iteration", true}, {"case", true}};
  ConfigTable tab;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos && line.find('"') == std::string::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("malformed section header", line_no);
      section = trim(line.substr(1, line.size() - 2));
      if (!known_sections.count(section))
        throw ConfigError("unknown section [" + section + "]", line_no);
      tab.section_lines.emplace(section, line_no);
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value", line_no);
    if (section.empty()) throw ConfigError("key outside any section", line_no);
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    if (key.empty()) throw ConfigError("empty key", line_no);
    auto& sec = tab.sections[section];
    if (sec.count(key))
      throw ConfigError("duplicate key '" + key + "' in section [" + section + "]",
                        line_no);
    sec[key] = Entry{value, line_no, false};
  }
  return tab;
}

double to_number(const ConfigTable& tab, const std::string& sec, const std::string& key,
                 std::optional<double> def = std::nullopt) {
  const Entry* e = tab.find(sec, key);
  if (!e) {
    if (def) return *def;
    throw ConfigError("missing required key '" + key + "' in section [" + sec + "]",
                      tab.section_lines.count(sec) ? tab.section_lines.at(sec) : 0);
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(e->value, &used);
    if (used != e->value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "' is not a number: '" + e->value + "'", e->line);
  }
}

Expr to_expr(const ConfigTable& tab, const std::string& sec, const std::string& key,
             const std::string& def) {
  const Entry* e = tab.find(sec, key);
  const std::string text = e ? e->value : def;
  ParseResult r = parse(text);
  if (auto* err = std::get_if<ParseError>(&r))
    throw ConfigError("key '" + key + "': expression error at offset " +
                          std::to_string(err->offset) + ": " + err->message,
                      e ? e->line : 0);
  return std::get<Expr>(r);
}

bool to_bool(const ConfigTable& tab, const std::string& sec, const std::string& key,
             bool def) {
  const Entry* e = tab.find(sec, key);
  if (!e) return def;
  if (e->value == "true") return true;
  if (e->value == "false") return false;
  throw ConfigError("key '" + key + "' must be true or false", e->line);
}

RunConfig parse_config(const std::string& text) {
  const ConfigTable tab = tokenize_config(text);
  RunConfig cfg;
  cfg.raw_text = text;

  GridSpec& g = cfg.prob.grid;
  g.n1 = std::size_t(to_number(tab, "grid", "n1"));
  g.n2 = std::size_t(to_number(tab, "grid", "n2"));
  g.n3 = std::size_t(to_number(tab, "grid", "n3"));
  g.nt = std::size_t(to_number(tab, "grid", "nt"));
  g.h1 = to_number(tab, "grid", "h1");
  g.h2 = to_number(tab, "grid", "h2");
  g.h3 = to_number(tab, "grid", "h3");
  g.dt = to_number(tab, "grid", "dt");
  g.origin = {to_number(tab, "grid", "x1_0", 0.0), to_number(tab, "grid", "x2_0", 0.0),
              to_number(tab, "grid", "x3_0", 0.0), to_number(tab, "grid", "t_0", 0.0)};
  g.validate();

  const Entry* ekind = tab.find("params", "kind");
  const std::string kind = ekind ? ekind->value : "navier_stokes";
  if (kind == "navier_stokes")
    cfg.prob.kind = ProblemKind::NavierStokes;
  else if (kind == "micropolar")
    cfg.prob.kind = ProblemKind::Micropolar;
  else
    throw ConfigError("kind must be navier_stokes or micropolar", ekind->line);
  FluidParams& prm = cfg.prob.params;
  prm.nu = to_number(tab, "params", "nu");
  const bool micropolar = cfg.prob.kind == ProblemKind::Micropolar;
  prm.nu_r = to_number(tab, "params", "nu_r",
                       micropolar ? std::optional<double>{} : std::optional<double>{0.0});
  if (micropolar) {
    prm.c0 = to_number(tab, "params", "c0");
    prm.ca = to_number(tab, "params", "ca");
    prm.cd = to_number(tab, "params", "cd");
  }
  prm.validate(cfg.prob.kind);

  const char* fkeys[3] = {"f1", "f2", "f3"};
  const char* mkeys[3] = {"m1", "m2", "m3"};
  const char* gkeys[3] = {"g1", "g2", "g3"};
  const char* qkeys[3] = {"q1", "q2", "q3"};
  const char* ukeys[3] = {"u1", "u2", "u3"};
  const char* wkeys[3] = {"w1", "w2", "w3"};
  for (int i = 0; i < 3; ++i) {
    cfg.prob.force[i] = to_expr(tab, "forcing", fkeys[i], "0");
    cfg.prob.dirichlet_u[i] = to_expr(tab, "boundary", gkeys[i], "0");
    cfg.prob.initial_u[i] = to_expr(tab, "initial", ukeys[i], "0");
  }
  if (micropolar) {
    std::array<Expr, 3> t, q, w0;
    for (int i = 0; i < 3; ++i) {
      t[i] = to_expr(tab, "forcing", mkeys[i], "0");
      q[i] = to_expr(tab, "boundary", qkeys[i], "0");
      w0[i] = to_expr(tab, "initial", wkeys[i], "0");
    }
    cfg.prob.torque = t;
    cfg.prob.dirichlet_w = q;
    cfg.prob.initial_w = w0;
  }

  IterationConfig& it = cfg.iter;
  const Entry* edir = tab.find("iteration", "direction");
  const std::string dir = edir ? edir->value : "x1";
  if (dir == "x1") it.direction = Axis::X1;
  else if (dir == "x2") it.direction = Axis::X2;
  else if (dir == "x3") it.direction = Axis::X3;
  else throw ConfigError("direction must be x1, x2 or x3", edir->line);
  it.max_iters = std::size_t(to_number(tab, "iteration", "max_iters", 100.0));
  it.tol = to_number(tab, "iteration", "tol", 1e-8);
  const Entry* enorm = tab.find("iteration", "norm");
  const std::string nk = enorm ? enorm->value : "l2";
  if (nk == "l2") it.norm_kind = NormKind::L2;
  else if (nk == "linf") it.norm_kind = NormKind::Linf;
  else throw ConfigError("norm must be l2 or linf", enorm->line);
  it.omega = to_number(tab, "iteration", "omega", 1.0);
  it.divergence_window = std::size_t(to_number(tab, "iteration", "divergence_window", 5.0));
  const Entry* enf = tab.find("iteration", "neumann");
  const std::string nf = enf ? enf->value : "viscous";
  if (nf == "viscous") it.neumann_form = NeumannForm::Viscous;
  else if (nf == "full") it.neumann_form = NeumannForm::Full;
  else throw ConfigError("neumann must be viscous or full", enf->line);
  it.impose_pressure_neumann = to_bool(tab, "iteration", "impose_pressure_neumann", false);
  it.validate();

  if (tab.sections.count("case")) {
    ManufacturedCase mc;
    mc.name = tab.get("case", "name", "case");
    mc.kind = cfg.prob.kind;
    mc.params = prm;
    mc.grid = g;
    for (int i = 0; i < 3; ++i) mc.exact_u[i] = to_expr(tab, "case", ukeys[i], "0");
    mc.exact_p = to_expr(tab, "case", "p", "0");
    if (micropolar) {
      std::array<Expr, 3> w;
      for (int i = 0; i < 3; ++i) w[i] = to_expr(tab, "case", wkeys[i], "0");
      mc.exact_w = w;
    }
    mc.rungs = std::size_t(to_number(tab, "case", "rungs", 1.0));
    mc.validate();
    cfg.mms = std::move(mc);
  }

  tab.finish();
  cfg.prob.validate();
  return cfg;
}

}  // namespace

RunConfig read_config_text(const std::string& text) { return parse_config(text); }

RunConfig read_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace vimflow
