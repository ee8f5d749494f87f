#include "dphase/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace dphase {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& section, const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError(section, key, "config: [" + section + "] " + key +
                                        " expects a number, got '" + v + "'");
  }
}

long to_long(const std::string& section, const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    long n = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return n;
  } catch (const std::exception&) {
    throw ConfigError(section, key, "config: [" + section + "] " + key +
                                        " expects an integer, got '" + v + "'");
  }
}

void format_num(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config c;
  bool shape_seen = false;

  std::map<std::string, std::map<std::string, std::function<void(const std::string&)>>> schema;
  auto str = [](std::string& dst) {
    return [&dst](const std::string& v) { dst = v; };
  };
  auto num = [&](const std::string& sec, const std::string& key, double& dst) {
    schema[sec][key] = [&dst, sec, key](const std::string& v) { dst = to_double(sec, key, v); };
  };
  auto integer = [&](const std::string& sec, const std::string& key, int& dst) {
    schema[sec][key] = [&dst, sec, key](const std::string& v) {
      dst = static_cast<int>(to_long(sec, key, v));
    };
  };

  schema["domain"]["shape"] = [&](const std::string& v) {
    if (v != "rect" && v != "disc")
      throw ConfigError("domain", "shape", "config: [domain] shape must be rect or disc");
    c.shape = v;
    shape_seen = true;
  };
  num("domain", "x0", c.x0);
  num("domain", "y0", c.y0);
  num("domain", "x1", c.x1);
  num("domain", "y1", c.y1);
  num("domain", "cx", c.cx);
  num("domain", "cy", c.cy);
  num("domain", "radius", c.radius);
  integer("domain", "nx", c.nx);
  integer("domain", "ny", c.ny);
  integer("domain", "levels", c.levels);
  integer("domain", "n", c.n);
  integer("domain", "sample_grid", c.sample_grid);

  schema["exponents"]["p"] = str(c.p);
  schema["exponents"]["q"] = str(c.q);
  schema["exponents"]["r"] = str(c.r);
  schema["exponents"]["s"] = str(c.s);

  schema["coefficients"]["mu"] = str(c.mu);
  schema["coefficients"]["alpha"] = str(c.alpha);
  schema["coefficients"]["gamma"] = str(c.gamma);

  schema["rhs"]["g"] = str(c.g);
  num("rhs", "nu_x", c.nu_x);
  num("rhs", "nu_y", c.nu_y);
  schema["rhs"]["mode"] = [&](const std::string& v) {
    if (v != "fixed" && v != "convective")
      throw ConfigError("rhs", "mode", "config: [rhs] mode must be fixed or convective");
    c.rhs_mode = v;
  };

  schema["nonlinearity"]["family"] = [&](const std::string& v) {
    if (v != "paper_f1" && v != "expression")
      throw ConfigError("nonlinearity", "family",
                        "config: [nonlinearity] family must be paper_f1 or expression");
    c.family = v;
  };
  num("nonlinearity", "c1", c.c1);
  num("nonlinearity", "c2", c.c2);
  schema["nonlinearity"]["s"] = str(c.nonlin_s);
  schema["nonlinearity"]["f"] = str(c.f);

  num("solver", "tol_res", c.tol_res);
  num("solver", "tol_fix", c.tol_fix);
  integer("solver", "max_iters", c.max_iters);
  integer("solver", "max_outer", c.max_outer);
  num("solver", "damping", c.damping);
  num("solver", "lambda", c.lambda);
  num("solver", "lambda0", c.lambda0);
  schema["solver"]["seed"] = [&](const std::string& v) {
    c.rng_seed = static_cast<unsigned long>(to_long("solver", "seed", v));
  };
  num("solver", "cutoff_r_lambda", c.cutoff_r_lambda);
  num("solver", "cutoff_radius", c.cutoff_radius);
  integer("solver", "embedding_trials", c.embedding_trials);

  schema["output"]["report"] = str(c.report_path);
  schema["output"]["solution_csv"] = str(c.solution_csv);
  schema["output"]["trace_csv"] = str(c.trace_csv);
  schema["output"]["mesh_csv"] = str(c.mesh_csv);
  schema["output"]["props_csv"] = str(c.props_csv);

  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string body = line;
    std::size_t hash = body.find('#');
    if (hash != std::string::npos) body = body.substr(0, hash);
    body = trim(body);
    if (body.empty()) continue;

    if (body.front() == '[') {
      if (body.back() != ']')
        throw ConfigError(section, "", "config line " + std::to_string(lineno) +
                                            ": unterminated section header");
      section = trim(body.substr(1, body.size() - 2));
      if (!schema.count(section))
        throw ConfigError(section, "", "config line " + std::to_string(lineno) +
                                            ": unknown section [" + section + "]");
      continue;
    }

    std::size_t eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError(section, "", "config line " + std::to_string(lineno) +
                                          ": expected key = value");
    std::string key = trim(body.substr(0, eq));
    std::string value = trim(body.substr(eq + 1));
    if (section.empty())
      throw ConfigError("", key, "config line " + std::to_string(lineno) +
                                      ": key '" + key + "' outside any [section]");
    auto sec_it = schema.find(section);
    auto key_it = sec_it->second.find(key);
    if (key_it == sec_it->second.end())
      throw ConfigError(section, key, "config line " + std::to_string(lineno) +
                                           ": unknown key '" + key + "' in [" + section + "]");
    key_it->second(value);
  }

  if (!shape_seen)
    throw ConfigError("domain", "shape", "config: missing required key [domain] shape");
  return c;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream f(path);
  if (!f)
    throw ConfigError("", "", "config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

std::string Config::to_text() const {
  std::string o;
  o += "[domain]\n";
  o += "shape = " + shape + "\n";
  if (shape == "rect") {
    o += "x0 = "; format_num(o, x0); o += "\n";
    o += "y0 = "; format_num(o, y0); o += "\n";
    o += "x1 = "; format_num(o, x1); o += "\n";
    o += "y1 = "; format_num(o, y1); o += "\n";
    o += "nx = " + std::to_string(nx) + "\n";
    o += "ny = " + std::to_string(ny) + "\n";
  } else {
    o += "cx = "; format_num(o, cx); o += "\n";
    o += "cy = "; format_num(o, cy); o += "\n";
    o += "radius = "; format_num(o, radius); o += "\n";
    o += "levels = " + std::to_string(levels) + "\n";
  }
  o += "n = " + std::to_string(n) + "\n";
  o += "sample_grid = " + std::to_string(sample_grid) + "\n";
  o += "\n[exponents]\n";
  o += "p = " + p + "\n";
  o += "q = " + q + "\n";
  o += "r = " + r + "\n";
  o += "s = " + s + "\n";
  o += "\n[coefficients]\n";
  o += "mu = " + mu + "\n";
  o += "alpha = " + alpha + "\n";
  o += "gamma = " + gamma + "\n";
  o += "\n[rhs]\n";
  o += "g = " + g + "\n";
  o += "nu_x = "; format_num(o, nu_x); o += "\n";
  o += "nu_y = "; format_num(o, nu_y); o += "\n";
  o += "mode = " + rhs_mode + "\n";
  o += "\n[nonlinearity]\n";
  o += "family = " + family + "\n";
  o += "c1 = "; format_num(o, c1); o += "\n";
  o += "c2 = "; format_num(o, c2); o += "\n";
  if (!nonlin_s.empty()) o += "s = " + nonlin_s + "\n";
  if (!f.empty()) o += "f = " + f + "\n";
  o += "\n[solver]\n";
  o += "tol_res = "; format_num(o, tol_res); o += "\n";
  o += "tol_fix = "; format_num(o, tol_fix); o += "\n";
  o += "max_iters = " + std::to_string(max_iters) + "\n";
  o += "max_outer = " + std::to_string(max_outer) + "\n";
  o += "damping = "; format_num(o, damping); o += "\n";
  o += "lambda = "; format_num(o, lambda); o += "\n";
  o += "lambda0 = "; format_num(o, lambda0); o += "\n";
  o += "seed = " + std::to_string(rng_seed) + "\n";
  o += "cutoff_r_lambda = "; format_num(o, cutoff_r_lambda); o += "\n";
  o += "cutoff_radius = "; format_num(o, cutoff_radius); o += "\n";
  o += "embedding_trials = " + std::to_string(embedding_trials) + "\n";
  o += "\n[output]\n";
  if (!report_path.empty()) o += "report = " + report_path + "\n";
  if (!solution_csv.empty()) o += "solution_csv = " + solution_csv + "\n";
  if (!trace_csv.empty()) o += "trace_csv = " + trace_csv + "\n";
  if (!mesh_csv.empty()) o += "mesh_csv = " + mesh_csv + "\n";
  if (!props_csv.empty()) o += "props_csv = " + props_csv + "\n";
  return o;
}

DomainSpec Config::domain() const {
  if (shape == "rect") return DomainSpec::rect(x0, y0, x1, y1);
  return DomainSpec::disc(cx, cy, radius);
}

Mesh Config::build_mesh() const {
  if (shape == "rect") return Mesh::rect(x0, y0, x1, y1, nx, ny);
  return Mesh::disc({cx, cy}, radius, levels);
}

namespace {

ScalarField parse_field(const std::string& section, const std::string& key,
                        const std::string& src, const std::string& label) {
  try {
    return ScalarField::parse(src, label);
  } catch (const ParseError& e) {
    throw ConfigError(section, key, "config: [" + section + "] " + key + " = '" + src +
                                        "': " + e.what());
  }
}

}  // namespace

FieldSet Config::build_fields() const {
  FieldSet fs;
  fs.p = parse_field("exponents", "p", p, "p");
  fs.q = parse_field("exponents", "q", q, "q");
  fs.r = parse_field("exponents", "r", r, "r");
  fs.s = parse_field("exponents", "s", s, "s");
  fs.mu = parse_field("coefficients", "mu", mu, "mu");
  fs.alpha = parse_field("coefficients", "alpha", alpha, "alpha");
  fs.gamma = parse_field("coefficients", "gamma", gamma, "gamma");
  return fs;
}

NonlinearitySpec Config::build_nonlinearity() const {
  ScalarField sf = parse_field(nonlin_s.empty() ? "exponents" : "nonlinearity", "s",
                               nonlin_s.empty() ? s : nonlin_s, "s");
  if (family == "paper_f1") return NonlinearitySpec::paper_f1(c1, c2, sf);
  if (f.empty())
    throw ConfigError("nonlinearity", "f",
                      "config: [nonlinearity] family = expression requires key f");
  try {
    return NonlinearitySpec::expression(Expr::parse(f), sf, c1, c2);
  } catch (const ParseError& e) {
    throw ConfigError("nonlinearity", "f", std::string("config: [nonlinearity] f: ") + e.what());
  }
}

RhsSpec Config::build_rhs() const {
  RhsSpec r;
  r.g = parse_field("rhs", "g", g, "g");
  r.nu = {nu_x, nu_y};
  r.mode = rhs_mode == "convective" ? RhsSpec::Mode::Convective : RhsSpec::Mode::Fixed;
  return r;
}

DescentParams Config::descent_params() const {
  DescentParams d;
  d.tol_res = tol_res;
  d.max_iters = max_iters;
  return d;
}

OuterParams Config::outer_params() const {
  OuterParams o;
  o.tol_fix = tol_fix;
  o.max_outer = max_outer;
  o.damping = damping;
  return o;
}

}  // namespace dphase
