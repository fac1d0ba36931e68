#include "fchoq/config.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace fchoq {

namespace {

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

using Sections = std::map<std::string, std::map<std::string, Entry>>;

[[noreturn]] void fail(const std::string& path, int line,
                       const std::string& msg) {
  throw ConfigError(path + ":" + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

Sections parse_sections(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  Sections out;
  std::string section;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string text = trim(raw);
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') fail(path, line, "unterminated section header");
      section = trim(text.substr(1, text.size() - 2));
      if (section.empty()) fail(path, line, "empty section name");
      out[section];
      continue;
    }
    const size_t eq = text.find('=');
    if (eq == std::string::npos)
      fail(path, line, "expected 'key = value' or '[section]'");
    if (section.empty()) fail(path, line, "entry before any [section]");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty()) fail(path, line, "empty key");
    if (value.empty()) fail(path, line, "empty value for key '" + key + "'");
    if (out[section].count(key))
      fail(path, line, "duplicate key '" + key + "' in [" + section + "]");
    out[section][key] = Entry{value, line, false};
  }
  return out;
}

class Reader {
 public:
  Reader(Sections sections, std::string path)
      : sections_(std::move(sections)), path_(std::move(path)) {}

  bool has(const std::string& sec, const std::string& key) {
    auto s = sections_.find(sec);
    return s != sections_.end() && s->second.count(key) > 0;
  }

  std::string raw(const std::string& sec, const std::string& key) {
    Entry& e = sections_[sec][key];
    e.used = true;
    return e.value;
  }

  double number(const std::string& sec, const std::string& key, double dflt) {
    if (!has(sec, key)) return dflt;
    return parse_number(sec, key);
  }

  double required_number(const std::string& sec, const std::string& key,
                         const std::string& hypothesis) {
    if (!has(sec, key))
      throw ConfigError(path_ + ": missing required [" + sec + "] " + key +
                        (hypothesis.empty() ? "" : " (" + hypothesis + ")"));
    return parse_number(sec, key);
  }

  int integer(const std::string& sec, const std::string& key, int dflt) {
    if (!has(sec, key)) return dflt;
    const double v = parse_number(sec, key);
    if (v != static_cast<int>(v))
      fail(path_, line_of(sec, key), "expected an integer for '" + key + "'");
    return static_cast<int>(v);
  }

  std::vector<double> number_list(const std::string& sec,
                                  const std::string& key) {
    std::vector<double> out;
    const std::string v = raw(sec, key);
    std::stringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      tok = trim(tok);
      if (tok.empty()) fail(path_, line_of(sec, key), "empty list element");
      out.push_back(to_double(sec, key, tok));
    }
    if (out.empty()) fail(path_, line_of(sec, key), "empty list");
    return out;
  }

  // "-2, 2" -> 1D points; "(-2, 0), (2, 0)" -> 2D points
  std::vector<Point> point_list(const std::string& sec, const std::string& key,
                                int dim) {
    const std::string v = raw(sec, key);
    std::vector<Point> pts;
    if (v.find('(') == std::string::npos) {
      if (dim != 1)
        fail(path_, line_of(sec, key),
             "2D points must be written as (x, y) tuples");
      for (double x : split_numbers(sec, key, v)) {
        Point p(1);
        p[0] = x;
        pts.push_back(p);
      }
      return pts;
    }
    size_t pos = 0;
    while (pos < v.size()) {
      const size_t open = v.find('(', pos);
      if (open == std::string::npos) break;
      const size_t close = v.find(')', open);
      if (close == std::string::npos)
        fail(path_, line_of(sec, key), "unterminated tuple");
      const auto comps =
          split_numbers(sec, key, v.substr(open + 1, close - open - 1));
      if (static_cast<int>(comps.size()) != dim)
        fail(path_, line_of(sec, key), "tuple arity does not match dim");
      Point p(dim);
      for (int a = 0; a < dim; ++a) p[a] = comps[a];
      pts.push_back(p);
      pos = close + 1;
    }
    if (pts.empty()) fail(path_, line_of(sec, key), "no points found");
    return pts;
  }

  std::string text(const std::string& sec, const std::string& key,
                   const std::string& dflt) {
    if (!has(sec, key)) return dflt;
    return raw(sec, key);
  }

  void reject_unknown() {
    for (const auto& [sec, entries] : sections_)
      for (const auto& [key, e] : entries)
        if (!e.used)
          fail(path_, e.line, "unknown key '" + key + "' in [" + sec + "]");
  }

  const std::string& path() const { return path_; }

 private:
  int line_of(const std::string& sec, const std::string& key) {
    return sections_[sec][key].line;
  }

  double to_double(const std::string& sec, const std::string& key,
                   const std::string& tok) {
    try {
      size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      fail(path_, line_of(sec, key), "cannot parse number '" + tok + "'");
    }
  }

  std::vector<double> split_numbers(const std::string& sec,
                                    const std::string& key,
                                    const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      tok = trim(tok);
      if (!tok.empty()) out.push_back(to_double(sec, key, tok));
    }
    return out;
  }

  double parse_number(const std::string& sec, const std::string& key) {
    return to_double(sec, key, raw(sec, key));
  }

  Sections sections_;
  std::string path_;
};

}  // namespace

LoadedConfig load_config(const std::string& path) {
  Reader r(parse_sections(path), path);
  LoadedConfig out;

  const int dim = r.integer("grid", "dim", 1);
  const double L = r.number("grid", "half_length", 12.0);
  const int n = r.integer("grid", "points_per_axis", 1024);

  ModelConfig& m = out.model;
  m.grid = make_grid(dim, L, n);
  m.s = r.number("model", "s", 0.4);
  m.mu = r.number("model", "mu", 0.5);
  m.q = r.number("model", "q", 3.0);
  m.eps = r.number("model", "eps", 0.125);
  m.pen.ell = r.number("model", "ell", 10.0);
  m.delta_request = r.number("model", "delta", 0.0);

  const std::string family = r.text("potential", "family", "product_well");
  if (family == "product_well")
    m.potential.family = PotentialFamily::product_well;
  else if (family == "constant")
    m.potential.family = PotentialFamily::constant;
  else
    throw ConfigError(path + ": unknown potential family '" + family + "'");
  m.potential.base = r.number("potential", "v0", 1.0);
  m.potential.amplitude = r.number("potential", "amplitude", 2.0);
  m.potential.sigma = r.number("potential", "sigma", 1.0);
  if (r.has("potential", "wells"))
    m.potential.wells = r.point_list("potential", "wells", dim);
  else
    throw ConfigError(path + ": missing required [potential] wells");

  if (!r.has("lambda", "extents"))
    throw ConfigError(path +
                      ": missing [lambda] extents ((V2) needs a bounded open "
                      "set Lambda)");
  {
    const std::string shape = r.text("lambda", "shape", "box");
    if (shape == "box")
      m.lambda_region.shape = RegionShape::box;
    else if (shape == "ball")
      m.lambda_region.shape = RegionShape::ball;
    else
      throw ConfigError(path + ": unknown lambda shape '" + shape + "'");
    std::vector<double> center{0.0, 0.0};
    if (r.has("lambda", "center")) center = r.number_list("lambda", "center");
    std::vector<double> extents = r.number_list("lambda", "extents");
    if (static_cast<int>(center.size()) < dim)
      throw ConfigError(path + ": lambda center arity does not match dim");
    if (extents.size() == 1 && dim == 2) extents.push_back(extents[0]);
    if (static_cast<int>(extents.size()) < dim)
      throw ConfigError(path + ": lambda extents arity does not match dim");
    m.lambda_region.center = Point(dim);
    m.lambda_region.extents = Point(dim);
    for (int a = 0; a < dim; ++a) {
      m.lambda_region.center[a] = center[a];
      m.lambda_region.extents[a] = extents[a];
    }
  }

  SolverOptions& s = out.solver;
  s.tol_grad = r.number("solver", "tol_grad", s.tol_grad);
  s.tol_nehari = r.number("solver", "tol_nehari", s.tol_nehari);
  s.max_iter = r.integer("solver", "max_iter", s.max_iter);
  s.armijo_c = r.number("solver", "armijo_c", s.armijo_c);
  s.armijo_shrink = r.number("solver", "armijo_shrink", s.armijo_shrink);
  s.step0 = r.number("solver", "step0", s.step0);
  s.cluster_radius = r.number("solver", "cluster_radius", s.cluster_radius);

  if (r.has("sweep", "eps_ladder"))
    out.sweep.eps_ladder = r.number_list("sweep", "eps_ladder");
  if (r.has("sweep", "grid_ladder")) {
    out.sweep.grid_ladder.clear();
    for (double v : r.number_list("sweep", "grid_ladder"))
      out.sweep.grid_ladder.push_back(static_cast<int>(v));
  } else {
    int nn = n;
    for (size_t i = 0; i < out.sweep.eps_ladder.size(); ++i) {
      out.sweep.grid_ladder.push_back(nn);
      nn *= 2;
    }
  }
  if (out.sweep.grid_ladder.size() != out.sweep.eps_ladder.size())
    throw ConfigError(path + ": eps_ladder and grid_ladder length mismatch");

  out.autonomous.half_length = r.number("autonomous", "half_length", L);
  out.autonomous.points_per_axis = r.integer("autonomous", "points_per_axis", n);
  out.autonomous.seed_width = r.number("autonomous", "seed_width", 1.0);

  r.reject_unknown();
  out.model = validate_config(std::move(out.model));
  return out;
}

ModelConfig with_grid_and_eps(const ModelConfig& cfg, const GridSpec& grid,
                              double eps) {
  ModelConfig fresh = cfg;
  fresh.grid = grid;
  fresh.eps = eps;
  fresh.validated = false;
  fresh.warnings.clear();
  return validate_config(std::move(fresh));
}

}  // namespace fchoq
