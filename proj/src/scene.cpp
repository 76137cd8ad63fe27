#include "regdist/scene.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "regdist/error.hpp"

namespace regdist {

namespace {

[[noreturn]] void syntax(int line, int col, const std::string& what) {
  throw Error(ErrorCode::syntax_error, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + what);
}

[[noreturn]] void semantic(const std::string& what) { throw Error(ErrorCode::semantic_error, what); }

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_number(const std::string& tok, int line, int col) {
  if (tok == "inf" || tok == "+inf") return kInfinity;
  if (tok == "-inf") return -kInfinity;
  double v = 0.0;
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end || tok.empty()) syntax(line, col, "not a number: '" + tok + "'");
  return v;
}

// comma separated numbers; col is the column where the value starts
std::vector<double> parse_numbers(const std::string& value, int line, int col) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= value.size()) {
    const auto comma = value.find(',', pos);
    const std::string raw = value.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    const auto lead = raw.find_first_not_of(" \t");
    out.push_back(parse_number(trim(raw), line, col + static_cast<int>(pos + (lead == std::string::npos ? 0 : lead))));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

double single(const std::vector<double>& v, const std::string& key, int line) {
  if (v.size() != 1) syntax(line, 1, key + " takes one number");
  return v[0];
}

int as_int(double v, const std::string& key, int line) {
  if (v != std::floor(v) || std::abs(v) > 1e9) syntax(line, 1, key + " must be an integer");
  return static_cast<int>(v);
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    if (std::isinf(v[i]))
      s += v[i] > 0 ? "inf" : "-inf";
    else
      s += fmt17(v[i]);
  }
  return s;
}

std::size_t count_for(int n, int degree) {
  // C(n + d, d)
  double c = 1.0;
  for (int k = 1; k <= degree; ++k) c = c * (n + k) / k;
  return static_cast<std::size_t>(std::llround(c));
}

Poly make_poly(int n, const std::vector<double>& coeffs, const std::string& where) {
  for (int d = 0; d <= 64; ++d) {
    const std::size_t c = count_for(n, d);
    if (c == coeffs.size()) return Poly(n, coeffs);
    if (c > coeffs.size()) break;
  }
  semantic(where + ": " + std::to_string(coeffs.size()) + " coefficients do not fill a degree in " +
           std::to_string(n) + " variables");
}

const std::set<std::string> kPrimitives = {"point",      "segment", "polyline",   "circle",
                                           "half_line",  "line",    "poly_graph", "point_cloud"};
const std::set<std::string> kKinds = {"interval", "point", "open", "graph", "region"};

void check_primitive(const WPrimitive& w, int n) {
  const std::size_t k = w.values.size(), un = static_cast<std::size_t>(n);
  bool ok = true;
  if (w.kind == "point") ok = k == un;
  if (w.kind == "segment" || w.kind == "half_line" || w.kind == "line") ok = k == 2 * un;
  if (w.kind == "polyline") ok = k >= 4 && un == 2 && k % 2 == 0;
  if (w.kind == "circle") ok = un == 2 && k == 3 && w.values[2] > 0.0;
  if (w.kind == "poly_graph") ok = un == 2 && k >= 3 && w.values[0] < w.values[1];
  if (w.kind == "point_cloud") ok = k == 1 && w.values[0] >= 0.0 && !w.file.empty();
  if (!ok) semantic("W primitive '" + w.kind + "' has the wrong arguments for n = " + std::to_string(n));
}

}  // namespace

Scene parse_scene(const std::string& text, const std::string& base_dir) {
  Scene s;
  s.base_dir = base_dir;
  s.grid = GridSpec{};
  std::istringstream in(text);
  std::string raw;
  int number = 0;
  std::string section;
  StratumDecl* current = nullptr;
  std::optional<std::vector<double>> lo, hi;
  std::set<std::string> ids;
  bool have_n = false;
  WPrimitive* last_cloud = nullptr;

  while (std::getline(in, raw)) {
    ++number;
    std::string line = raw;
    if (auto h = line.find('#'); h != std::string::npos) line = line.substr(0, h);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const int indent = static_cast<int>(line.find_first_not_of(" \t")) + 1;

    if (t.front() == '[') {
      if (t.back() != ']') syntax(number, indent + static_cast<int>(t.size()) - 1, "missing ']'");
      const std::string inner = trim(t.substr(1, t.size() - 2));
      std::istringstream words(inner);
      std::string head, id, extra;
      words >> head >> id >> extra;
      if (!extra.empty()) syntax(number, indent, "unexpected text in section header");
      current = nullptr;
      last_cloud = nullptr;
      if (head == "stratum") {
        if (id.empty()) syntax(number, indent, "stratum needs an identifier");
        if (!ids.insert(id).second) semantic("duplicate stratum identifier '" + id + "'");
        s.strata.push_back({});
        s.strata.back().id = id;
        current = &s.strata.back();
      } else if ((head == "params" || head == "grid" || head == "w") && id.empty()) {
      } else {
        syntax(number, indent, "unknown section '" + inner + "'");
      }
      section = head;
      continue;
    }

    const auto eq = t.find('=');
    if (eq == std::string::npos) syntax(number, indent, "expected 'key = value'");
    if (section.empty()) syntax(number, indent, "entry outside a section");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    const int vcol = indent + static_cast<int>(t.find_first_not_of(" \t", eq + 1));
    if (key.empty()) syntax(number, indent, "empty key");
    if (value.empty()) syntax(number, vcol, "empty value for '" + key + "'");
    auto nums = [&] { return parse_numbers(value, number, vcol); };

    if (section == "params") {
      if (key == "dim") {
        s.n = as_int(single(nums(), key, number), key, number);
        have_n = true;
      } else if (key == "p") {
        s.p = as_int(single(nums(), key, number), key, number);
      } else if (key == "kappa") {
        s.kappa = single(nums(), key, number);
      } else if (key == "eta") {
        s.eta = single(nums(), key, number);
      } else if (key == "g_scale") {
        s.g_scale = single(nums(), key, number);
      } else if (key == "t") {
        s.t_list = nums();
      } else if (key == "eps") {
        s.eps_list = nums();
      } else if (key == "bump_target") {
        s.bump_target = value;
      } else if (key == "seed") {
        s.seed = static_cast<unsigned>(as_int(single(nums(), key, number), key, number));
      } else {
        semantic("unknown parameter '" + key + "'");
      }
    } else if (section == "grid") {
      if (key == "lo") lo = nums();
      else if (key == "hi") hi = nums();
      else if (key == "resolution") s.grid.resolution = as_int(single(nums(), key, number), key, number);
      else if (key == "collar") s.grid.collar = single(nums(), key, number);
      else if (key == "refine") s.grid.refine = as_int(single(nums(), key, number), key, number);
      else semantic("unknown grid key '" + key + "'");
    } else if (section == "w") {
      if (key == "file") {
        if (!last_cloud) semantic("'file' must follow a point_cloud entry");
        last_cloud->file = value;
        continue;
      }
      if (!kPrimitives.count(key)) semantic("unknown W primitive '" + key + "'");
      s.W.push_back({key, nums(), ""});
      last_cloud = key == "point_cloud" ? &s.W.back() : nullptr;
    } else if (current) {
      StratumDecl& d = *current;
      if (key == "kind") {
        if (!kKinds.count(value)) semantic("unknown cell kind '" + value + "' in stratum " + d.id);
        d.kind = value;
      } else if (key == "bounds" || key == "base") {
        d.bounds = nums();
      } else if (key == "lower" || key == "upper") {
        auto v = nums();
        std::optional<std::vector<double>> b;
        if (!(v.size() == 1 && std::isinf(v[0]))) b = v;
        (key == "lower" ? d.lower : d.upper) = b;
      } else if (key == "phi") {
        d.phi = nums();
      } else if (key == "at") {
        d.at = single(nums(), key, number);
      } else if (key == "positive") {
        d.positive.push_back(nums());
      } else if (key == "M") {
        d.M = single(nums(), key, number);
      } else if (key == "perm") {
        for (double v : nums()) d.perm.push_back(as_int(v, key, number));
      } else {
        semantic("unknown stratum key '" + key + "' in stratum " + d.id);
      }
    }
  }

  if (!have_n || s.n < 1) semantic("params.dim must be a positive integer");
  if (s.p < 1) semantic("p must be at least 1");
  if (!(s.kappa > 0.0 && s.kappa < 1.0)) semantic("kappa out of range (0, 1): " + fmt17(s.kappa));
  if (s.eta && !(*s.eta > 0.0)) semantic("eta must be positive");
  if (!lo || !hi) semantic("grid needs lo and hi");
  if (lo->size() != static_cast<std::size_t>(s.n) || hi->size() != lo->size()) semantic("grid box has the wrong dimension");
  for (std::size_t k = 0; k < lo->size(); ++k)
    if (!((*lo)[k] < (*hi)[k]) || std::isinf((*lo)[k]) || std::isinf((*hi)[k])) semantic("grid box is empty or unbounded");
  s.grid.box = Box{*lo, *hi};
  s.grid.seed = s.seed;
  if (s.grid.resolution < 2) semantic("grid resolution must be at least 2");
  if (s.strata.empty()) semantic("no strata declared");
  for (const auto& w : s.W) check_primitive(w, s.n);
  for (const auto& d : s.strata)
    if (d.kind.empty()) semantic("stratum " + d.id + " has no kind");
  if (!s.bump_target.empty() && !ids.count(s.bump_target)) semantic("bump_target '" + s.bump_target + "' is not a stratum");
  for (std::size_t k = 1; k < s.t_list.size(); ++k)
    if (!(s.t_list[k] < s.t_list[k - 1])) semantic("t must decrease strictly");
  return s;
}

Scene load_scene(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::io_error, "cannot read scene " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_scene(ss.str(), std::filesystem::path(path).parent_path().string());
}

std::string dump_scene(const Scene& s) {
  std::ostringstream o;
  o << "[params]\n";
  o << "dim = " << s.n << "\n";
  o << "p = " << s.p << "\n";
  o << "kappa = " << fmt17(s.kappa) << "\n";
  if (s.eta) o << "eta = " << fmt17(*s.eta) << "\n";
  o << "g_scale = " << fmt17(s.g_scale) << "\n";
  if (!s.t_list.empty()) o << "t = " << join(s.t_list) << "\n";
  if (!s.eps_list.empty()) o << "eps = " << join(s.eps_list) << "\n";
  if (!s.bump_target.empty()) o << "bump_target = " << s.bump_target << "\n";
  o << "seed = " << s.seed << "\n";
  o << "\n[grid]\n";
  o << "lo = " << join(s.grid.box.lo) << "\n";
  o << "hi = " << join(s.grid.box.hi) << "\n";
  o << "resolution = " << s.grid.resolution << "\n";
  o << "collar = " << fmt17(s.grid.collar) << "\n";
  o << "refine = " << s.grid.refine << "\n";
  o << "\n[w]\n";
  for (const auto& w : s.W) {
    o << w.kind << " = " << join(w.values) << "\n";
    if (!w.file.empty()) o << "file = " << w.file << "\n";
  }
  for (const auto& d : s.strata) {
    o << "\n[stratum " << d.id << "]\n";
    o << "kind = " << d.kind << "\n";
    if (!d.bounds.empty()) o << (d.kind == "interval" ? "bounds" : "base") << " = " << join(d.bounds) << "\n";
    if (d.kind == "open") {
      o << "lower = " << (d.lower ? join(*d.lower) : "-inf") << "\n";
      o << "upper = " << (d.upper ? join(*d.upper) : "inf") << "\n";
    }
    if (!d.phi.empty()) o << "phi = " << join(d.phi) << "\n";
    if (d.kind == "point") o << "at = " << fmt17(d.at) << "\n";
    for (const auto& q : d.positive) o << "positive = " << join(q) << "\n";
    if (d.M != 0.0) o << "M = " << fmt17(d.M) << "\n";
    if (!d.perm.empty()) {
      o << "perm = ";
      for (std::size_t k = 0; k < d.perm.size(); ++k) o << (k ? ", " : "") << d.perm[k];
      o << "\n";
    }
  }
  return o.str();
}

OraclePtr build_w(const Scene& s) {
  std::vector<OraclePtr> parts;
  const auto n = static_cast<std::size_t>(s.n);
  for (const auto& w : s.W) {
    const auto& v = w.values;
    auto pt = [&](std::size_t at) { return Point(v.begin() + static_cast<long>(at), v.begin() + static_cast<long>(at + n)); };
    if (w.kind == "point") {
      parts.push_back(LinearPieceOracle::point(pt(0)));
    } else if (w.kind == "segment") {
      parts.push_back(LinearPieceOracle::segment(pt(0), pt(n)));
    } else if (w.kind == "half_line") {
      parts.push_back(LinearPieceOracle::ray(pt(0), pt(n)));
    } else if (w.kind == "line") {
      parts.push_back(LinearPieceOracle::line(pt(0), pt(n)));
    } else if (w.kind == "polyline") {
      for (std::size_t k = 0; k + 2 * n <= v.size(); k += n) parts.push_back(LinearPieceOracle::segment(pt(k), pt(k + n)));
    } else if (w.kind == "circle") {
      parts.push_back(std::make_shared<SphereOracle>(Point{v[0], v[1]}, v[2]));
    } else if (w.kind == "poly_graph") {
      parts.push_back(std::make_shared<PolyGraphOracle>(std::vector<double>(v.begin() + 2, v.end()), v[0], v[1]));
    } else if (w.kind == "point_cloud") {
      const auto path = std::filesystem::path(s.base_dir) / w.file;
      std::ifstream f(path);
      if (!f) throw Error(ErrorCode::io_error, "cannot read point cloud " + path.string());
      std::vector<Point> pts;
      std::string line;
      int number = 0;
      while (std::getline(f, line)) {
        ++number;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#' || std::isalpha(static_cast<unsigned char>(t.front()))) continue;
        auto p = parse_numbers(t, number, 1);
        if (p.size() != n) semantic(path.string() + ": point of the wrong dimension on line " + std::to_string(number));
        pts.push_back(std::move(p));
      }
      if (pts.empty()) throw Error(ErrorCode::empty_set, "point cloud " + path.string() + " is empty");
      parts.push_back(std::make_shared<PointCloudOracle>(std::move(pts), v[0]));
    }
  }
  if (parts.empty()) return std::make_shared<EmptyOracle>(s.n);
  if (parts.size() == 1) return parts.front();
  return make_union(std::move(parts), s.n);
}

Stratification build_stratification(const Scene& s) {
  Stratification out;
  out.n = s.n;
  out.W = build_w(s);
  const GridSpec& g = s.grid;
  auto interval = [&](const StratumDecl& d) {
    if (d.bounds.size() != 2 || !(d.bounds[0] < d.bounds[1])) semantic("stratum " + d.id + " needs base/bounds a < b");
    return Cell::interval(d.bounds[0], d.bounds[1], g);
  };
  auto bound = [&](const std::optional<std::vector<double>>& c, int side, const StratumDecl& d) {
    if (!c) return side < 0 ? CellBound::minus_infinity() : CellBound::plus_infinity();
    return CellBound::of(CellFunction::of(make_poly(s.n - 1, *c, "stratum " + d.id)));
  };
  for (const auto& d : s.strata) {
    CellPtr cell;
    if (d.kind == "interval") {
      if (s.n != 1) semantic("interval strata need dim = 1");
      cell = interval(d);
    } else if (d.kind == "point") {
      if (s.n != 1) semantic("point strata need dim = 1");
      cell = Cell::graph(1, nullptr, {CellFunction::of(Poly(0, {d.at}))}, 0.0, d.perm, g);
    } else if (d.kind == "open") {
      if (s.n != 2) semantic("open strata are declared for dim = 2 (use interval for dim = 1)");
      cell = Cell::open(2, interval(d), bound(d.lower, -1, d), bound(d.upper, 1, d), d.M, d.perm, g);
    } else if (d.kind == "graph") {
      if (s.n != 2) semantic("graph strata are declared for dim = 2 (use point for dim = 1)");
      if (d.phi.empty()) semantic("graph stratum " + d.id + " needs phi");
      cell = Cell::graph(2, interval(d), {CellFunction::of(make_poly(1, d.phi, "stratum " + d.id))}, d.M, d.perm, g);
    } else {
      if (s.n != 2) semantic("region strata need dim = 2");
      if (d.positive.empty()) semantic("region stratum " + d.id + " needs positive polynomials");
      std::vector<Poly> qs;
      for (const auto& c : d.positive) qs.push_back(make_poly(2, c, "stratum " + d.id));
      cell = Cell::region(2, std::move(qs), g);
    }
    out.strata.push_back({d.id, cell});
  }
  return out;
}

}  // namespace regdist
