#include "mdist/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mdist {

std::string format_number(double v) {
  if (std::isinf(v) && v > 0) return "inf";
  if (!std::isfinite(v)) throw Error("format_number: value is not finite");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_number(const ExtendedReal& v) {
  return v.is_infinite() ? "inf" : format_number(v.value());
}

ExtendedReal parse_extended(const std::string& token) {
  if (token == "inf") return ExtendedReal::infinity();
  double v = 0.0;
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw InputError("invalid number '" + token + "'");
  return v;
}

double parse_finite(const std::string& token) {
  const auto v = parse_extended(token);
  if (v.is_infinite()) throw InputError("expected a finite number, got 'inf'");
  return v.value();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
  if (!out) throw Error("write failed for '" + path + "'");
}

namespace {

struct Line {
  int number;
  std::vector<std::string> tokens;
};

std::vector<Line> tokenize(const std::string& text) {
  std::vector<Line> out;
  std::istringstream in(text);
  std::string raw;
  int n = 0;
  while (std::getline(in, raw)) {
    ++n;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    std::istringstream ls(raw);
    Line line{n, {}};
    for (std::string tok; ls >> tok;) line.tokens.push_back(tok);
    if (!line.tokens.empty()) out.push_back(std::move(line));
  }
  return out;
}

[[noreturn]] void fail(const Line& line, const std::string& what) {
  throw InputError("line " + std::to_string(line.number) + ": " + what);
}

void expect_header(const std::vector<Line>& lines, const std::string& format) {
  if (lines.empty()) throw InputError("empty file, expected '" + format + " 1'");
  const auto& h = lines.front();
  if (h.tokens.size() != 2 || h.tokens[0] != format)
    fail(h, "expected header '" + format + " 1'");
  if (h.tokens[1] != "1") fail(h, "unsupported " + format + " version " + h.tokens[1]);
}

int parse_int(const Line& line, const std::string& token) {
  int v = 0;
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (ec != std::errc() || ptr != end) fail(line, "invalid integer '" + token + "'");
  return v;
}

double number(const Line& line, const std::string& token) {
  try {
    return parse_finite(token);
  } catch (const InputError& e) {
    fail(line, e.what());
  }
}

ExtendedReal extended(const Line& line, const std::string& token) {
  try {
    return parse_extended(token);
  } catch (const InputError& e) {
    fail(line, e.what());
  }
}

void need(const Line& line, std::size_t n) {
  if (line.tokens.size() < n)
    fail(line, "expected at least " + std::to_string(n) + " fields, got " +
                   std::to_string(line.tokens.size()));
}

void need_exact(const Line& line, std::size_t n) {
  if (line.tokens.size() != n)
    fail(line, "expected " + std::to_string(n) + " fields, got " +
                   std::to_string(line.tokens.size()));
}

std::string tag_name(FunctionTag t) { return t == FunctionTag::First ? "first" : "second"; }

FunctionTag parse_tag(const Line& line, const std::string& s) {
  if (s == "first") return FunctionTag::First;
  if (s == "second") return FunctionTag::Second;
  fail(line, "unknown contour tag '" + s + "' (expected first or second)");
}

}  // namespace

std::string detect_format(const std::string& text) {
  const auto lines = tokenize(text);
  return lines.empty() ? std::string() : lines.front().tokens.front();
}

// --- diagrams ---------------------------------------------------------------

std::string write_diagrams(const std::vector<PersistenceDiagram>& diagrams) {
  std::string out = "mdist-diagram 1\n# degree birth death multiplicity\n";
  for (const auto& d : diagrams) {
    const auto norm = d.normalized();
    for (const auto& p : norm.points()) {
      if (p.is_delta()) continue;
      out += std::to_string(d.degree()) + " " + format_number(p.birth) + " " +
             format_number(p.death_value()) + " " + std::to_string(p.multiplicity) + "\n";
    }
  }
  return out;
}

std::vector<PersistenceDiagram> read_diagrams(const std::string& text) {
  const auto lines = tokenize(text);
  expect_header(lines, "mdist-diagram");
  std::vector<PersistenceDiagram> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& l = lines[i];
    need_exact(l, 4);
    const int degree = parse_int(l, l.tokens[0]);
    if (degree < 0) fail(l, "negative degree");
    const double birth = number(l, l.tokens[1]);
    const ExtendedReal death = extended(l, l.tokens[2]);
    const int mult = parse_int(l, l.tokens[3]);
    if (mult <= 0) fail(l, "multiplicity must be positive");
    while (static_cast<int>(out.size()) <= degree)
      out.emplace_back(static_cast<int>(out.size()));
    try {
      if (death.is_infinite())
        out[degree].add_essential(birth, mult);
      else if (death.value() <= birth)
        fail(l, "death must exceed birth");
      else
        out[degree].add_proper(birth, death.value(), mult);
    } catch (const InputError&) {
      throw;
    } catch (const Error& e) {
      fail(l, e.what());
    }
  }
  for (auto& d : out) d = d.normalized();
  return out;
}

// --- meshes -----------------------------------------------------------------

std::string write_off(const SurfaceMesh& mesh) {
  std::string out = "OFF\n" + std::to_string(mesh.positions.size()) + " " +
                    std::to_string(mesh.triangles.size()) + " 0\n";
  for (const auto& p : mesh.positions)
    out += format_number(p.x) + " " + format_number(p.y) + " " + format_number(p.z) + "\n";
  for (const auto& t : mesh.triangles)
    out += "3 " + std::to_string(t[0]) + " " + std::to_string(t[1]) + " " +
           std::to_string(t[2]) + "\n";
  return out;
}

MeshFile read_off(const std::string& text) {
  const auto lines = tokenize(text);
  if (lines.empty() || lines[0].tokens[0] != "OFF") throw InputError("expected OFF header");
  std::vector<std::string> rest(lines[0].tokens.begin() + 1, lines[0].tokens.end());
  std::size_t li = 1;
  if (rest.empty()) {
    if (lines.size() < 2) throw InputError("OFF: missing counts line");
    rest = lines[1].tokens;
    li = 2;
  }
  const Line& counts = lines[li - 1];
  if (rest.size() < 2) fail(counts, "OFF: expected vertex and face counts");
  const int nv = parse_int(counts, rest[0]);
  const int nf = parse_int(counts, rest[1]);
  if (nv < 0 || nf < 0) fail(counts, "OFF: negative counts");
  if (lines.size() < li + nv + nf) throw InputError("OFF: file ends early");
  MeshFile m;
  for (int v = 0; v < nv; ++v) {
    const auto& l = lines[li + v];
    need_exact(l, 3);
    m.positions.push_back({number(l, l.tokens[0]), number(l, l.tokens[1]), number(l, l.tokens[2])});
  }
  for (int f = 0; f < nf; ++f) {
    const auto& l = lines[li + nv + f];
    need(l, 1);
    if (parse_int(l, l.tokens[0]) != 3) fail(l, "OFF: only triangular faces are supported");
    need(l, 4);
    std::array<int, 3> t{};
    for (int k = 0; k < 3; ++k) {
      t[k] = parse_int(l, l.tokens[1 + k]);
      if (t[k] < 0 || t[k] >= nv) fail(l, "OFF: vertex index out of range");
    }
    m.triangles.push_back(t);
  }
  return m;
}

std::string write_values(const std::vector<Value2>& values) {
  std::string out = "mdist-values 1\n" + std::to_string(values.size()) + "\n";
  for (const auto& v : values) out += format_number(v[0]) + " " + format_number(v[1]) + "\n";
  return out;
}

std::vector<Value2> read_values(const std::string& text) {
  const auto lines = tokenize(text);
  expect_header(lines, "mdist-values");
  if (lines.size() < 2) throw InputError("values: missing count");
  need_exact(lines[1], 1);
  const int n = parse_int(lines[1], lines[1].tokens[0]);
  if (n < 0 || lines.size() != static_cast<std::size_t>(n) + 2)
    throw InputError("values: expected " + std::to_string(n) + " records");
  std::vector<Value2> out;
  for (int i = 0; i < n; ++i) {
    const auto& l = lines[2 + i];
    need_exact(l, 2);
    out.push_back({number(l, l.tokens[0]), number(l, l.tokens[1])});
  }
  return out;
}

std::string values_path_for(const std::string& mesh_path) { return mesh_path + ".values"; }

BifilteredComplex load_mesh_complex(const std::string& mesh_path, const std::string& values_path) {
  const MeshFile mesh = read_off(read_text_file(mesh_path));
  const std::string vp = values_path.empty() ? values_path_for(mesh_path) : values_path;
  auto values = read_values(read_text_file(vp));
  if (values.size() != mesh.positions.size())
    throw InputError("values file has " + std::to_string(values.size()) +
                     " records but the mesh has " + std::to_string(mesh.positions.size()) +
                     " vertices");
  std::vector<Simplex> tops;
  for (const auto& t : mesh.triangles) tops.push_back({t[0], t[1], t[2]});
  try {
    return BifilteredComplex::from_top_simplices(std::move(values), tops);
  } catch (const InputError&) {
    throw;
  } catch (const Error& e) {
    throw InputError(std::string("mesh: ") + e.what());
  }
}

// --- grids ------------------------------------------------------------------

std::string write_grid(const ExtendedParetoGrid& grid) {
  std::string out = "mdist-grid 1\n";
  for (const auto& c : grid.contours) {
    switch (c.kind()) {
      case ContourKind::ImproperVertical:
      case ContourKind::ImproperHorizontal:
        out += std::string(c.kind() == ContourKind::ImproperVertical ? "vertical " : "horizontal ") +
               tag_name(c.tag()) + " " + format_number(c.base().x) + " " +
               format_number(c.base().y) + "\n";
        break;
      case ContourKind::Proper:
        out += "proper " + tag_name(c.tag()) + " " + std::to_string(c.polyline().size());
        for (const auto& p : c.polyline()) out += " " + format_number(p.x) + " " + format_number(p.y);
        out += "\n";
        break;
    }
  }
  return out;
}

ExtendedParetoGrid read_grid(const std::string& text) {
  const auto lines = tokenize(text);
  expect_header(lines, "mdist-grid");
  ExtendedParetoGrid grid;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& l = lines[i];
    need(l, 2);
    const std::string& kind = l.tokens[0];
    const FunctionTag tag = parse_tag(l, l.tokens[1]);
    try {
      if (kind == "vertical" || kind == "horizontal") {
        need_exact(l, 4);
        const double x0 = number(l, l.tokens[2]), y0 = number(l, l.tokens[3]);
        grid.contours.push_back(kind == "vertical" ? Contour::vertical(x0, y0, tag)
                                                   : Contour::horizontal(x0, y0, tag));
      } else if (kind == "proper") {
        need(l, 3);
        const int n = parse_int(l, l.tokens[2]);
        if (n < 2) fail(l, "proper contour needs at least 2 vertices");
        need_exact(l, 3 + 2 * static_cast<std::size_t>(n));
        std::vector<Point2> poly;
        for (int k = 0; k < n; ++k)
          poly.push_back({number(l, l.tokens[3 + 2 * k]), number(l, l.tokens[4 + 2 * k])});
        grid.contours.push_back(Contour::proper(std::move(poly), tag));
      } else {
        fail(l, "unknown contour kind '" + kind + "'");
      }
    } catch (const InputError&) {
      throw;
    } catch (const Error& e) {
      fail(l, e.what());
    }
  }
  return grid;
}

// --- candidates -------------------------------------------------------------

std::string write_candidates(const std::vector<CandidateSample>& samples) {
  std::string out = "mdist-candidates 1\n# a b kind residual n grid:index... m coeff...\n";
  for (const auto& s : samples) {
    out += format_number(s.param.a) + " " + format_number(s.param.b) + " " + to_string(s.kind) +
           " " + format_number(s.residual) + " " + std::to_string(s.contours.size());
    for (const auto& c : s.contours)
      out += " " + std::to_string(c.grid) + ":" + std::to_string(c.index);
    out += " " + std::to_string(s.coeffs.size());
    for (int c : s.coeffs) out += " " + std::to_string(c);
    out += "\n";
  }
  return out;
}

std::vector<CandidateSample> read_candidates(const std::string& text) {
  const auto lines = tokenize(text);
  expect_header(lines, "mdist-candidates");
  std::vector<CandidateSample> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& l = lines[i];
    need(l, 6);
    CandidateSample s;
    try {
      s.param = LineParam(number(l, l.tokens[0]), number(l, l.tokens[1]));
      s.kind = candidate_kind_from_string(l.tokens[2]);
    } catch (const InputError&) {
      throw;
    } catch (const Error& e) {
      fail(l, e.what());
    }
    s.residual = number(l, l.tokens[3]);
    const int n = parse_int(l, l.tokens[4]);
    if (n < 0) fail(l, "negative contour count");
    need(l, 6 + static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      const std::string& t = l.tokens[5 + k];
      const auto colon = t.find(':');
      if (colon == std::string::npos) fail(l, "contour reference must be grid:index");
      s.contours.push_back({parse_int(l, t.substr(0, colon)), parse_int(l, t.substr(colon + 1))});
    }
    const int m = parse_int(l, l.tokens[5 + n]);
    if (m < 0) fail(l, "negative coefficient count");
    need_exact(l, 6 + static_cast<std::size_t>(n) + m);
    for (int k = 0; k < m; ++k) s.coeffs.push_back(parse_int(l, l.tokens[6 + n + k]));
    out.push_back(std::move(s));
  }
  return out;
}

// --- reports ----------------------------------------------------------------

std::string write_report(const EstimateReport& r) {
  std::string out = "mdist-report 1\n";
  out += "method " + to_string(r.method) + "\n";
  out += "value " + format_number(r.value) + "\n";
  out += "realizer " + format_number(r.realizer.a) + " " + format_number(r.realizer.b) + "\n";
  out += "slope_one_lines " + std::to_string(r.slope_one_lines) + "\n";
  out += "u_lines " + std::to_string(r.u_lines) + "\n";
  if (!r.witness.empty()) out += "witness " + r.witness + "\n";
  out += "lines " + std::to_string(r.per_line.size()) + "\n";
  out += "# line a b cost n cost_per_degree... [witness]\n";
  for (const auto& lc : r.per_line) {
    out += "line " + format_number(lc.line.a) + " " + format_number(lc.line.b) + " " +
           format_number(lc.cost) + " " + std::to_string(lc.per_degree.size());
    for (const auto& d : lc.per_degree) out += " " + format_number(d);
    if (!lc.witness.empty()) out += " " + lc.witness;
    out += "\n";
  }
  return out;
}

namespace {

std::string join_from(const Line& l, std::size_t k) {
  std::string s;
  for (std::size_t i = k; i < l.tokens.size(); ++i) s += (s.empty() ? "" : " ") + l.tokens[i];
  return s;
}

EstimateReport parse_report(const std::vector<Line>& lines, std::size_t begin, std::size_t end) {
  EstimateReport r;
  std::size_t expected = 0;
  bool have_lines = false;
  for (std::size_t i = begin; i < end; ++i) {
    const auto& l = lines[i];
    const std::string& key = l.tokens[0];
    if (key == "method") {
      need_exact(l, 2);
      if (l.tokens[1] == "naive")
        r.method = Method::Naive;
      else if (l.tokens[1] == "reduced")
        r.method = Method::Reduced;
      else
        fail(l, "unknown method '" + l.tokens[1] + "'");
    } else if (key == "value") {
      need_exact(l, 2);
      r.value = extended(l, l.tokens[1]);
    } else if (key == "realizer") {
      need_exact(l, 3);
      try {
        r.realizer = LineParam(number(l, l.tokens[1]), number(l, l.tokens[2]));
      } catch (const InputError&) {
        throw;
      } catch (const Error& e) {
        fail(l, e.what());
      }
    } else if (key == "slope_one_lines" || key == "u_lines" || key == "lines") {
      need_exact(l, 2);
      const int n = parse_int(l, l.tokens[1]);
      if (n < 0) fail(l, "negative count");
      if (key == "slope_one_lines") r.slope_one_lines = n;
      if (key == "u_lines") r.u_lines = n;
      if (key == "lines") {
        expected = n;
        have_lines = true;
      }
    } else if (key == "witness") {
      r.witness = join_from(l, 1);
    } else if (key == "line") {
      need(l, 5);
      LineCost lc;
      try {
        lc.line = LineParam(number(l, l.tokens[1]), number(l, l.tokens[2]));
      } catch (const InputError&) {
        throw;
      } catch (const Error& e) {
        fail(l, e.what());
      }
      lc.cost = extended(l, l.tokens[3]);
      const int n = parse_int(l, l.tokens[4]);
      if (n < 0) fail(l, "negative degree count");
      need(l, 5 + static_cast<std::size_t>(n));
      for (int k = 0; k < n; ++k) lc.per_degree.push_back(extended(l, l.tokens[5 + k]));
      lc.witness = join_from(l, 5 + n);
      r.per_line.push_back(std::move(lc));
    } else {
      fail(l, "unknown report key '" + key + "'");
    }
  }
  if (have_lines && expected != r.per_line.size())
    throw InputError("report declares " + std::to_string(expected) + " lines but has " +
                     std::to_string(r.per_line.size()));
  return r;
}

}  // namespace

EstimateReport read_report(const std::string& text) {
  const auto lines = tokenize(text);
  expect_header(lines, "mdist-report");
  return parse_report(lines, 1, lines.size());
}

std::string write_verify(const VerifyReport& v) {
  std::string out = "mdist-verify 1\n";
  out += "tol " + format_number(v.tol) + "\n";
  out += std::string("pass ") + (v.pass ? "1" : "0") + "\n";
  out += write_report(v.naive);
  out += write_report(v.reduced);
  return out;
}

VerifyReport read_verify(const std::string& text) {
  const auto lines = tokenize(text);
  expect_header(lines, "mdist-verify");
  VerifyReport v;
  std::vector<std::size_t> starts;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& l = lines[i];
    if (l.tokens[0] == "mdist-report") {
      if (l.tokens.size() != 2 || l.tokens[1] != "1") fail(l, "expected 'mdist-report 1'");
      starts.push_back(i);
    } else if (starts.empty()) {
      need_exact(l, 2);
      if (l.tokens[0] == "tol")
        v.tol = number(l, l.tokens[1]);
      else if (l.tokens[0] == "pass")
        v.pass = parse_int(l, l.tokens[1]) != 0;
      else
        fail(l, "unknown verify key '" + l.tokens[0] + "'");
    }
  }
  if (starts.size() != 2) throw InputError("verify file must embed exactly two reports");
  v.naive = parse_report(lines, starts[0] + 1, starts[1]);
  v.reduced = parse_report(lines, starts[1] + 1, lines.size());
  return v;
}

}  // namespace mdist
