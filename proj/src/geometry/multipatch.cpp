#include "roughscat/geometry/multipatch.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace roughscat::geometry {

std::pair<double, double> edge_point(int edge, double tau) {
  switch (edge) {
    case 0: return {tau, 0.0};
    case 1: return {1.0, tau};
    case 2: return {tau, 1.0};
    case 3: return {0.0, tau};
    default: throw InvalidArgument("edge index must be in 0..3");
  }
}

namespace {

constexpr int kEdgeSamples = 10;

Vec3 edge_eval(const PatchMap& patch, int edge, double tau) {
  const auto [s, t] = edge_point(edge, tau);
  return patch.eval(s, t);
}

double edge_mismatch(const PatchMap& a, int ea, const PatchMap& b, int eb, bool reversed) {
  double worst = 0.0;
  for (int k = 0; k < kEdgeSamples; ++k) {
    const double tau = k / static_cast<double>(kEdgeSamples - 1);
    const Vec3 pa = edge_eval(a, ea, tau);
    const Vec3 pb = edge_eval(b, eb, reversed ? 1.0 - tau : tau);
    worst = std::max(worst, (pa - pb).norm());
  }
  return worst;
}

}  // namespace

void MultiPatchSurface::validate() const {
  if (patches.empty()) throw InvalidArgument("multipatch surface has no patches");
  if (orientation.size() != patches.size()) {
    throw InvalidArgument("multipatch surface: orientation flags do not match patch count");
  }
  for (int o : orientation) {
    if (o != 1 && o != -1) throw InvalidArgument("multipatch surface: orientation must be +1 or -1");
  }
  for (const auto& p : patches) {
    if (const auto* n = p.nurbs()) n->validate();
    p.check_immersion();
  }
  for (const auto& link : adjacency) {
    if (link.patch < 0 || link.patch >= size() || link.other_patch < 0 || link.other_patch >= size()) {
      throw InvalidArgument("adjacency references an unknown patch");
    }
    const double gap = edge_mismatch(patches[link.patch], link.edge, patches[link.other_patch],
                                     link.other_edge, link.reversed);
    if (gap > 1e-10) {
      std::ostringstream msg;
      msg << "shared edge (" << link.patch << ':' << link.edge << ") / (" << link.other_patch << ':'
          << link.other_edge << ") does not match (gap " << gap << ")";
      throw InvalidArgument(msg.str());
    }
  }
}

std::vector<EdgeLink> detect_adjacency(const std::vector<PatchMap>& patches, double tol) {
  std::vector<EdgeLink> links;
  const int m = static_cast<int>(patches.size());
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      for (int ei = 0; ei < 4; ++ei) {
        for (int ej = (i == j ? ei + 1 : 0); ej < 4; ++ej) {
          for (bool reversed : {false, true}) {
            if (edge_mismatch(patches[i], ei, patches[j], ej, reversed) <= tol) {
              links.push_back({i, ei, j, ej, reversed});
            }
          }
        }
      }
    }
  }
  return links;
}

std::vector<int> orient_from_anchors(const std::vector<PatchMap>& patches, const std::vector<Vec3>& anchors) {
  std::vector<int> flags;
  flags.reserve(patches.size());
  for (std::size_t i = 0; i < patches.size(); ++i) {
    const Vec3 n = patches[i].approximate_normal(0.5, 0.5);
    const Vec3 x = patches[i].eval(0.5, 0.5);
    flags.push_back(n.dot(x - anchors[i]) >= 0.0 ? 1 : -1);
  }
  return flags;
}

namespace {

struct Arc {
  std::array<Eigen::Vector2d, 3> points;
  std::array<double, 3> weights;
};

Arc quarter_arc(double theta0) {
  const Eigen::Vector2d p0(std::cos(theta0), std::sin(theta0));
  const Eigen::Vector2d p2(std::cos(theta0 + 0.5 * kPi), std::sin(theta0 + 0.5 * kPi));
  return {{p0, p0 + p2, p2}, {1.0, std::sqrt(0.5), 1.0}};
}

}  // namespace

MultiPatchSurface make_torus(double major_radius, double minor_radius) {
  if (!(minor_radius > 0.0 && major_radius > minor_radius)) {
    throw InvalidArgument("torus: radii must satisfy R > r > 0");
  }
  MultiPatchSurface surface;
  std::vector<Vec3> anchors;
  const std::vector<double> knots{0.0, 0.0, 0.0, 1.0, 1.0, 1.0};
  for (int j = 0; j < 4; ++j) {
    const Arc tube = quarter_arc(0.5 * kPi * j);
    for (int i = 0; i < 4; ++i) {
      const Arc ring = quarter_arc(0.5 * kPi * i);
      NurbsPatch patch;
      patch.degree_u = 2;
      patch.degree_v = 2;
      patch.knots_u = knots;
      patch.knots_v = knots;
      for (int b = 0; b < 3; ++b) {
        for (int a = 0; a < 3; ++a) {
          const double radial = major_radius + minor_radius * tube.points[b].x();
          patch.control.emplace_back(radial * ring.points[a].x(), radial * ring.points[a].y(),
                                     minor_radius * tube.points[b].y());
          patch.weights.push_back(ring.weights[a] * tube.weights[b]);
        }
      }
      const double theta_mid = 0.5 * kPi * (i + 0.5);
      anchors.emplace_back(major_radius * std::cos(theta_mid), major_radius * std::sin(theta_mid), 0.0);
      surface.patches.emplace_back(std::move(patch));
    }
  }
  surface.orientation = orient_from_anchors(surface.patches, anchors);
  surface.adjacency = detect_adjacency(surface.patches);
  return surface;
}

MultiPatchSurface make_sphere(double radius, const Vec3& center) {
  if (!(radius > 0.0)) throw InvalidArgument("sphere: radius must be positive");
  MultiPatchSurface surface;
  for (int f = 0; f < 6; ++f) surface.patches.emplace_back(CubeSphereFace{f, radius, center});
  surface.orientation = orient_from_anchors(surface.patches, std::vector<Vec3>(6, center));
  surface.adjacency = detect_adjacency(surface.patches);
  return surface;
}

MultiPatchSurface make_cuboid(double half_width) {
  if (!(half_width > 0.0)) throw InvalidArgument("cuboid: half-width must be positive");
  MultiPatchSurface surface;
  const double h = half_width;
  for (int axis = 0; axis < 3; ++axis) {
    const int a1 = (axis + 1) % 3;
    const int a2 = (axis + 2) % 3;
    for (double side : {1.0, -1.0}) {
      for (int bj = 0; bj < 2; ++bj) {
        for (int bi = 0; bi < 2; ++bi) {
          NurbsPatch patch;
          patch.knots_u = {0.0, 0.0, 1.0, 1.0};
          patch.knots_v = {0.0, 0.0, 1.0, 1.0};
          for (int j = 0; j < 2; ++j) {
            for (int i = 0; i < 2; ++i) {
              Vec3 p;
              p[axis] = side * h;
              p[a1] = -h + h * (bi + i);
              p[a2] = -h + h * (bj + j);
              patch.control.push_back(p);
              patch.weights.push_back(1.0);
            }
          }
          surface.patches.emplace_back(std::move(patch));
        }
      }
    }
  }
  surface.orientation = orient_from_anchors(surface.patches, std::vector<Vec3>(surface.patches.size(), Vec3::Zero()));
  surface.adjacency = detect_adjacency(surface.patches);
  return surface;
}

MultiPatchSurface builtin_surface(const std::string& name, const std::vector<double>& params) {
  auto param = [&](std::size_t i, double fallback) { return i < params.size() ? params[i] : fallback; };
  if (name == "torus") return make_torus(param(0, 0.75), param(1, 0.25));
  if (name == "sphere") return make_sphere(param(0, 1.0));
  if (name == "cuboid") return make_cuboid(param(0, 2.0));
  throw InvalidArgument("unknown built-in geometry '" + name + "'");
}

namespace {

std::string strip_comment(const std::string& line) {
  const auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

class LineReader {
 public:
  explicit LineReader(const std::string& text) : in_(text) {}

  // Next non-empty line split into tokens; empty vector at end of input.
  std::vector<std::string> next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      std::istringstream ls(strip_comment(line));
      std::vector<std::string> tokens;
      for (std::string tok; ls >> tok;) tokens.push_back(tok);
      if (!tokens.empty()) return tokens;
    }
    return {};
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw InvalidArgument("multipatch file, line " + std::to_string(line_no_) + ": " + what);
  }

  std::vector<std::string> expect(const std::string& keyword) {
    auto tokens = next();
    if (tokens.empty() || tokens[0] != keyword) fail("expected '" + keyword + "'");
    return tokens;
  }

  double number(const std::string& tok) const {
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size()) fail("malformed number '" + tok + "'");
      return v;
    } catch (const std::logic_error&) {
      fail("malformed number '" + tok + "'");
    }
  }

  int integer(const std::string& tok) const {
    const double v = number(tok);
    if (v != std::floor(v)) fail("expected an integer, got '" + tok + "'");
    return static_cast<int>(v);
  }

 private:
  std::istringstream in_;
  int line_no_ = 0;
};

}  // namespace

MultiPatchSurface parse_multipatch(const std::string& text) {
  LineReader reader(text);
  auto header = reader.expect("patches");
  if (header.size() != 2) reader.fail("expected 'patches M'");
  const int count = reader.integer(header[1]);
  if (count < 1) reader.fail("patch count must be positive");

  MultiPatchSurface surface;
  for (int p = 0; p < count; ++p) {
    NurbsPatch patch;
    auto deg = reader.expect("degrees");
    if (deg.size() != 3) reader.fail("expected 'degrees p1 p2'");
    patch.degree_u = reader.integer(deg[1]);
    patch.degree_v = reader.integer(deg[2]);
    auto ku = reader.expect("knots_u");
    for (std::size_t i = 1; i < ku.size(); ++i) patch.knots_u.push_back(reader.number(ku[i]));
    auto kv = reader.expect("knots_v");
    for (std::size_t i = 1; i < kv.size(); ++i) patch.knots_v.push_back(reader.number(kv[i]));
    const int rows = patch.rows();
    const int cols = patch.cols();
    if (rows < 1 || cols < 1) reader.fail("knot vectors too short for the stated degrees");
    for (int k = 0; k < rows * cols; ++k) {
      auto cp = reader.next();
      if (cp.size() != 4) reader.fail("expected control point 'x y z w'");
      patch.control.emplace_back(reader.number(cp[0]), reader.number(cp[1]), reader.number(cp[2]));
      patch.weights.push_back(reader.number(cp[3]));
    }
    patch.validate();
    surface.patches.emplace_back(std::move(patch));
  }

  bool have_adjacency = false;
  for (auto tokens = reader.next(); !tokens.empty(); tokens = reader.next()) {
    if (tokens[0] == "orientation") {
      if (static_cast<int>(tokens.size()) != count + 1) reader.fail("orientation needs one flag per patch");
      for (int p = 0; p < count; ++p) surface.orientation.push_back(reader.integer(tokens[p + 1]));
    } else if (tokens[0] == "adjacency") {
      have_adjacency = true;
      const int links = tokens.size() > 1 ? reader.integer(tokens[1]) : -1;
      if (links < 0) reader.fail("expected 'adjacency K'");
      for (int k = 0; k < links; ++k) {
        auto t = reader.next();
        if (t.size() != 5) reader.fail("expected adjacency 5-tuple 'patch edge patch edge reversed'");
        surface.adjacency.push_back({reader.integer(t[0]), reader.integer(t[1]), reader.integer(t[2]),
                                     reader.integer(t[3]), reader.integer(t[4]) != 0});
      }
    } else {
      reader.fail("unexpected keyword '" + tokens[0] + "'");
    }
  }
  if (surface.orientation.empty()) surface.orientation.assign(count, 1);
  if (!have_adjacency) surface.adjacency = detect_adjacency(surface.patches);
  surface.validate();
  return surface;
}

MultiPatchSurface read_multipatch(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open geometry file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_multipatch(buf.str());
}

std::string format_multipatch(const MultiPatchSurface& surface) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "patches " << surface.size() << '\n';
  for (const auto& p : surface.patches) {
    const NurbsPatch* n = p.nurbs();
    if (n == nullptr) throw InvalidArgument("format_multipatch: only NURBS patches can be written");
    out << "degrees " << n->degree_u << ' ' << n->degree_v << '\n';
    out << "knots_u";
    for (double k : n->knots_u) out << ' ' << k;
    out << "\nknots_v";
    for (double k : n->knots_v) out << ' ' << k;
    out << '\n';
    for (std::size_t k = 0; k < n->control.size(); ++k) {
      const Vec3& c = n->control[k];
      out << c.x() << ' ' << c.y() << ' ' << c.z() << ' ' << n->weights[k] << '\n';
    }
  }
  out << "orientation";
  for (int o : surface.orientation) out << ' ' << o;
  out << "\nadjacency " << surface.adjacency.size() << '\n';
  for (const auto& l : surface.adjacency) {
    out << l.patch << ' ' << l.edge << ' ' << l.other_patch << ' ' << l.other_edge << ' '
        << (l.reversed ? 1 : 0) << '\n';
  }
  return out.str();
}

}  // namespace roughscat::geometry
