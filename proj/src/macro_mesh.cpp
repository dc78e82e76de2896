#include "psflow/macro_mesh.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "psflow/error.hpp"

namespace psflow {

namespace {

constexpr double kDegenerateAreaFactor = 1e-14;

std::string edge_name(int a, int b) {
  std::ostringstream os;
  os << "(" << a << ", " << b << ")";
  return os.str();
}

}  // namespace

MacroMesh::MacroMesh(std::vector<Point2> vertices, std::vector<std::array<int, 3>> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
  if (vertices_.empty() || triangles_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "mesh needs at least one vertex and one triangle");
  }
  for (std::size_t v = 0; v < vertices_.size(); ++v) {
    if (!is_finite(vertices_[v])) {
      throw Error(ErrorCode::kInvalidArgument, "vertex " + std::to_string(v) + " is not finite");
    }
  }
  orient_and_validate_triangles();
  build_edges();
  build_boundary_cycle();
}

void MacroMesh::orient_and_validate_triangles() {
  Point2 lo = vertices_[0], hi = vertices_[0];
  for (const Point2& p : vertices_) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
  const double bbox_area = (hi.x - lo.x) * (hi.y - lo.y);
  const double min_area = kDegenerateAreaFactor * bbox_area;
  const int nv = num_vertices();

  std::vector<bool> used(vertices_.size(), false);
  for (std::size_t k = 0; k < triangles_.size(); ++k) {
    auto& t = triangles_[k];
    for (int v : t) {
      if (v < 0 || v >= nv) {
        throw Error(ErrorCode::kInvalidArgument, "triangle " + std::to_string(k) +
                                                     " references vertex " + std::to_string(v) +
                                                     " out of range");
      }
      used[v] = true;
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      throw Error(ErrorCode::kDegenerate, "triangle " + std::to_string(k) + " repeats a vertex");
    }
    const double area2 = signed_area2(vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]);
    if (!(0.5 * std::abs(area2) >= min_area) || area2 == 0.0) {
      throw Error(ErrorCode::kDegenerate, "triangle " + std::to_string(k) + " has area below tolerance");
    }
    if (area2 < 0.0) std::swap(t[1], t[2]);
    const auto first = std::min_element(t.begin(), t.end());
    std::rotate(t.begin(), first, t.end());
  }
  for (std::size_t v = 0; v < used.size(); ++v) {
    if (!used[v]) {
      throw Error(ErrorCode::kNonConforming, "vertex " + std::to_string(v) + " is not used by any triangle");
    }
  }
}

void MacroMesh::build_edges() {
  std::map<std::pair<int, int>, int> lookup;
  // Direction in which the first owning triangle traverses the edge.
  std::vector<int> first_from;
  triangle_edges_.resize(triangles_.size());
  vertex_triangles_.assign(vertices_.size(), {});

  for (int k = 0; k < num_triangles(); ++k) {
    const auto& t = triangles_[k];
    for (int i = 0; i < 3; ++i) {
      vertex_triangles_[t[i]].push_back(k);
      const int a = t[i], b = t[(i + 1) % 3];
      const auto key = std::minmax(a, b);
      auto [it, inserted] = lookup.try_emplace({key.first, key.second}, num_edges());
      if (inserted) {
        MacroEdge e;
        e.vertices = {key.first, key.second};
        e.triangles = {k, kNoTriangle};
        edges_.push_back(e);
        first_from.push_back(a);
      } else {
        MacroEdge& e = edges_[it->second];
        if (e.triangles[1] != kNoTriangle) {
          throw Error(ErrorCode::kNonConforming,
                      "non-conforming: edge " + edge_name(a, b) + " has more than two triangles");
        }
        if (first_from[it->second] == a) {
          throw Error(ErrorCode::kNonConforming,
                      "non-conforming: triangles " + std::to_string(e.triangles[0]) + " and " +
                          std::to_string(k) + " overlap across edge " + edge_name(a, b));
        }
        e.triangles[1] = k;
      }
      triangle_edges_[k][i] = it->second;
    }
  }

  vertex_exterior_.assign(vertices_.size(), false);
  num_interior_edges_ = 0;
  for (const MacroEdge& e : edges_) {
    if (e.exterior()) {
      vertex_exterior_[e.vertices[0]] = true;
      vertex_exterior_[e.vertices[1]] = true;
    } else {
      ++num_interior_edges_;
    }
  }
  num_interior_vertices_ = static_cast<int>(std::count(vertex_exterior_.begin(), vertex_exterior_.end(), false));

  if (num_edges() - num_triangles() != num_vertices() - 1) {
    throw Error(ErrorCode::kNonConforming,
                "Euler identity |E| - |T| = |V| - 1 fails; domain is not simply connected");
  }
}

void MacroMesh::build_boundary_cycle() {
  // Each exterior edge, oriented as its triangle traverses it, has the domain on the left.
  std::vector<int> next(vertices_.size(), -1);
  std::vector<int> next_edge(vertices_.size(), -1);
  int start = -1;
  int count = 0;
  for (int k = 0; k < num_triangles(); ++k) {
    const auto& t = triangles_[k];
    for (int i = 0; i < 3; ++i) {
      const int e = triangle_edges_[k][i];
      if (!edges_[e].exterior()) continue;
      const int a = t[i], b = t[(i + 1) % 3];
      if (next[a] != -1) {
        throw Error(ErrorCode::kNonConforming,
                    "boundary is not a single closed cycle at vertex " + std::to_string(a));
      }
      next[a] = b;
      next_edge[a] = e;
      if (start == -1 || a < start) start = a;
      ++count;
    }
  }
  int v = start;
  do {
    if (next[v] == -1) {
      throw Error(ErrorCode::kNonConforming, "boundary is open at vertex " + std::to_string(v));
    }
    boundary_vertices_.push_back(v);
    boundary_edges_.push_back(next_edge[v]);
    v = next[v];
  } while (v != start && static_cast<int>(boundary_vertices_.size()) <= count);
  if (static_cast<int>(boundary_vertices_.size()) != count) {
    throw Error(ErrorCode::kNonConforming, "boundary has more than one cycle");
  }
}

std::array<Point2, 3> MacroMesh::triangle_points(int k) const {
  const auto& t = triangles_[k];
  return {vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]};
}

double MacroMesh::triangle_area(int k) const {
  const auto p = triangle_points(k);
  return psflow::triangle_area(p[0], p[1], p[2]);
}

int MacroMesh::find_edge(int a, int b) const {
  for (int k : vertex_triangles_[a]) {
    for (int e : triangle_edges_[k]) {
      const auto& ev = edges_[e].vertices;
      if ((ev[0] == a && ev[1] == b) || (ev[0] == b && ev[1] == a)) return e;
    }
  }
  return -1;
}

double MacroMesh::max_diameter() const {
  double h = 0.0;
  for (int k = 0; k < num_triangles(); ++k) {
    const auto p = triangle_points(k);
    h = std::max(h, triangle_diameter(p[0], p[1], p[2]));
  }
  return h;
}

MacroMesh generate_structured(int n) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "structured mesh needs n >= 1");
  std::vector<Point2> vertices;
  vertices.reserve(static_cast<std::size_t>((n + 1) * (n + 1)));
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      vertices.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
    }
  }
  std::vector<std::array<int, 3>> triangles;
  triangles.reserve(static_cast<std::size_t>(2 * n * n));
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int v00 = j * (n + 1) + i;
      const int v10 = v00 + 1;
      const int v01 = v00 + n + 1;
      const int v11 = v01 + 1;
      triangles.push_back({v00, v10, v11});
      triangles.push_back({v00, v11, v01});
    }
  }
  return MacroMesh(std::move(vertices), std::move(triangles));
}

namespace {

class TokenReader {
 public:
  explicit TokenReader(std::istream& in) : in_(in) {}

  template <typename T>
  T next(const char* what) {
    std::string token;
    while (!(line_ >> token)) {
      std::string raw;
      if (!std::getline(in_, raw)) {
        throw Error(ErrorCode::kParse, std::string("unexpected end of file reading ") + what);
      }
      ++line_number_;
      const auto first = raw.find_first_not_of(" \t\r");
      if (first != std::string::npos && raw[first] == '#') raw.clear();
      line_.clear();
      line_.str(raw);
    }
    std::istringstream conv(token);
    T value{};
    conv >> value;
    if (conv.fail() || !conv.eof()) {
      throw Error(ErrorCode::kParse, "line " + std::to_string(line_number_) + ": cannot read " + what +
                                         " from '" + token + "'");
    }
    return value;
  }

 private:
  std::istream& in_;
  std::istringstream line_;
  int line_number_ = 0;
};

}  // namespace

MacroMesh parse_mesh(std::istream& in) {
  TokenReader reader(in);
  const long nv = reader.next<long>("vertex count");
  const long nt = reader.next<long>("triangle count");
  if (nv <= 0 || nt <= 0) throw Error(ErrorCode::kParse, "vertex and triangle counts must be positive");
  std::vector<Point2> vertices(static_cast<std::size_t>(nv));
  for (auto& p : vertices) {
    p.x = reader.next<double>("vertex x");
    p.y = reader.next<double>("vertex y");
  }
  std::vector<std::array<int, 3>> triangles(static_cast<std::size_t>(nt));
  for (auto& t : triangles) {
    for (int& v : t) v = reader.next<int>("triangle vertex index");
  }
  return MacroMesh(std::move(vertices), std::move(triangles));
}

MacroMesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open mesh file " + path.string());
  return parse_mesh(in);
}

void write_mesh(const MacroMesh& mesh, std::ostream& out) {
  out << mesh.num_vertices() << ' ' << mesh.num_triangles() << '\n';
  out << std::setprecision(17);
  for (const Point2& p : mesh.vertices()) out << p.x << ' ' << p.y << '\n';
  for (const auto& t : mesh.triangles()) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

VertexStar vertex_star(const MacroMesh& mesh, int z) {
  if (z < 0 || z >= mesh.num_vertices()) {
    throw Error(ErrorCode::kInvalidArgument, "vertex index out of range");
  }
  struct Wedge {
    int triangle, from, to;  // counter-clockwise: center -> from -> to
  };
  std::vector<Wedge> wedges;
  for (int k : mesh.vertex_triangles(z)) {
    const auto& t = mesh.triangles()[k];
    const int j = static_cast<int>(std::find(t.begin(), t.end(), z) - t.begin());
    wedges.push_back({k, t[(j + 1) % 3], t[(j + 2) % 3]});
  }

  VertexStar star;
  star.center = z;
  star.cyclic = !mesh.vertex_exterior(z);

  std::size_t current = 0;
  if (!star.cyclic) {
    // The fan starts at the wedge whose incoming edge is not shared.
    for (std::size_t w = 0; w < wedges.size(); ++w) {
      const bool has_predecessor = std::any_of(wedges.begin(), wedges.end(),
                                               [&](const Wedge& o) { return o.to == wedges[w].from; });
      if (!has_predecessor) {
        current = w;
        break;
      }
    }
  }
  std::vector<bool> visited(wedges.size(), false);
  for (std::size_t step = 0; step < wedges.size(); ++step) {
    const Wedge& w = wedges[current];
    visited[current] = true;
    star.triangles.push_back(w.triangle);
    star.edges.push_back(mesh.find_edge(z, w.from));
    const auto it = std::find_if(wedges.begin(), wedges.end(), [&](const Wedge& o) { return o.from == w.to; });
    if (it == wedges.end()) {
      star.edges.push_back(mesh.find_edge(z, w.to));
      break;
    }
    current = static_cast<std::size_t>(it - wedges.begin());
    if (visited[current]) break;
  }
  if (star.triangles.size() != wedges.size()) {
    throw Error(ErrorCode::kNonConforming, "vertex " + std::to_string(z) + " star is not a single fan");
  }
  return star;
}

}  // namespace psflow
