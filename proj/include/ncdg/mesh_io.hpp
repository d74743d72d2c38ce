#pragma once

// Plain-text mesh format (see docs/mesh_format.md). Conformal pairs are not
// stored: they are rebuilt from shared vertex ids when the file is read.

#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "ncdg/mesh.hpp"

namespace ncdg {

inline constexpr int kMeshFormatVersion = 1;

inline void write_mesh(std::ostream& os, const Mesh& mesh) {
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  os << "ncdg-mesh " << kMeshFormatVersion << "\n";
  os << "vertices " << mesh.vertices().size() << "\n";
  for (const Vec2& v : mesh.vertices()) os << v.x << " " << v.y << "\n";
  os << "elements " << mesh.elements().size() << "\n";
  for (const Element& e : mesh.elements()) {
    os << e.vertex_ids[0] << " " << e.vertex_ids[1] << " " << e.vertex_ids[2] << " " << e.vertex_ids[3] << " "
       << e.geometry_order;
    for (const Vec2& g : e.geometry_nodes) os << " " << g.x << " " << g.y;
    os << "\n";
  }
  std::vector<std::pair<int, LinkKind>> tagged;
  std::vector<std::pair<int, int>> periodic;
  for (int h = 0; h < mesh.num_half_edges(); ++h) {
    const EdgeLink& l = mesh.link(h);
    if (l.kind == LinkKind::dirichlet_zero || l.kind == LinkKind::far_field) tagged.emplace_back(h, l.kind);
    if (l.kind == LinkKind::periodic && h < l.partner) periodic.emplace_back(h, l.partner);
  }
  os << "boundary " << tagged.size() << "\n";
  for (auto [h, k] : tagged) os << h << " " << (k == LinkKind::far_field ? "far-field" : "dirichlet-zero") << "\n";
  os << "periodic " << periodic.size() << "\n";
  for (auto [a, b] : periodic) os << a << " " << b << "\n";
  os << "zones " << mesh.zones().size() << "\n";
  for (const InterfaceZone& z : mesh.zones()) {
    os << "zone " << z.origin.x << " " << z.origin.y << " " << z.direction.x << " " << z.direction.y << " "
       << z.length << "\n";
    os << "left " << z.left_edges.size();
    for (int e : z.left_edges) os << " " << e;
    os << "\nright " << z.right_edges.size();
    for (int e : z.right_edges) os << " " << e;
    os << "\n";
  }
  os << "end\n";
}

namespace detail {

class MeshReader {
 public:
  explicit MeshReader(std::istream& is) : is_(is) {}

  void expect(const std::string& keyword) {
    std::string word;
    if (!(is_ >> word) || word != keyword) fail("expected '" + keyword + "', got '" + word + "'");
  }

  template <typename T>
  T read() {
    T value{};
    if (!(is_ >> value)) fail("unexpected end of input or malformed number");
    return value;
  }

  [[noreturn]] void fail(const std::string& msg) const { throw Error(ErrorCode::parse, "mesh file: " + msg); }

 private:
  std::istream& is_;
};

}  // namespace detail

inline Mesh read_mesh(std::istream& is) {
  detail::MeshReader in(is);
  in.expect("ncdg-mesh");
  const int version = in.read<int>();
  if (version != kMeshFormatVersion) in.fail("unsupported version " + std::to_string(version));

  in.expect("vertices");
  const auto nv = in.read<std::size_t>();
  std::vector<Vec2> vertices(nv);
  for (auto& v : vertices) {
    v.x = in.read<double>();
    v.y = in.read<double>();
  }
  in.expect("elements");
  const auto ne = in.read<std::size_t>();
  std::vector<Element> elements(ne);
  for (auto& e : elements) {
    for (int& v : e.vertex_ids) v = in.read<int>();
    e.geometry_order = in.read<int>();
    if (e.geometry_order < 1) in.fail("geometry order must be >= 1");
    if (e.geometry_order >= 2) {
      const std::size_t n = static_cast<std::size_t>(e.geometry_order + 1);
      e.geometry_nodes.resize(n * n);
      for (auto& g : e.geometry_nodes) {
        g.x = in.read<double>();
        g.y = in.read<double>();
      }
    }
  }
  Mesh mesh(std::move(vertices), std::move(elements));

  in.expect("boundary");
  const auto nb = in.read<std::size_t>();
  for (std::size_t i = 0; i < nb; ++i) {
    const int h = in.read<int>();
    const auto tag = in.read<std::string>();
    if (tag == "dirichlet-zero") {
      mesh.tag_boundary(h, LinkKind::dirichlet_zero);
    } else if (tag == "far-field") {
      mesh.tag_boundary(h, LinkKind::far_field);
    } else {
      in.fail("unknown boundary tag '" + tag + "'");
    }
  }
  in.expect("periodic");
  const auto np = in.read<std::size_t>();
  for (std::size_t i = 0; i < np; ++i) {
    const int a = in.read<int>();
    const int b = in.read<int>();
    mesh.pair_periodic(a, b);
  }
  in.expect("zones");
  const auto nz = in.read<std::size_t>();
  for (std::size_t i = 0; i < nz; ++i) {
    InterfaceZone z;
    in.expect("zone");
    z.origin.x = in.read<double>();
    z.origin.y = in.read<double>();
    z.direction.x = in.read<double>();
    z.direction.y = in.read<double>();
    z.length = in.read<double>();
    in.expect("left");
    z.left_edges.resize(in.read<std::size_t>());
    for (int& e : z.left_edges) e = in.read<int>();
    in.expect("right");
    z.right_edges.resize(in.read<std::size_t>());
    for (int& e : z.right_edges) e = in.read<int>();
    mesh.add_zone(std::move(z));
  }
  in.expect("end");
  mesh.finalize();
  return mesh;
}

inline std::string mesh_to_string(const Mesh& mesh) {
  std::ostringstream os;
  write_mesh(os, mesh);
  return os.str();
}

}  // namespace ncdg
