// Regenerates the bundled scene fixtures.  Deterministic: running it twice
// produces byte-identical files.  Usage: gen-scenes [output-dir]

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "holo/scenario.hpp"
#include "holo/simplex_geometry.hpp"

namespace {

using namespace holo;

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  std::cout << "wrote " << path.string() << " (" << content.size() << " bytes)\n";
}

GradedMap block_map(const GradedVectorSpace& V, int src, const Matrix& m, int degree) {
  GradedMap g(V, V, degree);
  g.set_block(src, m);
  return g;
}

// Two-dimensional connection  (A0 + A1 t) dt  on the interval; faces carry
// the (vanishing) pullbacks.
Scene interval_scene() {
  Scene s;
  s.name = "interval-transport";
  const GradedVectorSpace V(std::map<int, int>{{0, 2}});
  s.complex.space = V;
  s.complex.X = FiniteSimplicialSet::from_simplices(2, {{0, 1}});

  PolyForm edge(1, V);
  edge.add_term({1}, {0},
                block_map(V, 0, (Matrix(2, 2) << 0.3, -0.5, 0.7, 0.1).finished(), 0));
  edge.add_term({1}, {1},
                block_map(V, 0, (Matrix(2, 2) << -0.2, 0.4, 0.6, -0.3).finished(), 0));
  s.complex.forms.emplace(SimplexTuple{0, 1}, edge);
  s.complex.forms.emplace(SimplexTuple{0}, pullback(edge, face_map(1, 0)));
  s.complex.forms.emplace(SimplexTuple{1}, pullback(edge, face_map(0, 0)));
  s.transport.max_n = 24;
  return s;
}

// Unipotent polynomial gauge acting on both graded blocks of
// R^2 (degree 0) + R^2 (degree 1), with an exact polynomial inverse.
GaugeElement polynomial_gauge(int k, const GradedVectorSpace& V,
                              const std::vector<std::vector<double>>& coeffs) {
  // coeffs: four polynomials (upper/lower for each block), each with k+1
  // coefficients 1, t_1, ..., t_k.
  auto elementary = [&](int block, bool upper, const std::vector<double>& poly, double sign) {
    PolyForm f = zero_form_identity(k, V);
    for (int j = 0; j <= k; ++j) {
      if (poly[static_cast<std::size_t>(j)] == 0.0) continue;
      Matrix n = Matrix::Zero(2, 2);
      n(upper ? 0 : 1, upper ? 1 : 0) = sign * poly[static_cast<std::size_t>(j)];
      Exponents e(static_cast<std::size_t>(k), 0);
      if (j > 0) e[static_cast<std::size_t>(j - 1)] = 1;
      f.add_term({}, e, block_map(V, block, n, 0));
    }
    return f;
  };
  const PolyForm u0 = elementary(0, true, coeffs[0], 1.0);
  const PolyForm l0 = elementary(0, false, coeffs[1], 1.0);
  const PolyForm u1 = elementary(1, true, coeffs[2], 1.0);
  const PolyForm l1 = elementary(1, false, coeffs[3], 1.0);
  const PolyForm u0i = elementary(0, true, coeffs[0], -1.0);
  const PolyForm l0i = elementary(0, false, coeffs[1], -1.0);
  const PolyForm u1i = elementary(1, true, coeffs[2], -1.0);
  const PolyForm l1i = elementary(1, false, coeffs[3], -1.0);
  return GaugeElement{wedge(wedge(u0, l0), wedge(u1, l1)),
                      wedge(wedge(l1i, u1i), wedge(l0i, u0i))};
}

// Two-term complex over a triangle: gauge transform of the flat square-zero
// connection  del + eta dt1 dt2  by a polynomial gauge, so the result has
// nonconstant components in every form degree while staying exactly flat.
Scene triangle_scene() {
  Scene s;
  s.name = "triangle-two-term";
  const GradedVectorSpace V(std::map<int, int>{{0, 2}, {1, 2}});
  s.complex.space = V;
  s.complex.X = FiniteSimplicialSet::from_simplices(3, {{0, 1, 2}});

  PolyForm base(2, V);
  base.add_term({}, {0, 0},
                block_map(V, 0, (Matrix(2, 2) << 1.0, 0.0, 0.0, 0.0).finished(), 1));
  base.add_term({1, 2}, {0, 0},
                block_map(V, 1, (Matrix(2, 2) << 0.0, 0.0, 0.0, 0.8).finished(), -1));

  const GaugeElement g = polynomial_gauge(
      2, V, {{0.2, 0.5, -0.3}, {-0.4, 0.25, 0.1}, {0.3, -0.2, 0.4}, {0.1, 0.35, -0.15}});
  const PolyForm omega = gauge_act(base, g);

  s.complex.forms.emplace(SimplexTuple{0, 1, 2}, omega);
  const PolyForm e01 = pullback(omega, face_map(2, 1));
  const PolyForm e02 = pullback(omega, face_map(1, 1));
  const PolyForm e12 = pullback(omega, face_map(0, 1));
  s.complex.forms.emplace(SimplexTuple{0, 1}, e01);
  s.complex.forms.emplace(SimplexTuple{0, 2}, e02);
  s.complex.forms.emplace(SimplexTuple{1, 2}, e12);
  s.complex.forms.emplace(SimplexTuple{0}, pullback(e01, face_map(1, 0)));
  s.complex.forms.emplace(SimplexTuple{1}, pullback(e01, face_map(0, 0)));
  s.complex.forms.emplace(SimplexTuple{2}, pullback(e12, face_map(0, 0)));
  s.gauges.emplace(SimplexTuple{0, 1, 2}, g);
  s.transport.max_n = 32;
  return s;
}

// Octahedral sphere with the degree-(-1) area form, oriented so the total
// two-form mass is 4 pi.
Scene sphere_scene() {
  Scene s;
  s.name = "sphere-octahedron";
  const GradedVectorSpace V(std::map<int, int>{{0, 1}, {1, 1}});
  s.complex.space = V;
  const std::vector<std::pair<SimplexTuple, double>> triangles = {
      {{0, 1, 2}, 1.0},  {{0, 1, 5}, -1.0}, {{0, 2, 4}, 1.0},  {{0, 4, 5}, 1.0},
      {{1, 2, 3}, -1.0}, {{1, 3, 5}, -1.0}, {{2, 3, 4}, 1.0},  {{3, 4, 5}, -1.0}};
  std::vector<SimplexTuple> generators;
  for (const auto& [t, eps] : triangles) {
    (void)eps;
    generators.push_back(t);
  }
  s.complex.X = FiniteSimplicialSet::from_simplices(6, generators);

  const double pi = 3.14159265358979323846;
  for (const auto& [t, eps] : triangles) {
    PolyForm omega(2, V);
    omega.add_term({1, 2}, {0, 0},
                   block_map(V, 1, (Matrix(1, 1) << eps * pi).finished(), -1));
    s.complex.forms.emplace(t, omega);
  }
  for (int k = 0; k <= 1; ++k) {
    for (const SimplexTuple& t : s.complex.X.nondegenerate(k))
      s.complex.forms.emplace(t, PolyForm(k, s.complex.space));
  }
  s.transport.max_n = 24;
  return s;
}

// Edge form that does not match the pullback of the triangle form.
Scene bad_face_scene() {
  Scene s;
  s.name = "bad-face";
  const GradedVectorSpace V(std::map<int, int>{{0, 2}});
  s.complex.space = V;
  s.complex.X = FiniteSimplicialSet::from_simplices(3, {{0, 1, 2}});
  for (int k = 0; k <= 2; ++k) {
    for (const SimplexTuple& t : s.complex.X.nondegenerate(k))
      s.complex.forms.emplace(t, PolyForm(k, V));
  }
  PolyForm edge(1, V);
  edge.add_term({1}, {0},
                block_map(V, 0, (Matrix(2, 2) << 0.0, 1.0, 1.0, 0.0).finished(), 0));
  s.complex.forms.at(SimplexTuple{0, 1}) = edge;
  return s;
}

// Face-compatible family that fails the flatness equation on the triangle.
Scene bad_mc_scene() {
  Scene s;
  s.name = "bad-maurer-cartan";
  const GradedVectorSpace V(std::map<int, int>{{0, 2}});
  s.complex.space = V;
  s.complex.X = FiniteSimplicialSet::from_simplices(3, {{0, 1, 2}});

  PolyForm omega(2, V);
  omega.add_term({1}, {0, 0},
                 block_map(V, 0, (Matrix(2, 2) << 0.0, 1.0, 0.0, 0.0).finished(), 0));
  omega.add_term({2}, {0, 0},
                 block_map(V, 0, (Matrix(2, 2) << 0.0, 0.0, 1.0, 0.0).finished(), 0));
  s.complex.forms.emplace(SimplexTuple{0, 1, 2}, omega);
  const PolyForm e01 = pullback(omega, face_map(2, 1));
  const PolyForm e02 = pullback(omega, face_map(1, 1));
  const PolyForm e12 = pullback(omega, face_map(0, 1));
  s.complex.forms.emplace(SimplexTuple{0, 1}, e01);
  s.complex.forms.emplace(SimplexTuple{0, 2}, e02);
  s.complex.forms.emplace(SimplexTuple{1, 2}, e12);
  s.complex.forms.emplace(SimplexTuple{0}, pullback(e01, face_map(1, 0)));
  s.complex.forms.emplace(SimplexTuple{1}, pullback(e01, face_map(0, 0)));
  s.complex.forms.emplace(SimplexTuple{2}, pullback(e12, face_map(0, 0)));
  return s;
}

const char* kBadSchema = R"({
  "schema_version": 1,
  "name": "bad-schema",
  "space": {"0": 2},
  "simplices": [[0, 1]],
  "forms": {"0": [], "1": [], "0 1": []},
  "bogus": 3
}
)";

void check_roundtrip(const Scene& scene, double load_tol) {
  const std::string once = serialize_scene(scene);
  const Scene back = parse_scene_text(once, scene.name, load_tol);
  const std::string twice = serialize_scene(back);
  if (once != twice) throw std::runtime_error(scene.name + ": serialization not stable");
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path dir = argc > 1 ? argv[1] : "scenes";
  std::filesystem::create_directories(dir);
  try {
    for (const Scene& scene : {interval_scene(), triangle_scene(), sphere_scene()}) {
      check_roundtrip(scene, 1e-6);
      std::string file = scene.name;
      for (char& c : file) {
        if (c == '-') c = '_';
      }
      write_file(dir / (file + ".json"), serialize_scene(scene));
    }

    const Scene bad_face = bad_face_scene();
    try {
      parse_scene_text(serialize_scene(bad_face), bad_face.name);
      throw std::runtime_error("bad_face unexpectedly parsed clean");
    } catch (const InvariantError&) {
    }
    write_file(dir / "bad_face.json", serialize_scene(bad_face));

    const Scene bad_mc = bad_mc_scene();
    try {
      parse_scene_text(serialize_scene(bad_mc), bad_mc.name);
      throw std::runtime_error("bad_mc unexpectedly parsed clean");
    } catch (const InvariantError&) {
    }
    write_file(dir / "bad_mc.json", serialize_scene(bad_mc));

    try {
      parse_scene_text(kBadSchema, "bad_schema");
      throw std::runtime_error("bad_schema unexpectedly parsed clean");
    } catch (const SchemaError&) {
    }
    write_file(dir / "bad_schema.json", kBadSchema);
  } catch (const std::exception& e) {
    std::cerr << "gen-scenes failed: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
