// Acceptance gate: one line per criterion, exit 0 only when every criterion
// holds at its pinned tolerance.  Run as  acceptance --scenes <dir>.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "holo/ainfty_core.hpp"
#include "holo/scenario.hpp"
#include "support.hpp"

using namespace holo;
using namespace holo::testing;

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

std::string g_scene_dir = "scenes";

std::string scene_path(const std::string& name) { return g_scene_dir + "/" + name; }

// Matrix-valued polynomial 1-form on the interval with dense coefficients.
PolyForm random_interval_connection(int dim, Rng& rng, int max_degree = 3) {
  const GradedVectorSpace V = GradedVectorSpace::concentrated(0, dim);
  PolyForm omega(1, V);
  for (int p = 0; p <= max_degree; ++p) {
    GradedMap c(V, V, 0);
    c.set_block(0, random_matrix(dim, dim, rng, 1.0));
    omega.add_term({1}, {p}, c);
  }
  return omega;
}

Matrix oracle_interval(const PolyForm& omega, int dim, int steps = 4000) {
  return oracle::interval_holonomy(
      [&](double t) {
        return omega.evaluate_component({1}, Vector::Constant(1, t)).block(0);
      },
      dim, steps);
}

// ---------------------------------------------------------------------------
// Criteria

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome interval_vs_oracle() {
  const double t0 = now_seconds();
  Rng rng(1001);
  const TransportConfig cfg = test_config(80, 1e-10, 10);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const int dim = trial % 2 == 0 ? 2 : 3;
    const PolyForm omega = random_interval_connection(dim, rng);
    const Matrix got = hol_object(omega, 1, cfg).block(0);
    const Matrix ref = oracle_interval(omega, dim);
    worst = std::max(worst, (got - ref).cwiseAbs().maxCoeff());
  }
  const double elapsed = now_seconds() - t0;
  char buf[160];
  std::snprintf(buf, sizeof buf, "max deviation %.3e over 10 draws, %.2fs", worst, elapsed);
  return {worst <= 1e-6 && elapsed < 10.0, buf};
}

Outcome nilpotent_edge() {
  const GradedVectorSpace V = GradedVectorSpace::concentrated(0, 2);
  PolyForm omega(1, V);
  GradedMap c(V, V, 0);
  c.set_block(0, (Matrix(2, 2) << 0.0, 1.0, 0.0, 0.0).finished());
  omega.add_term({1}, {0}, c);
  const Matrix got = hol_object(omega, 1, test_config()).block(0);
  const Matrix want = (Matrix(2, 2) << 1.0, 1.0, 0.0, 1.0).finished();
  const double err = (got - want).cwiseAbs().maxCoeff();
  char buf[120];
  std::snprintf(buf, sizeof buf, "deviation %.3e from the unipotent transport", err);
  return {err <= 1e-9, buf};
}

Outcome degenerate_pullbacks() {
  Rng rng(1003);
  const GradedVectorSpace V({{0, 2}, {1, 2}});
  const TransportConfig cfg = test_config();
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const PolyForm omega = random_form(1, V, 1, rng, 2, 0.6);
    for (int i = 1; i <= 2; ++i) {
      const PolyForm lifted = pullback(omega, degeneracy_map(i, 2));
      const GradedMap f2 = hol_object(lifted, 2, cfg);
      if (!f2.is_zero()) worst = std::max(worst, f2.sup_norm());
    }
  }
  char buf[120];
  std::snprintf(buf, sizeof buf, "largest triangle operator %.3e over 10 draws", worst);
  return {worst <= 1e-6, buf};
}

Outcome gauge_equivariance() {
  Rng rng(1004);
  const GradedVectorSpace V({{0, 2}, {1, 2}});
  const TransportConfig cfg = test_config();
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const int k = trial < 5 ? 1 : 2;
    const PolyForm omega = random_form(k, V, 1, rng, 2, 0.5);
    const GaugeElement f = random_polynomial_gauge(k, V, rng, 0.4);
    const GradedMap h = hol_object(omega, k, cfg);
    const GradedMap h_acted = hol_object(gauge_act(omega, f), k, cfg);
    const Matrix f0 = f.f_inverse.evaluate_component({}, vertex_point(0, k)).flatten();
    const Matrix fk = f.f.evaluate_component({}, vertex_point(k, k)).flatten();
    const Matrix expected = f0 * h.flatten() * fk;
    worst = std::max(worst, (h_acted.flatten() - expected).cwiseAbs().maxCoeff());
  }
  char buf[120];
  std::snprintf(buf, sizeof buf, "max conjugation defect %.3e over 10 pairs", worst);
  return {worst <= 1e-6, buf};
}

Outcome bundled_scene_structure() {
  double worst = 0.0;
  std::string detail;
  for (const std::string name :
       {"interval_transport.json", "triangle_two_term.json", "sphere_octahedron.json"}) {
    const Scene scene = load_scene(scene_path(name));
    const SimplicialRep rep = integrate_rep(scene.complex, scene.transport);
    const double res = structure_residual(rep);
    worst = std::max(worst, res);
    detail += (detail.empty() ? "" : ", ") + scene.name + " " +
              [&] {
                char b[32];
                std::snprintf(b, sizeof b, "%.2e", res);
                return std::string(b);
              }();
  }
  return {worst <= 1e-5, "face-equation residuals: " + detail};
}

Outcome morphism_equation() {
  Rng rng(1006);
  FormContext ctx = FormContext::model(2, GradedVectorSpace({{0, 2}, {1, 2}}));
  ctx.cfg.max_n = 60;
  auto form = [&](int deg) { return random_form(2, ctx.V, deg, rng, 1, 0.4); };
  const std::vector<std::vector<int>> tuples{{0},    {1},    {2},       {1, 1},
                                             {2, 1}, {1, 2}, {1, 1, 1}, {0, 1, 2}};
  double worst = 0.0;
  for (const auto& degs : tuples) {
    std::vector<PolyForm> args;
    for (int d : degs) args.push_back(form(d));
    worst = std::max(worst, transport_residual(ctx, args));
  }
  char buf[120];
  std::snprintf(buf, sizeof buf, "max residual %.3e over tuples up to length 3", worst);
  return {worst <= 1e-6, buf};
}

Outcome functor_equation() {
  Rng rng(1007);
  const std::vector<GradedVectorSpace> all{GradedVectorSpace({{0, 2}, {1, 2}}),
                                           GradedVectorSpace({{0, 1}, {1, 2}}),
                                           GradedVectorSpace({{0, 2}, {1, 1}})};
  auto make_chain = [&](int m, const std::vector<int>& degs) {
    const int n = static_cast<int>(degs.size());
    std::vector<GradedVectorSpace> spaces(all.begin(), all.begin() + n + 1);
    std::vector<PolyForm> conns;
    for (int i = 0; i <= n; ++i)
      conns.push_back(random_flat_connection(m, spaces[static_cast<std::size_t>(i)], rng, 0.15));
    const DirectSum sum(spaces);
    std::vector<PolyForm> xs;
    for (int i = 1; i <= n; ++i) {
      PolyForm x(m, sum.total());
      const PolyForm dense =
          random_form(m, sum.total(), degs[static_cast<std::size_t>(i - 1)], rng, 1, 0.3);
      dense.for_each_term([&](const FormIndex& I, const Exponents& e, const GradedMap& c) {
        x.add_term(I, e, sum.embed(sum.extract(c, i - 1, i), i - 1, i));
      });
      xs.push_back(x);
    }
    return ChainContext(m, std::move(spaces), std::move(conns), std::move(xs),
                        test_config(100, 1e-10, 10));
  };
  double worst = 0.0;
  for (int m : {1, 2}) {
    for (const std::vector<int>& degs :
         std::vector<std::vector<int>>{{0}, {1}, {0, 1}, {1, 1}}) {
      worst = std::max(worst, chain_residual(make_chain(m, degs)));
    }
  }
  char buf[140];
  std::snprintf(buf, sizeof buf,
                "max residual %.3e over chains of length 1..2 on dimensions 1..2", worst);
  return {worst <= 1e-5, buf};
}

Outcome path_factorization() {
  Rng rng(1008);
  const TransportConfig cfg = test_config();
  const PiecewiseLinearPath edge = theta_polyline(1, CubePoint());
  const PiecewiseLinearPath boundary = mu_concat(edge, edge, 1, 2);
  const PiecewiseLinearPath wall = theta_polyline(2, Vector::Constant(1, 1.0));
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const int dim = trial % 2 == 0 ? 2 : 3;
    const GradedVectorSpace V = GradedVectorSpace::concentrated(0, dim);
    PolyForm omega(2, V);
    for (int axis = 1; axis <= 2; ++axis) {
      for (const Exponents& e :
           std::vector<Exponents>{{0, 0}, {1, 0}, {0, 1}, {1, 1}}) {
        GradedMap c(V, V, 0);
        c.set_block(0, random_matrix(dim, dim, rng, 0.8));
        omega.add_term({axis}, e, c);
      }
    }
    const Matrix through_wall = path_transport(omega, wall, cfg);
    const Matrix through_vertex = path_transport(omega, boundary, cfg);
    worst = std::max(worst, (through_wall - through_vertex).cwiseAbs().maxCoeff());
  }
  char buf[140];
  std::snprintf(buf, sizeof buf, "max concatenation defect %.3e over 10 connections", worst);
  return {worst <= 1e-6, buf};
}

Outcome sphere_demo() {
  const double t0 = now_seconds();
  const Scene scene = load_scene(scene_path("sphere_octahedron.json"));
  RunOptions opt;
  opt.cfg = scene.transport;
  Report report;
  const int code = run_command("sphere-demo", &scene, opt, report);
  const double elapsed = now_seconds() - t0;
  const bool ok = code == 0 && report.get_bool("pass") && report.get_bool("pass.mass") &&
                  report.get_bool("pass.twisted") && report.get_bool("pass.untwisted") &&
                  elapsed < 60.0;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "exit %d, mass/twisted/untwisted checks %s, %.1fs", code,
                ok ? "pass" : "fail", elapsed);
  return {ok, buf};
}

Outcome cube_parametrization_degree() {
  Rng rng(1010);
  std::vector<double> nodes, weights;
  double worst = 0.0;
  for (int k = 1; k <= 3; ++k) {
    for (int trial = 0; trial < 5; ++trial) {
      // Random polynomial density of the top form.
      std::vector<std::pair<Exponents, double>> monomials;
      for (int j = 0; j < 3; ++j) {
        Exponents e(static_cast<std::size_t>(k));
        for (int a = 0; a < k; ++a)
          e[static_cast<std::size_t>(a)] = rng.uniform_int(0, 2);
        monomials.emplace_back(e, rng.uniform(-1.0, 1.0));
      }
      auto density = [&](const SimplexPoint& p) {
        double out = 0.0;
        for (const auto& [e, c] : monomials) {
          double term = c;
          for (int a = 0; a < k; ++a)
            term *= std::pow(p(a), e[static_cast<std::size_t>(a)]);
          out += term;
        }
        return out;
      };

      double simplex_integral = 0.0;
      for (const auto& [e, c] : monomials) {
        std::vector<int> exps(e.begin(), e.end());
        simplex_integral += c * oracle::simplex_monomial_integral(exps);
      }

      // Pullback integral over the parameter cube, cells split at the grid.
      auto time_integral = [&](const CubePoint& x) {
        const std::vector<double> grid = theta_time_grid(k, x);
        gauss_legendre_unit(10, nodes, weights);
        double out = 0.0;
        for (std::size_t cell = 0; cell + 1 < grid.size(); ++cell) {
          const double a = grid[cell];
          const double b = grid[cell + 1];
          if (b - a < 1e-13) continue;
          for (std::size_t q = 0; q < nodes.size(); ++q) {
            const double t = a + (b - a) * nodes[q];
            const Matrix J = theta_jacobian(k, x, t);
            out += (b - a) * weights[q] * density(theta_path(k, x, t)) * J.determinant();
          }
        }
        return out;
      };

      double cube_integral = 0.0;
      if (k == 1) {
        cube_integral = time_integral(CubePoint());
      } else if (k == 2) {
        gauss_legendre_unit(16, nodes, weights);
        const std::vector<double> xs = nodes;
        const std::vector<double> ws = weights;
        for (std::size_t q = 0; q < xs.size(); ++q)
          cube_integral += ws[q] * time_integral(Vector::Constant(1, xs[q]));
      } else {
        // Split the (x1, x2) square along the diagonal so every cell of the
        // time grid stays polynomial in the quadrature variables.
        gauss_legendre_unit(12, nodes, weights);
        const std::vector<double> xs = nodes;
        const std::vector<double> ws = weights;
        for (std::size_t qa = 0; qa < xs.size(); ++qa) {
          for (std::size_t qb = 0; qb < xs.size(); ++qb) {
            const double a = xs[qa];
            const double b = xs[qb];
            CubePoint lower(2), upper(2);
            lower << a * b, b;
            upper << b, a * b;
            cube_integral +=
                ws[qa] * ws[qb] * b * (time_integral(lower) + time_integral(upper));
          }
        }
      }

      const double want = (k % 2 == 0 ? 1.0 : -1.0) * simplex_integral;
      worst = std::max(worst, std::abs(cube_integral - want));
    }
  }
  char buf[140];
  std::snprintf(buf, sizeof buf,
                "max orientation defect %.3e over 15 top forms in dimensions 1..3", worst);
  return {worst <= 1e-6, buf};
}

Outcome ordinary_representations() {
  Rng rng(1011);
  const GradedVectorSpace V = GradedVectorSpace::concentrated(0, 2);
  const TransportConfig cfg = test_config();
  FiniteSimplicialSet X = FiniteSimplicialSet::from_simplices(3, {{0, 1, 2}});
  double worst_edge = 0.0;
  double worst_higher = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    // Pure gauge: exactly flat, with nonabelian polynomial edge transport.
    const PolyForm omega =
        gauge_act(PolyForm(2, V), random_polynomial_gauge(2, V, rng, 0.6));
    FormValuedComplex cx;
    cx.X = X;
    cx.space = V;
    for (int k = 0; k <= 2; ++k) {
      for (const SimplexTuple& s : X.nondegenerate(k))
        cx.forms.emplace(s, pullback(omega, vertex_inclusion(s, 2)));
    }
    const SimplicialRep rep = integrate_rep(cx, cfg);
    for (const SimplexTuple& s : X.nondegenerate(2))
      worst_higher = std::max(worst_higher, rep.op(s).sup_norm());
    for (const SimplexTuple& s : X.nondegenerate(1)) {
      const PolyForm edge_form = pullback(omega, vertex_inclusion(s, 2));
      const Matrix ref = oracle_interval(edge_form, 2);
      worst_edge = std::max(worst_edge, (rep.op(s).block(0) - ref).cwiseAbs().maxCoeff());
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "triangle operators %.3e (exact zero required), edges %.3e vs oracle",
                worst_higher, worst_edge);
  return {worst_higher == 0.0 && worst_edge <= 1e-6, buf};
}

Outcome verify_ainfty_command() {
  RunOptions opt;
  Report report;
  const int code = run_command("verify-ainfty", nullptr, opt, report);
  const bool ok = code == 0 && report.get_bool("pass");
  char buf[80];
  std::snprintf(buf, sizeof buf, "exit %d, report pass=%s", code, ok ? "true" : "false");
  return {ok, buf};
}

Outcome deterministic_reports() {
  const Scene interval = load_scene(scene_path("interval_transport.json"));
  const Scene triangle = load_scene(scene_path("triangle_two_term.json"));
  auto run_twice = [&](const std::string& cmd, const Scene* scene) {
    RunOptions opt;
    if (scene != nullptr) opt.cfg = scene->transport;
    Report a, b;
    run_command(cmd, scene, opt, a);
    run_command(cmd, scene, opt, b);
    return a.to_text() == b.to_text() && a.to_json() == b.to_json();
  };
  const bool ok = run_twice("holonomy", &interval) && run_twice("check-rep", &triangle) &&
                  run_twice("cohomology", &triangle) && run_twice("verify-ainfty", nullptr);
  return {ok, ok ? "all command reports byte-identical across repeated runs"
                 : "some command produced differing bytes"};
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--scenes" && i + 1 < argc) {
      g_scene_dir = argv[++i];
    } else {
      std::fprintf(stderr, "usage: %s [--scenes <dir>]\n", argv[0]);
      return 2;
    }
  }

  struct Criterion {
    const char* label;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"interval holonomy matches the ODE oracle", interval_vs_oracle},
      {"nilpotent edge transport is exact", nilpotent_edge},
      {"degenerate pullbacks carry no triangle transport", degenerate_pullbacks},
      {"holonomy is gauge equivariant", gauge_equivariance},
      {"bundled scenes satisfy the face equations", bundled_scene_structure},
      {"transport cochains satisfy the morphism equation", morphism_equation},
      {"chain transport satisfies the functor equation", functor_equation},
      {"boundary transport factors through the middle vertex", path_factorization},
      {"sphere demonstration reproduces mass and rank jumps", sphere_demo},
      {"cube parametrization has degree (-1)^k", cube_parametrization_degree},
      {"single-degree bundles give ordinary representations", ordinary_representations},
      {"multiplication structure verifier passes", verify_ainfty_command},
      {"command reports are deterministic", deterministic_reports},
  };

  bool all_pass = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome out;
    try {
      out = criteria[i].run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    all_pass = all_pass && out.pass;
    std::printf("%s  %2zu  %s (%s)\n", out.pass ? "PASS" : "FAIL", i + 1, criteria[i].label,
                out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%s\n", all_pass ? "ACCEPTANCE: all criteria satisfied"
                               : "ACCEPTANCE: at least one criterion failed");
  return all_pass ? 0 : 1;
}
