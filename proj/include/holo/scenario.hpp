// Scene files, deterministic reports, and the command layer shared by the
// command-line tool and the acceptance suite.
//
// A scene bundles a form-valued complex (graded space, simplicial set, one
// polynomial form per nondegenerate simplex), optional gauge pairs, and
// transport-configuration overrides, all in a versioned JSON format described
// in docs/scene_format.md.  Loading re-checks every structural invariant and,
// unless disabled, gates on the numeric face-compatibility and flatness
// residuals so that malformed fixtures fail early with a named simplex.

#ifndef HOLO_SCENARIO_HPP
#define HOLO_SCENARIO_HPP

#include <limits>
#include <map>
#include <string>
#include <vector>

#include "holo/holonomy.hpp"

namespace holo {

struct Scene {
  std::string name;
  FormValuedComplex complex;
  std::map<SimplexTuple, GaugeElement> gauges;
  TransportConfig transport;  // defaults overlaid with the scene's overrides
};

std::string simplex_key(const SimplexTuple& s);            // "0 1 2"
SimplexTuple parse_simplex_key(const std::string& text);   // throws SchemaError

// Parses and validates scene text.  Numeric validation (face compatibility
// and flatness) is gated at load_tol; pass +infinity to defer it to the
// caller (the check-rep command does, so it can report the residuals).
Scene parse_scene_text(const std::string& text, const std::string& origin = "<memory>",
                       double load_tol = 1e-6);
Scene load_scene(const std::string& path, double load_tol = 1e-6);

// Canonical JSON form; parse_scene_text(serialize_scene(s)) round-trips.
std::string serialize_scene(const Scene& scene);

// Ordered key/value report with byte-stable text and JSON renderings; all
// floating-point values go through format_double.
class Report {
 public:
  void add(const std::string& key, const std::string& value);
  void add_number(const std::string& key, double value);
  void add_int(const std::string& key, long long value);
  void add_bool(const std::string& key, bool value);
  void add_matrix(const std::string& key, const Matrix& m);
  void add_int_list(const std::string& key, const std::vector<int>& values);

  bool get_bool(const std::string& key) const;  // throws when absent

  std::string to_text() const;
  std::string to_json() const;
  std::string render(const std::string& format) const;  // "text" | "json"

 private:
  enum class Kind { kString, kRaw };
  struct Entry {
    std::string key;
    std::string value;
    Kind kind;
  };
  std::vector<Entry> entries_;
};

struct RunOptions {
  TransportConfig cfg;
  std::uint64_t seed = 20260814ull;
  int dim_cap = 6;
  std::string format = "text";
};

// Dispatches one command (holonomy | check-rep | cohomology | sphere-demo |
// verify-ainfty) and fills the report.  Returns the process exit code: 0 on
// success, 4 when a verification command finds violations.  Scene may be
// null only for verify-ainfty.
int run_command(const std::string& command, const Scene* scene, const RunOptions& opt,
                Report& report);

}  // namespace holo

#endif
