#pragma once

#include "dphase/field.hpp"
#include "dphase/nonvar.hpp"
#include "dphase/operators.hpp"

#include <map>
#include <stdexcept>
#include <string>

namespace dphase {

// Configuration failure with the offending section/key when known.
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string section, std::string key, const std::string& message)
      : std::runtime_error(message), section_(std::move(section)), key_(std::move(key)) {}
  const std::string& section() const noexcept { return section_; }
  const std::string& key() const noexcept { return key_; }

private:
  std::string section_, key_;
};

// Sectioned `key = value` configuration.  Unknown sections or keys are
// rejected; expression-valued keys are validated when the fields are
// built.
struct Config {
  // [domain]
  std::string shape = "rect";          // rect | disc  (required key)
  double x0 = 0, y0 = 0, x1 = 1, y1 = 1;
  double cx = 0, cy = 0, radius = 1;
  int nx = 32, ny = 32;
  int levels = 4;
  int n = 3;            // analytic dimension for the hypothesis checks
  int sample_grid = 64; // extrema/hypothesis sampling resolution

  // [exponents]  (expression strings in x, y)
  std::string p = "2.5", q = "2.8", r = "2", s = "1.8";

  // [coefficients]
  std::string mu = "1", alpha = "1", gamma = "1";

  // [rhs]
  std::string g = "0";
  double nu_x = 0, nu_y = 0;
  std::string rhs_mode = "fixed";  // fixed | convective

  // [nonlinearity]
  std::string family = "paper_f1";  // paper_f1 | expression
  double c1 = 1, c2 = 1;
  std::string nonlin_s;             // defaults to [exponents] s
  std::string f;                    // expression family: f(x,y,t)

  // [solver]
  double tol_res = 1e-8;
  double tol_fix = 1e-7;
  int max_iters = 10000;
  int max_outer = 200;
  double damping = 1.0;
  double lambda = 0;        // 0: derive from the computed lower threshold
  double lambda0 = 1.0;
  unsigned long rng_seed = 42;
  double cutoff_r_lambda = 0;  // 0: auto from the admissible bound
  double cutoff_radius = 0;    // 0: inscribed-ball radius
  int embedding_trials = 24;

  // [output]
  std::string report_path;     // empty: stdout
  std::string solution_csv;
  std::string trace_csv;
  std::string mesh_csv;
  std::string props_csv;

  static Config parse(const std::string& text);
  static Config parse_file(const std::string& path);

  // Normalized echo; parsing it back yields an equivalent Config.
  std::string to_text() const;

  DomainSpec domain() const;
  Mesh build_mesh() const;
  FieldSet build_fields() const;
  NonlinearitySpec build_nonlinearity() const;
  RhsSpec build_rhs() const;
  DescentParams descent_params() const;
  OuterParams outer_params() const;
};

}  // namespace dphase
