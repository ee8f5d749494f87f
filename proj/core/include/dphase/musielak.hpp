#pragma once

#include "dphase/field.hpp"
#include "dphase/mesh.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace dphase {

enum class PowJoin { Join, Meet };

// The bracket powers t^{a∨b} and t^{a∧b}: join is the larger of t^a and
// t^b, meet the smaller (the branch flips at t = 1).
double notation_pow(double t, double a, double b, PowJoin mode);

enum class Regime { BelowOne, EqualOne, AboveOne };

struct SlackRecord {
  std::string property_id;
  bool pass = false;
  double slack = 0;  // +inf when the property's antecedent does not apply
};

// Modular/norm values for one sample plus the slack of every checked
// inequality.  rho and norm are zero together or positive together.
struct ModularReport {
  double rho = 0;
  double norm = 0;
  Regime regime = Regime::BelowOne;
  std::vector<SlackRecord> slacks;
};

// Raised when 200 bracket doublings fail to enclose the unit-modular
// level (the modular is not finite).
class NormBracketError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// rho(u) = ∫ |u|^{p(x)}; 3-point quadrature.
double modular_px(const DiscreteFunction& u, const ScalarField& p);

// rho_H(u) = ∫ (|u|^{p(x)} + mu(x)|u|^{q(x)}).  Reduces to modular_px
// bit-for-bit when mu == 0 everywhere.
double modular_H(const DiscreteFunction& u, const ScalarField& p, const ScalarField& q,
                 const ScalarField& mu);

// Same modular evaluated on the per-element gradient magnitude |∇u|.
double modular_H_gradient(const DiscreteFunction& u, const ScalarField& p,
                          const ScalarField& q, const ScalarField& mu);

// Root of rho(u/ζ) = 1 for a strictly decreasing scaled modular:
// doubling/halving bracket from ζ = 1, then bisection to 1e-10 relative
// width.  Returns 0 when rho_scaled(1) == 0 (u vanishes).
double luxemburg_norm(const std::function<double(double)>& rho_scaled);

double norm_px(const DiscreteFunction& u, const ScalarField& p);
double norm_H(const DiscreteFunction& u, const ScalarField& p, const ScalarField& q,
              const ScalarField& mu);
// ||u||_{1,H,0} = || |∇u| ||_H, the gradient Luxemburg norm.
double norm_W1H0(const DiscreteFunction& u, const ScalarField& p, const ScalarField& q,
                 const ScalarField& mu);

// Exponent fields for the property harness; p2 is the second factor of
// the constant-outer-power identity.
struct Section2Fields {
  ScalarField p, q, mu, p2;
};

// Checks, for every sample: the modular/norm trichotomy and sandwiches
// on L^{p(x)}, their rho_H analogues, the constant-outer-power identity
// ||u|^2|_{p2} = |u|^2_{2 p2}, and the two-sided bound for Phi.  The
// unit-level statement is tested with the scaling factor fixed to the
// norm itself: rho(u/||u||) = 1.
std::vector<ModularReport> check_section2_props(const std::vector<DiscreteFunction>& samples,
                                                const Section2Fields& fields);

// One CSV row per (sample, property): sample,property_id,verdict,slack.
void write_props_csv(std::ostream& os, const std::vector<ModularReport>& reports);

}  // namespace dphase
