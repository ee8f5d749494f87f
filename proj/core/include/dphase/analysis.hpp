#pragma once

#include "dphase/field.hpp"
#include "dphase/mesh.hpp"
#include "dphase/operators.hpp"

#include <string>
#include <vector>

namespace dphase {

// Sobolev conjugate p* = Np/(N-p) for p < N, +inf otherwise.
double sobolev_conjugate(double p, int N);

// Gamma by the Lanczos approximation with reflection; accurate to 1e-12
// on the half-integers the volume formula needs.
double gamma_lanczos(double x);

// omega_N = pi^{N/2} / ((N/2) Gamma(N/2)), the unit-ball volume.
double unit_ball_volume(int N);

// Admissible plateau height min{1, (p^- / ((1+|mu|_inf) omega_N
// (R^N - (R/2)^N) (2/R)^{p^- v q^+}))^{1/p^-}} with the bracket power
// evaluated at t = 2/R.
double r_lambda_bound(double p_minus, double q_plus, double mu_sup, double R, int N);

// Coefficient of lambda_0 in the small-t lower bound for F:
// (1/p^-) r_lambda^{p^-}.
double f_inf_coefficient(double p_minus, double r_lambda, double lambda0);

// Coefficient of lambda_0 in the energy-ratio bound:
// p^- F_inf / ((1+|mu|_inf)(2^N - 1)(2 r_lambda / R)^{q^+}).
// The worked example evaluates the bracket power with the larger
// exponent q^+ even below t = 1; this follows that arithmetic so the
// reproduction matches digit for digit.
double ratio_coefficient(double p_minus, double q_plus, double mu_sup, int N, double r_lambda,
                         double R, double lambda0);

// lambda_* = 1 / (c1 cH (q^+)^{1/p^-} + c2 cH^{s^+} (q^+)^{s^+/p^-}).
double lambda_star(double c1_hat, double c2_hat, double c_H, double s_plus, double p_minus,
                   double q_plus);

struct ConstantsReport {
  int N = 3;
  double p_minus = 0, p_plus = 0, q_minus = 0, q_plus = 0;
  double s_plus = 0, mu_sup = 0;
  double R = 0, r_lambda = 0;
  double omega_N = 0;
  double r_lambda_bound = 0;
  double F_inf_coeff = 0;       // per lambda_0, unrounded
  double ratio_coeff = 0;       // per lambda_0, unrounded
  double F_inf_rounded = 0;       // rounded as in the worked chain
  double ratio_rounded = 0;
  double lambda_lower = 0;      // 1 / rounded ratio (the worked chain)
  double lambda0 = 1;
  long lambda1 = 0;             // Archimedean integer: ratio*lambda0 > 1/lambda1
  double lambda = 0;            // lambda0 * lambda1
  double c_H_estimate = 0;      // numerical lower bound, 0 when not computed
  double lambda_star = 0;       // at c_H_estimate (upper-bound caveat), 0 if n/a
  double lambda_star_unit_cH = 0;
  bool window_nonempty = false;
};

// The worked constants with the fixed data N=3, p=2.5, q=2.8, mu=1, R=2,
// r_lambda=0.2, s in [1,2): reproduces the chain of rounded figures
// (0.29, 0.007 lambda_0, 0.11 lambda_0, 1/0.11) next to the unrounded
// values.
ConstantsReport example_4_1_constants(double lambda0);

struct EmbeddingEstimate {
  double value = 0;  // lower bound on the best constant
  DiscreteFunction maximizer;
};

// Lower bound on c_H for |u|_{h(x)} <= c_H ||u||_{1,H,0}: maximum of the
// norm ratio over random nodal fields (plus smooth deterministic
// candidates and any caller-supplied seeds), refined by 20 sweeps of
// local coordinate ascent.
EmbeddingEstimate estimate_embedding_constant(const Mesh& mesh, const ScalarField& h,
                                              const ScalarField& p, const ScalarField& q,
                                              const ScalarField& mu, int trials,
                                              unsigned long seed = 42,
                                              const std::vector<DiscreteFunction>* seed_candidates =
                                                  nullptr);

enum class Verdict { Pass, Fail, Undetermined };

struct HypothesisItem {
  std::string id;
  Verdict verdict = Verdict::Fail;
  double margin = 0;
  std::string note;
};

struct HypothesisReport {
  std::vector<HypothesisItem> items;
  bool pass = false;
  double witness_lambda0 = 0;  // superlinearity witness, 0 when absent

  const HypothesisItem* find(const std::string& id) const;
};

// Margins for the standing hypotheses: exponents in C_+, the ordering
// p^+ < q^-, q^+ < N, q^+ < p*(x), r^+ < p*(x)/2, s^+ < p^-, mu >= 0,
// positive infima of alpha and gamma, and the growth/superlinearity
// conditions on the nonlinearity.
HypothesisReport check_hypotheses(const FieldSet& fields, int N, const NonlinearitySpec& nonlin,
                                  const DomainSpec& domain, int grid_n = 64);

}  // namespace dphase
