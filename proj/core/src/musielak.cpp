#include "dphase/musielak.hpp"

#include "qpcache.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace dphase {

double notation_pow(double t, double a, double b, PowJoin mode) {
  if (t < 0) throw std::invalid_argument("notation_pow: t must be nonnegative");
  double lo = std::min(a, b), hi = std::max(a, b);
  double e;
  if (mode == PowJoin::Join)
    e = (t < 1) ? lo : hi;
  else
    e = (t < 1) ? hi : lo;
  return std::pow(t, e);
}

namespace {

using detail::QpCache;

// Shared accumulation loop for the value-mode modulars.  The mu == 0
// branch keeps modular_H bit-identical to modular_px under identical
// quadrature.
double modular_value_mode(const DiscreteFunction& u, const QpCache& p, const QpCache* q,
                          const QpCache* mu) {
  const Mesh& mesh = u.mesh();
  const QuadratureRule& rule = QuadratureRule::three_point();
  const int nqp = static_cast<int>(rule.points.size());
  double total = 0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    double cell = 0;
    for (int k = 0; k < nqp; ++k) {
      double au = std::fabs(u.value_at(t, rule.points[k]));
      double term = std::pow(au, p.at(t, k));
      if (q) {
        double m = mu->at(t, k);
        if (m != 0.0) term += m * std::pow(au, q->at(t, k));
      }
      cell += rule.weights[k] * term;
    }
    total += mesh.area(t) * cell;
  }
  return total;
}

double modular_gradient_mode(const DiscreteFunction& u, const QpCache& p, const QpCache& q,
                             const QpCache& mu, double zeta) {
  const Mesh& mesh = u.mesh();
  const QuadratureRule& rule = QuadratureRule::three_point();
  const int nqp = static_cast<int>(rule.points.size());
  double total = 0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    double g = element_gradient(u, t).norm() / zeta;
    double cell = 0;
    for (int k = 0; k < nqp; ++k) {
      double term = std::pow(g, p.at(t, k));
      double m = mu.at(t, k);
      if (m != 0.0) term += m * std::pow(g, q.at(t, k));
      cell += rule.weights[k] * term;
    }
    total += mesh.area(t) * cell;
  }
  return total;
}

double scaled_value_modular(const DiscreteFunction& u, const QpCache& p, const QpCache* q,
                            const QpCache* mu, double zeta) {
  const Mesh& mesh = u.mesh();
  const QuadratureRule& rule = QuadratureRule::three_point();
  const int nqp = static_cast<int>(rule.points.size());
  double total = 0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    double cell = 0;
    for (int k = 0; k < nqp; ++k) {
      double au = std::fabs(u.value_at(t, rule.points[k])) / zeta;
      double term = std::pow(au, p.at(t, k));
      if (q) {
        double m = mu->at(t, k);
        if (m != 0.0) term += m * std::pow(au, q->at(t, k));
      }
      cell += rule.weights[k] * term;
    }
    total += mesh.area(t) * cell;
  }
  return total;
}

}  // namespace

double modular_px(const DiscreteFunction& u, const ScalarField& p) {
  QpCache pc = detail::sample_field(u.mesh(), QuadratureRule::three_point(), p);
  return modular_value_mode(u, pc, nullptr, nullptr);
}

double modular_H(const DiscreteFunction& u, const ScalarField& p, const ScalarField& q,
                 const ScalarField& mu) {
  const QuadratureRule& rule = QuadratureRule::three_point();
  QpCache pc = detail::sample_field(u.mesh(), rule, p);
  QpCache qc = detail::sample_field(u.mesh(), rule, q);
  QpCache mc = detail::sample_field(u.mesh(), rule, mu);
  if (mc.minv < 0)
    throw std::invalid_argument("modular_H: mu is negative at a sample point");
  return modular_value_mode(u, pc, &qc, &mc);
}

double modular_H_gradient(const DiscreteFunction& u, const ScalarField& p,
                          const ScalarField& q, const ScalarField& mu) {
  const QuadratureRule& rule = QuadratureRule::three_point();
  QpCache pc = detail::sample_field(u.mesh(), rule, p);
  QpCache qc = detail::sample_field(u.mesh(), rule, q);
  QpCache mc = detail::sample_field(u.mesh(), rule, mu);
  if (mc.minv < 0)
    throw std::invalid_argument("modular_H: mu is negative at a sample point");
  return modular_gradient_mode(u, pc, qc, mc, 1.0);
}

double luxemburg_norm(const std::function<double(double)>& rho_scaled) {
  double r1 = rho_scaled(1.0);
  if (r1 == 0.0) return 0.0;
  if (r1 == 1.0) return 1.0;

  double lo, hi;
  if (r1 > 1.0) {
    hi = 1.0;
    double r = r1;
    int k = 0;
    while (r > 1.0) {
      lo = hi;
      hi *= 2.0;
      r = rho_scaled(hi);
      if (++k > 200)
        throw NormBracketError("luxemburg_norm: no bracket after 200 doublings");
    }
    lo = hi / 2.0;
  } else {
    lo = 1.0;
    double r = r1;
    int k = 0;
    while (r < 1.0) {
      hi = lo;
      lo /= 2.0;
      r = rho_scaled(lo);
      if (++k > 200)
        throw NormBracketError("luxemburg_norm: no bracket after 200 halvings");
    }
    hi = lo * 2.0;
  }

  // rho is strictly decreasing in zeta: rho(lo) >= 1 >= rho(hi).
  while (hi - lo > 1e-10 * 0.5 * (hi + lo)) {
    double mid = 0.5 * (lo + hi);
    if (rho_scaled(mid) > 1.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double norm_px(const DiscreteFunction& u, const ScalarField& p) {
  QpCache pc = detail::sample_field(u.mesh(), QuadratureRule::three_point(), p);
  return luxemburg_norm([&](double z) { return scaled_value_modular(u, pc, nullptr, nullptr, z); });
}

double norm_H(const DiscreteFunction& u, const ScalarField& p, const ScalarField& q,
              const ScalarField& mu) {
  const QuadratureRule& rule = QuadratureRule::three_point();
  QpCache pc = detail::sample_field(u.mesh(), rule, p);
  QpCache qc = detail::sample_field(u.mesh(), rule, q);
  QpCache mc = detail::sample_field(u.mesh(), rule, mu);
  return luxemburg_norm([&](double z) { return scaled_value_modular(u, pc, &qc, &mc, z); });
}

double norm_W1H0(const DiscreteFunction& u, const ScalarField& p, const ScalarField& q,
                 const ScalarField& mu) {
  const QuadratureRule& rule = QuadratureRule::three_point();
  QpCache pc = detail::sample_field(u.mesh(), rule, p);
  QpCache qc = detail::sample_field(u.mesh(), rule, q);
  QpCache mc = detail::sample_field(u.mesh(), rule, mu);
  return luxemburg_norm([&](double z) { return modular_gradient_mode(u, pc, qc, mc, z); });
}

namespace {

constexpr double kNormTol = 1e-9;   // trichotomy band around norm == 1
constexpr double kUnitTol = 1e-6;   // unit-modular identity band

Regime classify(double norm) {
  if (norm < 1.0 - kNormTol) return Regime::BelowOne;
  if (norm > 1.0 + kNormTol) return Regime::AboveOne;
  return Regime::EqualOne;
}

SlackRecord make_record(std::string id, double slack) {
  SlackRecord rec;
  rec.property_id = std::move(id);
  rec.slack = slack;
  rec.pass = slack >= -1e-8;
  return rec;
}

SlackRecord not_applicable(std::string id) {
  SlackRecord rec;
  rec.property_id = std::move(id);
  rec.slack = std::numeric_limits<double>::infinity();
  rec.pass = true;
  return rec;
}

// Trichotomy slack: norm and modular must sit on the same side of 1.
double trichotomy_slack(double norm, double rho) {
  if (norm < 1.0 - kNormTol) return 1.0 - rho;
  if (norm > 1.0 + kNormTol) return rho - 1.0;
  return kUnitTol - std::fabs(rho - 1.0);
}

}  // namespace

std::vector<ModularReport> check_section2_props(const std::vector<DiscreteFunction>& samples,
                                                const Section2Fields& fields) {
  std::vector<ModularReport> out;
  out.reserve(samples.size());

  for (const DiscreteFunction& u : samples) {
    const Mesh& mesh = u.mesh();
    const QuadratureRule& rule = QuadratureRule::three_point();
    QpCache pc = detail::sample_field(mesh, rule, fields.p);
    QpCache qc = detail::sample_field(mesh, rule, fields.q);
    QpCache mc = detail::sample_field(mesh, rule, fields.mu);
    QpCache p2c = detail::sample_field(mesh, rule, fields.p2);

    // Exponent extrema over the quadrature measure itself, so the
    // sandwich inequalities are exact for the discrete modulars.
    double p_minus = pc.minv, p_plus = pc.maxv;
    double q_plus = qc.maxv;

    ModularReport rep;

    // --- L^{p(x)} ---
    double rho_p = modular_value_mode(u, pc, nullptr, nullptr);
    double nrm_p = luxemburg_norm(
        [&](double z) { return scaled_value_modular(u, pc, nullptr, nullptr, z); });
    rep.slacks.push_back(make_record("lebesgue.trichotomy", trichotomy_slack(nrm_p, rho_p)));
    {
      double lo, hi;
      if (nrm_p > 1.0) {
        lo = std::pow(nrm_p, p_minus);
        hi = std::pow(nrm_p, p_plus);
      } else {
        lo = std::pow(nrm_p, p_plus);
        hi = std::pow(nrm_p, p_minus);
      }
      rep.slacks.push_back(make_record("lebesgue.sandwich", std::min(rho_p - lo, hi - rho_p)));
    }

    // --- L^H ---
    double rho_h = modular_value_mode(u, pc, &qc, &mc);
    double nrm_h = luxemburg_norm(
        [&](double z) { return scaled_value_modular(u, pc, &qc, &mc, z); });
    rep.rho = rho_h;
    rep.norm = nrm_h;
    rep.regime = classify(nrm_h);

    if (nrm_h > 0) {
      double rho_unit = scaled_value_modular(u, pc, &qc, &mc, nrm_h);
      rep.slacks.push_back(make_record("doublephase.unit_modular", kUnitTol - std::fabs(rho_unit - 1.0)));
    } else {
      rep.slacks.push_back(not_applicable("doublephase.unit_modular"));
    }
    if (nrm_h > 0 && nrm_h < 1.0 - kNormTol) {
      rep.slacks.push_back(make_record(
          "doublephase.sandwich_below",
          std::min(rho_h - std::pow(nrm_h, q_plus), std::pow(nrm_h, p_minus) - rho_h)));
    } else {
      rep.slacks.push_back(not_applicable("doublephase.sandwich_below"));
    }
    if (nrm_h > 1.0 + kNormTol) {
      rep.slacks.push_back(make_record(
          "doublephase.sandwich_above",
          std::min(rho_h - std::pow(nrm_h, p_minus), std::pow(nrm_h, q_plus) - rho_h)));
    } else {
      rep.slacks.push_back(not_applicable("doublephase.sandwich_above"));
    }

    // --- constant outer power: ||u|^2|_{p2} = (|u|_{2 p2})^2 ---
    if (!u.is_zero()) {
      auto rho_sq = [&](double z) {
        double total = 0;
        for (int t = 0; t < mesh.triangle_count(); ++t) {
          double cell = 0;
          for (int k = 0; k < p2c.nqp; ++k) {
            double au = std::fabs(u.value_at(t, rule.points[k]));
            cell += rule.weights[k] * std::pow(au * au / z, p2c.at(t, k));
          }
          total += mesh.area(t) * cell;
        }
        return total;
      };
      auto rho_2p2 = [&](double z) {
        double total = 0;
        for (int t = 0; t < mesh.triangle_count(); ++t) {
          double cell = 0;
          for (int k = 0; k < p2c.nqp; ++k) {
            double au = std::fabs(u.value_at(t, rule.points[k])) / z;
            cell += rule.weights[k] * std::pow(au, 2.0 * p2c.at(t, k));
          }
          total += mesh.area(t) * cell;
        }
        return total;
      };
      double lhs = luxemburg_norm(rho_sq);
      double rhs = luxemburg_norm(rho_2p2);
      rep.slacks.push_back(make_record("const_outer_power", 1e-7 - std::fabs(lhs - rhs * rhs)));
    } else {
      rep.slacks.push_back(not_applicable("const_outer_power"));
    }

    // --- Remark sandwich for Phi against the gradient norm ---
    double gn = luxemburg_norm([&](double z) { return modular_gradient_mode(u, pc, qc, mc, z); });
    double phi = 0;
    {
      const int nqp = static_cast<int>(rule.points.size());
      for (int t = 0; t < mesh.triangle_count(); ++t) {
        double g = element_gradient(u, t).norm();
        double cell = 0;
        for (int k = 0; k < nqp; ++k) {
          double term = std::pow(g, pc.at(t, k)) / pc.at(t, k);
          double m = mc.at(t, k);
          if (m != 0.0) term += m * std::pow(g, qc.at(t, k)) / qc.at(t, k);
          cell += rule.weights[k] * term;
        }
        phi += mesh.area(t) * cell;
      }
    }
    if (gn > 0 && gn < 1.0 - kNormTol) {
      rep.slacks.push_back(make_record(
          "phi.sandwich_below", std::min(phi - std::pow(gn, q_plus) / q_plus,
                                std::pow(gn, p_minus) / p_minus - phi)));
    } else {
      rep.slacks.push_back(not_applicable("phi.sandwich_below"));
    }
    if (gn > 1.0 + kNormTol) {
      rep.slacks.push_back(make_record(
          "phi.sandwich_above", std::min(phi - std::pow(gn, p_minus) / q_plus,
                                 std::pow(gn, q_plus) / p_minus - phi)));
    } else {
      rep.slacks.push_back(not_applicable("phi.sandwich_above"));
    }

    out.push_back(std::move(rep));
  }
  return out;
}

void write_props_csv(std::ostream& os, const std::vector<ModularReport>& reports) {
  std::string out = "sample,property_id,verdict,slack\n";
  char buf[48];
  for (std::size_t i = 0; i < reports.size(); ++i) {
    for (const SlackRecord& rec : reports[i].slacks) {
      out += std::to_string(i);
      out += ',';
      out += rec.property_id;
      out += ',';
      out += rec.pass ? "pass" : "fail";
      out += ',';
      std::snprintf(buf, sizeof(buf), "%.17g", rec.slack);
      out += buf;
      out += '\n';
    }
  }
  os << out;
}

}  // namespace dphase
