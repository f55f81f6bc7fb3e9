#pragma once

// Closed-form cost expressions evaluated with explicit leading constants.
// Logarithms are floored at 1 (ln(max(x, e))) so tiny arguments do not flip signs.

#include <algorithm>
#include <cmath>

#include "dlgibbs/dl_projector.hpp"
#include "dlgibbs/error.hpp"

namespace dlgibbs {

struct ResourceInputs {
  long long M = 1;            // local terms
  int g = 0;                  // non-commutation degree
  double gap = 1.0;           // gap(L)
  double sigma_min = 0.5;
  double eps = 0.1;           // target trace distance
  double beta = 0.0;
  double norm_h = 0.0;
  double delta = 0.1;         // purified-state error
  double anneal_gap = 1.0;    // min_j gap along the temperature path
  double alpha = 2.0;
  double sk_exponent = 1.44;  // Solovay-Kitaev c, reported only
  double gate_constant = 1.0;
  double runtime_constant = 1.0;
};

struct ResourceEstimate {
  ResourceInputs in;
  int g_eff = 1;
  long long k_required = 0;     // ceil(g^2/gap * ln(1/(sigma_min eps)))
  double mixing_log = 0.0;      // ln(1/(sigma_min eps))
  double cyclic_leading = 0.0;  // C M g^2/gap * mixing_log
  double cyclic_sk_factor = 0.0;  // ln(k M / eps)^c
  double cyclic_gates = 0.0;
  int K = 1;
  double anneal_leading = 0.0;    // C M beta||H|| / sqrt(gamma)
  double anneal_log_sq = 0.0;     // ln(beta||H|| / delta)^2
  double anneal_sk_factor = 0.0;  // ln(M beta||H|| / (sqrt(gamma) delta))^c
  double anneal_gates = 0.0;
  int ancilla = 1;                // ceil(log2 M) + 1
};

inline double floored_log(double x) { return std::log(std::max(x, M_E)); }

inline ResourceEstimate resource_estimate(const ResourceInputs& in) {
  const bool ok = in.M >= 1 && in.g >= 0 && in.gap > 0 && in.sigma_min > 0 && in.sigma_min <= 1 && in.eps > 0 &&
                  in.eps < 1 && in.beta >= 0 && in.norm_h >= 0 && in.delta > 0 && in.delta < 1 &&
                  in.anneal_gap > 0 && in.alpha > 1 && in.sk_exponent > 0 && in.gate_constant > 0 &&
                  in.runtime_constant > 0;
  if (!ok) throw Error(Errc::BadInputs, "cli-harness", "resource estimate needs positive, in-range inputs");
  ResourceEstimate r;
  r.in = in;
  r.g_eff = std::max(1, in.g);
  const double g2 = static_cast<double>(r.g_eff) * r.g_eff;
  const double m = static_cast<double>(in.M);
  r.mixing_log = floored_log(1.0 / (in.sigma_min * in.eps));
  r.k_required = static_cast<long long>(std::ceil(g2 / in.gap * r.mixing_log - 1e-12));
  r.cyclic_leading = in.gate_constant * m * g2 / in.gap * r.mixing_log;
  r.cyclic_sk_factor = std::pow(floored_log(r.k_required * m / in.eps), in.sk_exponent);
  r.cyclic_gates = r.cyclic_leading * r.cyclic_sk_factor;

  const double bh = in.beta * in.norm_h;
  r.K = std::max(1, static_cast<int>(std::ceil(in.alpha * bh - 1e-12)));
  const double root_gamma = std::sqrt(in.anneal_gap);
  r.anneal_leading = in.runtime_constant * m * bh / root_gamma;
  r.anneal_log_sq = std::pow(floored_log(bh / in.delta), 2);
  r.anneal_sk_factor = std::pow(floored_log(m * bh / (root_gamma * in.delta)), in.sk_exponent);
  r.anneal_gates = r.anneal_leading * r.anneal_log_sq * r.anneal_sk_factor;
  r.ancilla = ancilla_estimate(static_cast<std::size_t>(in.M));
  return r;
}

}  // namespace dlgibbs
