#include "uralab/analytics.hpp"

#include <cmath>

#include "uralab/errors.hpp"

namespace uralab {
namespace analytics {

namespace {

constexpr double kLog2E = 1.4426950408889634074;

// 1-(1-p)^m without cancellation: -expm1(m*log1p(-p)).
double one_minus_pow_q(double p, double m) {
  if (m == 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  return -std::expm1(m * std::log1p(-p));
}

}  // namespace

double p_tag(unsigned L) {
  if (L > 64) throw ConfigError("tag width exceeds 64 bits");
  return std::ldexp(1.0, -static_cast<int>(L));
}

double pow_one_minus_p(double p, double m) {
  if (m == 0.0) return 1.0;
  if (p >= 1.0) return 0.0;
  return std::exp(m * std::log1p(-p));
}

double prob_type1(uint64_t N, unsigned L) {
  if (N < 1) throw ConfigError("N must be at least 1");
  return one_minus_pow_q(p_tag(L), static_cast<double>(N - 1));
}

double prob_type2(uint64_t K, unsigned L) {
  if (K < 1) throw ConfigError("K must be at least 1");
  return one_minus_pow_q(p_tag(L), static_cast<double>(K - 1));
}

double prob_success_exhaustive(uint64_t N, uint64_t K, unsigned L) {
  if (N < 1 || K < 1) throw ConfigError("N and K must be at least 1");
  return pow_one_minus_p(p_tag(L), static_cast<double>(N + K - 2));
}

double prob_fp_accept_exhaustive(uint64_t N, uint64_t kTP, uint64_t K, unsigned L) {
  if (N < 1 || K < 1) throw ConfigError("N and K must be at least 1");
  if (kTP > N) throw ConfigError("kTP must not exceed N");
  double p = p_tag(L);
  return static_cast<double>(N - kTP) * p *
         pow_one_minus_p(p, static_cast<double>(N + K - 2));
}

double prob_definite_fp(uint64_t N, unsigned L) {
  if (N < 1) throw ConfigError("N must be at least 1");
  return pow_one_minus_p(p_tag(L), static_cast<double>(N));
}

double prob_success_heuristic_sum(uint64_t Nj, unsigned L) {
  if (Nj < 1) throw ConfigError("Nj must be at least 1");
  const double p = p_tag(L);
  if (p >= 1.0) return 1.0 / static_cast<double>(Nj);

  const uint64_t n1 = Nj - 1;
  const double pOverQ = p / (1.0 - p);
  // Terms carried as mant * 2^e2 so that q^(Nj-1) far below double range
  // still sums correctly. The range check keeps e2 within int territory.
  double log2t0 = static_cast<double>(n1) * std::log1p(-p) * kLog2E;
  if (log2t0 < -1.0e6)
    throw ConfigError("direct summation out of range; use the closed form");
  int e2 = static_cast<int>(std::floor(log2t0));
  double mant = std::exp2(log2t0 - std::floor(log2t0));

  double sum = 0.0, comp = 0.0;
  for (uint64_t i = 0;; ++i) {
    double term = std::ldexp(mant, e2);
    double t = sum + term;
    if (sum >= term)
      comp += (sum - t) + term;
    else
      comp += (term - t) + sum;
    sum = t;
    if (i == n1) break;
    double ratio =
        static_cast<double>(n1 - i) * pOverQ / (2.0 + static_cast<double>(i));
    mant *= ratio;
    if (mant > 0x1.0p+500 || (mant > 0.0 && mant < 0x1.0p-500)) {
      int adj = 0;
      mant = std::frexp(mant, &adj);
      e2 += adj;
    }
    if (ratio < 1.0 && std::ldexp(mant, e2) < sum * 1e-19) break;
  }
  double r = sum + comp;
  return r > 1.0 ? 1.0 : r;
}

double prob_success_heuristic_closed(uint64_t Nj, unsigned L) {
  if (Nj < 1) throw ConfigError("Nj must be at least 1");
  const double p = p_tag(L);
  if (p >= 1.0) return 1.0 / static_cast<double>(Nj);
  return one_minus_pow_q(p, static_cast<double>(Nj)) /
         (static_cast<double>(Nj) * p);
}

double prob_success_heuristic(uint64_t Nj, unsigned L) {
  return Nj <= 1024 ? prob_success_heuristic_sum(Nj, L)
                    : prob_success_heuristic_closed(Nj, L);
}

double prob_misid_heuristic(uint64_t Nj, unsigned L) {
  return 1.0 - prob_success_heuristic(Nj, L);
}

double prob_fp_accept_heuristic(uint64_t Nj, unsigned L) {
  if (Nj < 1) throw ConfigError("Nj must be at least 1");
  return one_minus_pow_q(p_tag(L), static_cast<double>(Nj));
}

double prob_misauth_heuristic(double pTP, double pFP, uint64_t Nj, unsigned L) {
  if (pTP < 0.0 || pTP > 1.0 || pFP < 0.0 || pFP > 1.0)
    throw ConfigError("pTP and pFP must lie in [0,1]");
  return pTP * prob_misid_heuristic(Nj, L) + pFP * prob_fp_accept_heuristic(Nj, L);
}

double prob_spoof(double pTP, uint64_t N, unsigned L, Scheme scheme) {
  if (pTP < 0.0 || pTP > 1.0) throw ConfigError("pTP must lie in [0,1]");
  if (N < 1) throw ConfigError("N must be at least 1");
  switch (scheme) {
    case Scheme::Bare:
      return pTP;
    case Scheme::MacOnly:
      return pTP * one_minus_pow_q(p_tag(L), static_cast<double>(N));
    case Scheme::AddressMac:
      return pTP * p_tag(L);
  }
  throw std::logic_error("unreachable scheme");
}

double collision_floor(uint64_t K, unsigned B) {
  if (B > 4096) throw ConfigError("payload width out of range");
  if (K < 2) return 0.0;
  double pairs = 0.5 * static_cast<double>(K) * static_cast<double>(K - 1);
  return pairs * std::ldexp(1.0, -static_cast<int>(B));
}

double total_misauth(Scheme scheme, double pFP, const CryptoParams& params) {
  if (pFP < 0.0 || pFP > 1.0) throw ConfigError("pFP must lie in [0,1]");
  switch (scheme) {
    case Scheme::Bare:
      return pFP;
    case Scheme::MacOnly:
      return pFP * prob_fp_accept_exhaustive(params.N, params.kTP, params.K, params.L);
    case Scheme::AddressMac:
      return pFP * p_tag(params.L);
  }
  throw std::logic_error("unreachable scheme");
}

double expected_inv_two_plus_binomial(uint64_t n, double p) {
  if (p < 0.0 || p > 1.0) throw ConfigError("p must lie in [0,1]");
  if (p == 0.0) return 0.5;
  if (p >= 1.0) return 1.0 / (static_cast<double>(n) + 2.0);
  const double mu = static_cast<double>(n) * p;
  if (mu > 32.0) {
    // Closed form; its bracket difference cancels when n*p is small, so this
    // branch only runs where the subtraction is well conditioned.
    double n1 = static_cast<double>(n) + 1.0;
    double n2 = static_cast<double>(n) + 2.0;
    double first = one_minus_pow_q(p, n1) / (n1 * p);
    double bracket = one_minus_pow_q(p, n2) - n2 * p * pow_one_minus_p(p, n1);
    return first - bracket / (n1 * n2 * p * p);
  }
  // Direct summation over the binomial pmf; only ~n*p + O(sqrt(n*p)) terms
  // contribute before the tail collapses.
  const double pOverQ = p / (1.0 - p);
  double term = pow_one_minus_p(p, static_cast<double>(n));
  double sum = 0.0, comp = 0.0;
  for (uint64_t i = 0;; ++i) {
    double contrib = term / (2.0 + static_cast<double>(i));
    double t = sum + contrib;
    if (sum >= contrib)
      comp += (sum - t) + contrib;
    else
      comp += (contrib - t) + sum;
    sum = t;
    if (i == n) break;
    term *= static_cast<double>(n - i) * pOverQ / (static_cast<double>(i) + 1.0);
    if (static_cast<double>(i) > mu && term < sum * 1e-19) break;
  }
  return sum + comp;
}

double expected_keys_tried(uint64_t Nj, unsigned L) {
  if (Nj < 1) throw ConfigError("Nj must be at least 1");
  return (static_cast<double>(Nj) + 1.0) *
         expected_inv_two_plus_binomial(Nj - 1, p_tag(L));
}

}  // namespace analytics
}  // namespace uralab
