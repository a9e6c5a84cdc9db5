#pragma once

#include <cstdint>

#include "uralab/model.hpp"

namespace uralab {
namespace analytics {

/// Probability that one uniform L-bit tag matches a fixed value: 2^-L.
double p_tag(unsigned L);

/// (1-p)^m evaluated as exp(m*log1p(-p)); stable for tiny p and huge m.
/// Handles m == 0 (-> 1) and p == 1 (-> 0 for m > 0) without NaNs.
double pow_one_minus_p(double p, double m);

/// Probability that at least one of the other N-1 user keys also matches a
/// given message's tag.
double prob_type1(uint64_t N, unsigned L);

/// Probability that a user's key also matches at least one of the other K-1
/// decoded messages in the round.
double prob_type2(uint64_t K, unsigned L);

/// Exhaustive search: probability a genuine message is accepted and
/// attributed to its true sender, (1-p)^(N+K-2).
double prob_success_exhaustive(uint64_t N, uint64_t K, unsigned L);

/// Exhaustive search: probability a non-genuine message is accepted,
/// (N-kTP) * p * (1-p)^(N+K-2).
double prob_fp_accept_exhaustive(uint64_t N, uint64_t kTP, uint64_t K, unsigned L);

/// Probability a non-genuine message matches no key at all, (1-p)^N: it is
/// then rejected with certainty, whatever the search strategy.
double prob_definite_fp(uint64_t N, unsigned L);

/// Heuristic search over Nj remaining keys: probability a genuine message is
/// attributed to its true sender,
///   sum_{i=0}^{Nj-1} C(Nj-1,i) p^i (1-p)^(Nj-1-i) / (1+i).
/// Evaluated by direct summation for Nj <= 1024 and by the closed form
/// (1-(1-p)^Nj)/(Nj*p) above that.
double prob_success_heuristic(uint64_t Nj, unsigned L);

/// Direct summation path (any Nj); exposed for cross-checks.
double prob_success_heuristic_sum(uint64_t Nj, unsigned L);

/// Closed-form path (1-(1-p)^Nj)/(Nj*p); exposed for cross-checks.
double prob_success_heuristic_closed(uint64_t Nj, unsigned L);

/// Heuristic search: probability a genuine message is accepted under the
/// wrong identity; exact complement of prob_success_heuristic.
double prob_misid_heuristic(uint64_t Nj, unsigned L);

/// Heuristic search: probability a non-genuine message is accepted,
/// 1-(1-p)^Nj.
double prob_fp_accept_heuristic(uint64_t Nj, unsigned L);

/// Heuristic search: misauthentication probability of a decoded message
/// that is genuine with probability pTP and foreign with probability pFP
/// (pTP + pFP = 1 within the round's decoded list),
///   pTP * prob_misid + pFP * prob_fp_accept.
double prob_misauth_heuristic(double pTP, double pFP, uint64_t Nj, unsigned L);

/// Probability a single spoofed packet is accepted, given it survives the
/// channel with probability pTP:
///   MacOnly:    pTP * (1-(1-p)^N)   (any of N keys may claim it)
///   AddressMac: pTP * p             (only the addressed key is tried)
/// Bare carries no MAC: every surviving spoof is accepted, pTP.
double prob_spoof(double pTP, uint64_t N, unsigned L, Scheme scheme);

/// Expected fraction of rounds with at least one payload collision cannot
/// drop below ~C(K,2)/2^B; the irreducible error floor of a scheme.
double collision_floor(uint64_t K, unsigned B);

/// Inputs for the end-to-end misauthentication composition.
struct CryptoParams {
  uint64_t N = 0;
  uint64_t kTP = 0;
  uint64_t K = 0;
  unsigned L = 0;
};

/// End-to-end misauthentication rate of a scheme given the decoder's
/// false-positive probability pFP:
///   Bare:       pFP                       (no check at all)
///   MacOnly:    pFP * prob_fp_accept_exhaustive
///   AddressMac: pFP * p
double total_misauth(Scheme scheme, double pFP, const CryptoParams& params);

/// E[1/(2+X)] for X ~ Binomial(n, p), in closed form. The expected position
/// of the first matching key in a heuristic scan of Nj keys is
/// (Nj+1) * E[1/(2+Binomial(Nj-1,p))].
double expected_inv_two_plus_binomial(uint64_t n, double p);

/// Expected keysTried for a genuine message scanned against Nj keys that
/// still include its own.
double expected_keys_tried(uint64_t Nj, unsigned L);

}  // namespace analytics
}  // namespace uralab
