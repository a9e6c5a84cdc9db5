#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "uralab/model.hpp"
#include "uralab/rng.hpp"

namespace uralab {

/// Hidden origin of a decoded list entry. The authenticator never sees this;
/// the scorer uses it to classify verdicts.
enum class Provenance { TruePositive, FalsePositive, Spoof };

/// One entry of the decoder's unordered output list.
struct DecodedMessage {
  Bits payload;
  Provenance provenance = Provenance::FalsePositive;
  /// All senders whose packet carried exactly this payload; nonempty iff
  /// provenance == TruePositive (more than one only on a payload collision).
  std::vector<uint32_t> senders;
};

/// Parametric decoder abstraction: each distinct transmitted payload is
/// decoded independently with probability pTP; the list is padded back to K
/// entries with uniform false-positive payloads distinct from each other and
/// from everything transmitted, then shuffled.
std::vector<DecodedMessage> apply_parametric(const GroundTruth& truth, double pTP,
                                             const SystemConfig& config, Rng& rng);

/// Small-scale AWGN channel with an exact maximum-likelihood list decoder
/// over all C(2^B, K) payload subsets. Intended for sanity-scale parameters:
/// B <= 16, K <= 3, and C(2^B, K) <= 1e8 are enforced up front.
class GaussianToyChannel {
public:
  GaussianToyChannel(const SystemConfig& config, uint64_t codebookSeed);

  std::vector<DecodedMessage> apply(const GroundTruth& truth, Rng& rng) const;

  uint64_t codewords() const { return M_; }
  /// Squared norm of one codeword row (all rows share it: n * P).
  double rowEnergy() const { return rowEnergy_; }
  double rowDot(uint64_t i, uint64_t j) const;

private:
  unsigned B_ = 0;
  unsigned n_ = 0;
  uint64_t K_ = 0;
  uint64_t M_ = 0;
  double rowEnergy_ = 0.0;
  double noiseSigma_ = 0.0;
  std::vector<double> codebook_;  // M x n, row-major
  std::vector<double> gram_;      // M x M when precomputed, else empty
};

/// Decoder false-positive probabilities measured elsewhere, tabulated by
/// payload width and per-bit energy.
struct PfpTable {
  struct Row {
    unsigned B = 0;
    double energyDb = 0.0;
    double pFP = 0.0;
  };
  std::vector<Row> rows;

  static PfpTable from_csv_text(const std::string& text);
  static PfpTable load_csv(const std::string& path);
};

/// Interpolated decoder false-positive probability at the given payload
/// width and energy: linear in (energy_db, log10 pFP) between bracketing
/// rows. Energies outside the tabulated range are a configuration error,
/// never an extrapolation.
double lookup_pfp(const PfpTable& table, unsigned B, double energyDb);

/// Channel model selected for a run.
struct ChannelModel {
  enum class Kind { Parametric, GaussianToy, TableDriven };
  Kind kind = Kind::Parametric;
  double pTP = 1.0;  // Parametric; TableDriven resolves to 1 - pFP
  double pFP = 0.0;  // TableDriven: looked-up decoder false-positive rate
  std::shared_ptr<const GaussianToyChannel> toy;

  static ChannelModel parametric(double pTP);
  static ChannelModel gaussian_toy(const SystemConfig& config, uint64_t codebookSeed);
  static ChannelModel table_driven(const PfpTable& table, unsigned B, double energyDb);

  /// True when the model has a scalar survival probability (used for spoof
  /// injection); the Gaussian toy does not.
  bool has_survival_prob() const { return kind != Kind::GaussianToy; }

  std::vector<DecodedMessage> apply(const GroundTruth& truth, const SystemConfig& config,
                                    Rng& rng) const;
  std::string name() const;
};

}  // namespace uralab
