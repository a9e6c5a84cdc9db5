#pragma once

#include "uralab/mac.hpp"
#include "uralab/model.hpp"
#include "uralab/rng.hpp"

namespace uralab {

/// Sample K distinct active users, draw their data words, and MAC + assemble
/// each packet for the given nonce. `keyCtxs`, when provided, must hold the
/// engine's per-key contexts indexed by userId (avoids re-deriving them every
/// round inside large simulations).
GroundTruth generate_round(const SystemConfig& config, const KeyRegistry& registry,
                           const MacEngine& engine, const Nonce& nonce, Rng& rng,
                           const std::vector<MacEngine::KeyCtx>* keyCtxs = nullptr);

}  // namespace uralab
