#include "uralab/channel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "uralab/errors.hpp"

namespace uralab {

std::vector<DecodedMessage> apply_parametric(const GroundTruth& truth, double pTP,
                                             const SystemConfig& config, Rng& rng) {
  if (pTP < 0.0 || pTP > 1.0) throw ConfigError("pTP must lie in [0,1]");
  if (config.B < 63 && (uint64_t(1) << config.B) < 2 * config.K)
    throw ConfigError("payload space too small to draw distinct false positives");

  // Distinct transmitted payloads, in packet order, with their senders.
  std::vector<DecodedMessage> distinct;
  std::unordered_map<Bits, size_t, BitsHash> index;
  for (const Packet& p : truth.packets) {
    auto it = index.find(p.payload);
    if (it == index.end()) {
      index.emplace(p.payload, distinct.size());
      distinct.push_back(DecodedMessage{p.payload, Provenance::TruePositive, {p.senderId}});
    } else {
      distinct[it->second].senders.push_back(p.senderId);
    }
  }

  // Each distinct payload is decoded independently; missed ones vanish.
  std::vector<DecodedMessage> list;
  list.reserve(config.K);
  for (auto& d : distinct) {
    if (rng.bernoulli(pTP)) list.push_back(std::move(d));
  }

  // Pad back to K entries with fresh false-positive payloads, distinct from
  // each other and from everything transmitted.
  std::unordered_set<Bits, BitsHash> used;
  for (const auto& kv : index) used.insert(kv.first);
  while (list.size() < config.K) {
    Bits candidate = rng.bits(config.B);
    if (!used.insert(candidate).second) continue;
    list.push_back(DecodedMessage{candidate, Provenance::FalsePositive, {}});
  }

  // The decoder's list is unordered; present it in uniform random order.
  for (size_t i = list.size(); i > 1; --i) {
    size_t j = rng.below(i);
    std::swap(list[i - 1], list[j]);
  }
  return list;
}

GaussianToyChannel::GaussianToyChannel(const SystemConfig& config, uint64_t codebookSeed)
    : B_(config.B), n_(config.n), K_(config.K) {
  if (config.B > 16) throw ConfigError("gaussian toy channel requires B <= 16");
  if (config.K < 1 || config.K > 3) throw ConfigError("gaussian toy channel requires 1 <= K <= 3");
  M_ = uint64_t(1) << B_;

  double subsets = 1.0;
  for (uint64_t i = 0; i < K_; ++i)
    subsets = subsets * static_cast<double>(M_ - i) / static_cast<double>(i + 1);
  if (subsets > 1e8)
    throw ConfigError("gaussian toy channel decoder budget exceeded: C(2^B, K) > 1e8");

  rowEnergy_ = static_cast<double>(n_) * config.P;
  noiseSigma_ = std::sqrt(config.noiseVariance);

  codebook_.resize(M_ * n_);
  Rng rng(codebookSeed);
  for (uint64_t r = 0; r < M_; ++r) {
    double* row = &codebook_[r * n_];
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (unsigned s = 0; s < n_; ++s) {
        row[s] = rng.gaussian();
        norm2 += row[s] * row[s];
      }
    } while (norm2 == 0.0);
    double scale = std::sqrt(rowEnergy_ / norm2);
    for (unsigned s = 0; s < n_; ++s) row[s] *= scale;
  }

  // Pairwise inner products, precomputed when the table is small enough to
  // keep; otherwise they are recomputed on demand during decoding.
  if (K_ >= 2 && M_ <= 4096) {
    gram_.resize(M_ * M_);
    for (uint64_t i = 0; i < M_; ++i) {
      for (uint64_t j = i; j < M_; ++j) {
        double dot = 0.0;
        const double* a = &codebook_[i * n_];
        const double* b = &codebook_[j * n_];
        for (unsigned s = 0; s < n_; ++s) dot += a[s] * b[s];
        gram_[i * M_ + j] = dot;
        gram_[j * M_ + i] = dot;
      }
    }
  }
}

double GaussianToyChannel::rowDot(uint64_t i, uint64_t j) const {
  if (!gram_.empty()) return gram_[i * M_ + j];
  double dot = 0.0;
  const double* a = &codebook_[i * n_];
  const double* b = &codebook_[j * n_];
  for (unsigned s = 0; s < n_; ++s) dot += a[s] * b[s];
  return dot;
}

std::vector<DecodedMessage> GaussianToyChannel::apply(const GroundTruth& truth, Rng& rng) const {
  if (truth.packets.size() != K_)
    throw ConfigError("gaussian toy channel requires exactly K transmitted packets");

  // Superimpose all transmitted codewords (duplicates add coherently), plus
  // white noise.
  std::vector<double> y(n_, 0.0);
  for (const Packet& p : truth.packets) {
    uint64_t idx = p.payload.as_u64();
    const double* row = &codebook_[idx * n_];
    for (unsigned s = 0; s < n_; ++s) y[s] += row[s];
  }
  for (unsigned s = 0; s < n_; ++s) y[s] += noiseSigma_ * rng.gaussian();

  // Correlations <y, x_i>. Maximizing the likelihood of a size-K subset S is
  // equivalent to maximizing sum_{i in S} a_i - sum_{i<j in S} G_ij because
  // all rows carry identical energy.
  std::vector<double> a(M_);
  for (uint64_t i = 0; i < M_; ++i) {
    double dot = 0.0;
    const double* row = &codebook_[i * n_];
    for (unsigned s = 0; s < n_; ++s) dot += row[s] * y[s];
    a[i] = dot;
  }

  std::vector<uint64_t> best;
  double bestScore = -1.0 / 0.0;
  if (K_ == 1) {
    uint64_t arg = 0;
    for (uint64_t i = 1; i < M_; ++i)
      if (a[i] > a[arg]) arg = i;
    best = {arg};
  } else if (K_ == 2) {
    for (uint64_t i = 0; i < M_; ++i) {
      for (uint64_t j = i + 1; j < M_; ++j) {
        double score = a[i] + a[j] - rowDot(i, j);
        if (score > bestScore) {
          bestScore = score;
          best = {i, j};
        }
      }
    }
  } else {
    for (uint64_t i = 0; i < M_; ++i) {
      for (uint64_t j = i + 1; j < M_; ++j) {
        double partial = a[i] + a[j] - rowDot(i, j);
        for (uint64_t k = j + 1; k < M_; ++k) {
          double score = partial + a[k] - rowDot(i, k) - rowDot(j, k);
          if (score > bestScore) {
            bestScore = score;
            best = {i, j, k};
          }
        }
      }
    }
  }

  // Map decoded payloads back to provenance.
  std::unordered_map<uint64_t, std::vector<uint32_t>> senders;
  for (const Packet& p : truth.packets) senders[p.payload.as_u64()].push_back(p.senderId);

  std::vector<DecodedMessage> list;
  list.reserve(best.size());
  for (uint64_t idx : best) {
    DecodedMessage msg;
    msg.payload = Bits::from_u64(idx, B_);
    auto it = senders.find(idx);
    if (it != senders.end()) {
      msg.provenance = Provenance::TruePositive;
      msg.senders = it->second;
    } else {
      msg.provenance = Provenance::FalsePositive;
    }
    list.push_back(std::move(msg));
  }
  for (size_t i = list.size(); i > 1; --i) {
    size_t j = rng.below(i);
    std::swap(list[i - 1], list[j]);
  }
  return list;
}

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double_field(const std::string& text, const char* what) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last)
    throw ParseError(std::string("table: bad ") + what + " value: " + text);
  return v;
}

}  // namespace

PfpTable PfpTable::from_csv_text(const std::string& text) {
  PfpTable table;
  std::istringstream in(text);
  std::string line;
  bool sawHeader = false;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (!sawHeader) {
      if (t != "B,energy_db,p_fp")
        throw ParseError("table: expected header 'B,energy_db,p_fp', got '" + t + "'");
      sawHeader = true;
      continue;
    }
    std::istringstream row(t);
    std::string f1, f2, f3, extra;
    if (!std::getline(row, f1, ',') || !std::getline(row, f2, ',') || !std::getline(row, f3, ','))
      throw ParseError("table: row with fewer than 3 fields: " + t);
    if (std::getline(row, extra, ','))
      throw ParseError("table: row with more than 3 fields: " + t);
    Row r;
    double bVal = parse_double_field(trim(f1), "B");
    if (bVal < 0 || bVal != std::floor(bVal) || bVal > 4096)
      throw ParseError("table: B must be a small nonnegative integer: " + f1);
    r.B = static_cast<unsigned>(bVal);
    r.energyDb = parse_double_field(trim(f2), "energy_db");
    r.pFP = parse_double_field(trim(f3), "p_fp");
    if (!(r.pFP > 0.0) || r.pFP > 1.0)
      throw ParseError("table: p_fp must lie in (0,1]: " + f3);
    table.rows.push_back(r);
  }
  if (!sawHeader) throw ParseError("table: missing header row");
  if (table.rows.empty()) throw ParseError("table: no data rows");
  return table;
}

PfpTable PfpTable::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("table: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_csv_text(buf.str());
}

double lookup_pfp(const PfpTable& table, unsigned B, double energyDb) {
  std::vector<PfpTable::Row> rows;
  for (const auto& r : table.rows)
    if (r.B == B) rows.push_back(r);
  if (rows.empty())
    throw ConfigError("table has no rows for B = " + std::to_string(B));
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a.energyDb < b.energyDb; });
  for (size_t i = 1; i < rows.size(); ++i)
    if (rows[i].energyDb == rows[i - 1].energyDb)
      throw ConfigError("table has duplicate energy rows for B = " + std::to_string(B));

  if (energyDb < rows.front().energyDb || energyDb > rows.back().energyDb)
    throw ConfigError("energy outside the tabulated range");

  auto hi = std::lower_bound(rows.begin(), rows.end(), energyDb,
                             [](const auto& r, double e) { return r.energyDb < e; });
  if (hi->energyDb == energyDb) return hi->pFP;
  auto lo = hi - 1;
  double t = (energyDb - lo->energyDb) / (hi->energyDb - lo->energyDb);
  double logP = std::log10(lo->pFP) + t * (std::log10(hi->pFP) - std::log10(lo->pFP));
  return std::pow(10.0, logP);
}

ChannelModel ChannelModel::parametric(double pTP) {
  if (pTP < 0.0 || pTP > 1.0) throw ConfigError("pTP must lie in [0,1]");
  ChannelModel m;
  m.kind = Kind::Parametric;
  m.pTP = pTP;
  m.pFP = 1.0 - pTP;
  return m;
}

ChannelModel ChannelModel::gaussian_toy(const SystemConfig& config, uint64_t codebookSeed) {
  ChannelModel m;
  m.kind = Kind::GaussianToy;
  m.toy = std::make_shared<GaussianToyChannel>(config, codebookSeed);
  return m;
}

ChannelModel ChannelModel::table_driven(const PfpTable& table, unsigned B, double energyDb) {
  double pFP = lookup_pfp(table, B, energyDb);
  ChannelModel m;
  m.kind = Kind::TableDriven;
  m.pFP = pFP;
  m.pTP = 1.0 - pFP;
  return m;
}

std::vector<DecodedMessage> ChannelModel::apply(const GroundTruth& truth,
                                                const SystemConfig& config, Rng& rng) const {
  if (kind == Kind::GaussianToy) return toy->apply(truth, rng);
  return apply_parametric(truth, pTP, config, rng);
}

std::string ChannelModel::name() const {
  switch (kind) {
    case Kind::Parametric: return "parametric";
    case Kind::GaussianToy: return "gaussian_toy";
    case Kind::TableDriven: return "table_driven";
  }
  return "?";
}

}  // namespace uralab
