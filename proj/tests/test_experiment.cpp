#include "uralab/experiment.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "uralab/analytics.hpp"
#include "uralab/errors.hpp"
#include "uralab/sim.hpp"

namespace {

int g_failures = 0;

void check(bool ok, const std::string& label) {
  if (!ok) {
    std::cout << "  [FAIL] " << label << "\n";
    ++g_failures;
  }
}

template <typename Fn>
void check_parse_error(Fn&& fn, const std::string& label) {
  try {
    fn();
  } catch (const uralab::ParseError&) {
    return;
  } catch (...) {
  }
  std::cout << "  [FAIL] " << label << " (expected ParseError)\n";
  ++g_failures;
}

template <typename Fn>
void check_config_error(Fn&& fn, const std::string& label) {
  try {
    fn();
  } catch (const uralab::ConfigError&) {
    return;
  } catch (...) {
  }
  std::cout << "  [FAIL] " << label << " (expected ConfigError)\n";
  ++g_failures;
}

uralab::ExperimentSpec spec_of(const char* text) {
  return uralab::ExperimentSpec::from_json(nlohmann::json::parse(text));
}

std::string sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.8e", v);
  return buf;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream in(line);
  std::string f;
  while (std::getline(in, f, ',')) fields.push_back(f);
  return fields;
}

const std::string& temp_dir() {
  static std::string dir = [] {
    std::string d = "/tmp/uralab_test_experiment";
    std::filesystem::create_directories(d);
    return d;
  }();
  return dir;
}

std::string write_file(const std::string& name, const std::string& content) {
  std::string path = temp_dir() + "/" + name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  return path;
}

int run_cli(const std::string& binary, const std::string& args) {
  std::string cmd = binary + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

int main() {
  using uralab::AuthVariant;
  using uralab::ChannelModel;
  using uralab::ExperimentSpec;
  using uralab::MacMode;
  using uralab::OrderPolicy;
  using uralab::Scheme;
  namespace analytics = uralab::analytics;

  // ==== experiment spec parsing ===========================================
  {
    ExperimentSpec s = spec_of(R"({"config":{"N":50,"K":5,"L":8,"D":8,"scheme":"MacOnly"}})");
    check(s.name == "experiment" && s.variant == AuthVariant::Exhaustive &&
              s.policy == OrderPolicy::UniformRandomPerMessage &&
              s.mac.kind == MacMode::Kind::IdealOracle && !s.mac.haveSeed &&
              s.trials == 1000 && s.masterSeed == 1 && s.spoofCount == 0 &&
              s.keyBits == 128 && s.channel.kind == ChannelModel::Kind::Parametric &&
              s.channel.pTP == 1.0 && !s.haveComposition && s.sweep.parameter.empty(),
          "defaults fill every unset field");
    check(s.config.N == 50 && s.config.B == 16, "config block parsed");
  }
  {
    ExperimentSpec s = spec_of(R"({
      "name": "full", "config": {"N":100,"K":10,"L":16,"D":16,"A":8,"scheme":"AddressMac"},
      "channel": {"kind":"parametric","pTP":0.95},
      "variant": "heuristic", "policy": "ascending",
      "mac": {"kind":"ideal","seed":42},
      "trials": 500, "masterSeed": 7, "spoofCount": 3, "keyBits": 64,
      "out": "report.json",
      "sweep": {"parameter":"L","values":[8,16]},
      "analytic": {"pTP":0.95,"pFP":0.05},
      "tables": {"bare":"a.csv","mac_only":"b.csv","address_mac":"c.csv"}
    })");
    check(s.name == "full" && s.variant == AuthVariant::Heuristic &&
              s.policy == OrderPolicy::AscendingUserId && s.mac.haveSeed &&
              s.mac.seed == 42 && s.trials == 500 && s.masterSeed == 7 &&
              s.spoofCount == 3 && s.keyBits == 64 && s.outputPath == "report.json" &&
              s.sweep.parameter == "L" && s.sweep.values.size() == 2 &&
              s.haveComposition && s.compositionPtp == 0.95 && s.compositionPfp == 0.05 &&
              s.tables.size() == 3 && s.tables.at("mac_only") == "b.csv",
          "fully specified experiment parsed");
    // Implicit pFP complements pTP.
    ExperimentSpec s2 = spec_of(R"({"config":{"N":9,"K":2,"L":4,"D":4,"scheme":"MacOnly"},
                                    "analytic":{"pTP":0.75}})");
    check(s2.haveComposition && s2.compositionPfp == 0.25, "analytic pFP defaults to 1-pTP");
  }
  check_parse_error([] { spec_of(R"(["not","an","object"])"); }, "spec must be an object");
  check_parse_error([] { spec_of(R"({"config":{"N":9,"K":2,"L":4,"D":4,"scheme":"MacOnly"},
                                     "workers":4})"); },
                    "unknown top-level field rejected");
  check_parse_error([] { spec_of(R"({"name":"x"})"); }, "config block required");
  check_parse_error([] { spec_of(R"({"config":{"N":9,"K":2,"L":4,"D":4,"scheme":"MacOnly"},
                                     "trials":0})"); },
                    "zero trials rejected");
  check_parse_error([] { spec_of(R"({"config":{"N":9,"K":2,"L":4,"D":4,"scheme":"MacOnly"},
                                     "keyBits":12})"); },
                    "keyBits must be byte-aligned");
  check_parse_error([] { spec_of(R"({"config":{"N":9,"K":2,"L":4,"D":4,"scheme":"MacOnly"},
                                     "keyBits":2048})"); },
                    "keyBits above 1024 rejected");
  check_parse_error([] { spec_of(R"({"config":{"N":9,"K":2,"L":4,"D":4,"scheme":"MacOnly"},
                                     "variant":"telepathic"})"); },
                    "unknown variant rejected");
  check_parse_error([] { spec_of(R"({"config":{"N":9,"K":2,"L":4,"D":4,"scheme":"MacOnly"},
                                     "policy":"descending"})"); },
                    "unknown policy rejected");
  check_parse_error([] { spec_of(R"({"config":{"N":9,"K":2,"L":4,"D":4,"scheme":"MacOnly"},
                                     "channel":{"kind":"quantum"}})"); },
                    "unknown channel kind rejected");
  check_parse_error([] { spec_of(R"({"config":{"N":9,"K":2,"L":4,"D":4,"scheme":"MacOnly"},
                                     "channel":{"kind":"parametric","pTP":1.5}})"); },
                    "channel pTP above 1 rejected");
  check_parse_error([] { spec_of(R"({"config":{"N":9,"K":2,"L":4,"D":4,"scheme":"MacOnly"},
                                     "channel":{"kind":"table","table":"x.csv"}})"); },
                    "table channel needs an energy");
  check_parse_error([] { spec_of(R"({"config":{"N":9,"K":2,"L":4,"D":4,"scheme":"MacOnly"},
                                     "channel":{"kind":"parametric","seed":1}})"); },
                    "unknown channel field rejected");
  check_parse_error([] { spec_of(R"({"config":{"N":9,"K":2,"L":4,"D":4,"scheme":"MacOnly"},
                                     "mac":{"kind":"keyed","seed":5}})"); },
                    "seeding the keyed PRF rejected");
  check_parse_error([] { spec_of(R"({"config":{"N":9,"K":2,"L":4,"D":4,"scheme":"MacOnly"},
                                     "mac":{"kind":"vernam"}})"); },
                    "unknown mac kind rejected");
  check_parse_error([] { spec_of(R"({"config":{"N":9,"K":2,"L":4,"D":4,"scheme":"MacOnly"},
                                     "sweep":{"parameter":"N"}})"); },
                    "sweep without values rejected");
  check_parse_error([] { spec_of(R"({"config":{"N":9,"K":2,"L":4,"D":4,"scheme":"MacOnly"},
                                     "sweep":{"parameter":"N","values":[]}})"); },
                    "empty sweep rejected");
  check_parse_error([] { spec_of(R"({"config":{"N":9,"K":2,"L":4,"D":4,"scheme":"MacOnly"},
                                     "analytic":{"pFP":0.5}})"); },
                    "analytic block needs pTP");
  check_parse_error([] { spec_of(R"({"config":{"N":9,"K":2,"L":4,"D":4,"scheme":"MacOnly"},
                                     "analytic":{"pTP":0.9,"pFP":0.5}})"); },
                    "analytic rates must sum to 1");
  check_parse_error([] { spec_of(R"({"config":{"N":9,"K":2,"L":4,"D":4,"scheme":"MacOnly"},
                                     "tables":{"bare":"a","extra":"b"}})"); },
                    "unknown table scheme rejected");
  check_config_error([] { spec_of(R"({"config":{"N":9,"K":20,"L":4,"D":4,"scheme":"MacOnly"}})"); },
                     "infeasible config surfaces as a configuration error");
  check_parse_error([] { ExperimentSpec::from_file("/nonexistent/spec.json"); },
                    "missing spec file rejected");
  {
    std::string bad = write_file("bad.json", "{ not json ]");
    check_parse_error([&] { ExperimentSpec::from_file(bad); }, "malformed JSON rejected");
  }

  // ==== presets ===========================================================
  {
    ExperimentSpec s = ExperimentSpec::preset("fig3");
    check(s.name == "fig3" && s.config.K == 100 && s.config.L == 32 && s.config.D == 64 &&
              s.config.B == 96 && s.config.scheme == Scheme::MacOnly &&
              s.variant == AuthVariant::Heuristic &&
              s.channel.kind == ChannelModel::Kind::Parametric && s.channel.pTP == 0.99 &&
              s.haveComposition && s.compositionPtp == 0.99 && s.compositionPfp == 0.01,
          "population-sweep preset shape");
    check(s.sweep.parameter == "N" && s.sweep.values.size() == 31,
          "ten points per decade over three decades");
    bool gridOk = s.sweep.values.front() == 1000.0 && s.sweep.values.back() == 1000000.0;
    for (int i = 0; i <= 30; ++i) {
      double want = double(std::llround(std::pow(10.0, 3.0 + double(i) / 10.0)));
      gridOk = gridOk && s.sweep.values[size_t(i)] == want &&
               (i == 0 || s.sweep.values[size_t(i)] > s.sweep.values[size_t(i) - 1]);
    }
    check(gridOk, "log-spaced population grid");
    check_parse_error([] { ExperimentSpec::preset("fig99"); }, "unknown preset rejected");
  }

  // ==== spec round trip ===================================================
  {
    const char* text = R"({
      "name": "rt", "config": {"N":64,"K":4,"L":8,"D":8,"scheme":"MacOnly"},
      "channel": {"kind":"table","table":"t.csv","energy_db":2.5},
      "variant": "heuristic", "policy": "ascending", "mac": {"kind":"keyed"},
      "trials": 77, "masterSeed": 9, "spoofCount": 1, "keyBits": 256,
      "out": "x.csv", "sweep": {"parameter":"N","values":[64,128]},
      "analytic": {"pTP":0.9,"pFP":0.1}, "tables": {"bare":"b.csv"}
    })";
    ExperimentSpec s = spec_of(text);
    std::string once = s.to_json().dump();
    ExperimentSpec back = ExperimentSpec::from_json(nlohmann::json::parse(once));
    check(back.to_json().dump() == once, "to_json and from_json are inverse");
  }

  // ==== analytic command ==================================================
  {
    ExperimentSpec s = spec_of(R"({"name":"point",
      "config":{"N":200,"K":20,"L":8,"D":24,"scheme":"MacOnly"},
      "channel":{"kind":"parametric","pTP":0.97}})");
    std::ostringstream out;
    check(uralab::cmd_analytic(s, out) == 0, "analytic run succeeds");
    auto lines = split_lines(out.str());
    check(lines.size() == 6, "header, columns, one data row");
    check(lines[0] == "# ura-auth-lab analytic", "command banner");
    check(lines[1] == "# name: point", "name line");
    check(lines[2] == "# seed: 1", "seed line");
    check(lines[3] == "# spec: " + s.to_json().dump(), "embedded spec line");
    check(lines[4] ==
              "N,p_type1,p_type2,p_succ_exh,p_fp_accept_exh,p_definite_fp,p_succ_heur,"
              "p_misid_heur,p_fp_accept_heur,p_misauth_exh,p_misauth_heur,p_spoof,"
              "p_collision_floor,expected_keys_tried",
          "general column set");
    auto f = split_fields(lines[5]);
    check(f.size() == 14, "fourteen columns");
    // Without an analytic block the parametric channel sets the decoder
    // composition: pTP = 0.97, pFP = 0.03, kTP = round(K * pTP).
    const uint64_t N = 200, K = 20;
    const unsigned L = 8, B = 32;
    const double pTP = 0.97, pFP = 0.03;
    const uint64_t kTP = uint64_t(std::llround(double(K) * pTP));
    check(kTP == 19, "true-positive count rounds from the decoder rate");
    double fpAccExh = analytics::prob_fp_accept_exhaustive(N, kTP, K, L);
    bool cols = f[0] == "200" && f[1] == sci(analytics::prob_type1(N, L)) &&
                f[2] == sci(analytics::prob_type2(K, L)) &&
                f[3] == sci(analytics::prob_success_exhaustive(N, K, L)) &&
                f[4] == sci(fpAccExh) && f[5] == sci(analytics::prob_definite_fp(N, L)) &&
                f[6] == sci(analytics::prob_success_heuristic(N, L)) &&
                f[7] == sci(analytics::prob_misid_heuristic(N, L)) &&
                f[8] == sci(analytics::prob_fp_accept_heuristic(N, L)) &&
                f[9] == sci(pFP * fpAccExh) &&
                f[10] == sci(analytics::prob_misauth_heuristic(pTP, pFP, N, L)) &&
                f[11] == sci(analytics::prob_spoof(pTP, N, L, Scheme::MacOnly)) &&
                f[12] == sci(analytics::collision_floor(K, B)) &&
                f[13] == sci(analytics::expected_keys_tried(N, L));
    check(cols, "every column reproduces its closed form digit for digit");
  }
  {
    // Condensed population-sweep table.
    ExperimentSpec s = ExperimentSpec::preset("fig3");
    std::ostringstream out;
    check(uralab::cmd_analytic(s, out) == 0, "preset sweep runs");
    auto lines = split_lines(out.str());
    check(lines.size() == 4 + 1 + 31, "31 sweep rows");
    check(lines[4] == "N,p_succ_exh,p_succ_heur,p_misauth_exh,p_misauth_heur",
          "condensed column set");
    bool ordered = true;
    const std::string* bigRow = nullptr;
    for (size_t i = 5; i < lines.size(); ++i) {
      auto f = split_fields(lines[i]);
      if (f.size() != 5) {
        ordered = false;
        break;
      }
      // The first-match searcher accepts at least as often as the
      // uniqueness searcher, and errs at least as often, on every row.
      if (std::stod(f[2]) < std::stod(f[1]) || std::stod(f[4]) < std::stod(f[3]))
        ordered = false;
      if (f[0] == "100000") bigRow = &lines[i];
    }
    check(ordered, "acceptance and error orderings hold on every row");
    check(bigRow != nullptr, "population 100000 appears in the sweep");
    if (bigRow) {
      std::string want =
          "100000," + sci(analytics::prob_success_exhaustive(100000, 100, 32)) + ',' +
          sci(analytics::prob_success_heuristic(100000, 32)) + ',' +
          sci(0.01 * analytics::prob_fp_accept_exhaustive(100000, 99, 100, 32)) + ',' +
          sci(analytics::prob_misauth_heuristic(0.99, 0.01, 100000, 32));
      check(*bigRow == want, "condensed row reproduces the closed forms digit for digit");
    }
    // The condensed format is tied to the preset name; renaming falls back
    // to the general columns.
    ExperimentSpec renamed = ExperimentSpec::preset("fig3");
    renamed.name = "custom";
    std::ostringstream out2;
    uralab::cmd_analytic(renamed, out2);
    check(split_lines(out2.str())[4].rfind("N,p_type1,", 0) == 0,
          "renamed sweep uses the general column set");
  }
  {
    // Sweeping the tag width under the bare scheme covers L = 0.
    ExperimentSpec s = spec_of(R"({"config":{"N":40,"K":4,"L":0,"D":12,"scheme":"Bare"},
                                   "sweep":{"parameter":"L","values":[0]}})");
    std::ostringstream out;
    check(uralab::cmd_analytic(s, out) == 0, "bare zero-width sweep runs");
    auto f = split_fields(split_lines(out.str())[5]);
    check(f[0] == "0" && f[6] == sci(analytics::prob_success_heuristic(40, 0)) &&
              f[13] == sci(analytics::expected_keys_tried(40, 0)),
          "zero-width tag row uses the degenerate forms");
    ExperimentSpec s2 = spec_of(R"({"config":{"N":40,"K":4,"L":4,"D":12,"scheme":"MacOnly"},
                                    "sweep":{"parameter":"pTP","values":[0.9]}})");
    std::ostringstream out2;
    uralab::cmd_analytic(s2, out2);
    auto f2 = split_fields(split_lines(out2.str())[5]);
    check(f2[0] == sci(0.9), "non-integral sweep parameter printed in scientific form");
    check(f2[9] == sci(0.1 * analytics::prob_fp_accept_exhaustive(40, 4, 4, 4)),
          "swept decoder rate feeds the composition");
  }
  {
    ExperimentSpec s = spec_of(R"({"config":{"N":40,"K":4,"L":4,"D":12,"scheme":"MacOnly"},
                                   "sweep":{"parameter":"Q","values":[1]}})");
    std::ostringstream out;
    check_parse_error([&] { uralab::cmd_analytic(s, out); }, "unsupported sweep parameter");
    ExperimentSpec s2 = spec_of(R"({"config":{"N":40,"K":4,"L":4,"D":12,"scheme":"MacOnly"},
                                    "sweep":{"parameter":"N","values":[1.5]}})");
    check_parse_error([&] { uralab::cmd_analytic(s2, out); }, "fractional population rejected");
    ExperimentSpec s3 = spec_of(R"({"config":{"N":40,"K":4,"L":4,"D":12,"scheme":"MacOnly"},
                                    "sweep":{"parameter":"L","values":[65]}})");
    check_parse_error([&] { uralab::cmd_analytic(s3, out); }, "tag width above 64 rejected");
    ExperimentSpec s4 = spec_of(R"({"config":{"N":40,"K":4,"L":4,"D":12,"scheme":"MacOnly"},
                                    "sweep":{"parameter":"K","values":[300]}})");
    check_config_error([&] { uralab::cmd_analytic(s4, out); },
                       "sweep value breaking the config rejected");
  }

  // ==== simulate command ==================================================
  {
    ExperimentSpec s = spec_of(R"({"name":"mc",
      "config":{"N":40,"K":5,"L":8,"D":8,"scheme":"MacOnly"},
      "channel":{"kind":"parametric","pTP":0.9},
      "variant":"heuristic","trials":100,"masterSeed":3,"spoofCount":1})");
    std::ostringstream a, b;
    check(uralab::cmd_simulate(s, 1, a) == 0, "simulation runs");
    check(uralab::cmd_simulate(s, 3, b) == 0, "simulation reruns");
    check(a.str() == b.str(), "report is byte-identical across worker counts");
    auto doc = nlohmann::json::parse(a.str());
    check(doc["command"] == "simulate" && doc["name"] == "mc" && doc["seed"] == 3,
          "report header");
    check(doc["spec"]["mac"]["kind"] == "ideal" &&
              doc["spec"]["mac"]["seed"] ==
                  uralab::derive_seed(3, uralab::kSeedRoleMacOracle),
          "derived oracle seed embedded in the spec");
    check(doc["results"]["counters"]["rounds"] == 100 &&
              !doc["results"].contains("workers"),
          "results carry counters but no worker count");
  }
  {
    // The toy channel's codebook seed is derived and embedded the same way.
    ExperimentSpec s = spec_of(R"({"config":
      {"N":10,"K":2,"L":4,"D":4,"scheme":"MacOnly","n":32,"noiseVariance":1e-9},
      "channel":{"kind":"gaussian_toy"},"trials":8,"masterSeed":21})");
    std::ostringstream out;
    check(uralab::cmd_simulate(s, 1, out) == 0, "toy simulation runs");
    auto doc = nlohmann::json::parse(out.str());
    check(doc["spec"]["channel"]["codebookSeed"] ==
              uralab::derive_seed(21, uralab::kSeedRoleCodebook),
          "derived codebook seed embedded in the spec");
    check(doc["results"]["channel"] == "gaussian_toy", "toy channel recorded");
  }
  {
    ExperimentSpec s = spec_of(R"({"config":{"N":20,"K":2,"L":8,"D":8,"scheme":"MacOnly"},
      "mac":{"kind":"keyed"},"trials":20})");
    std::ostringstream out;
    check(uralab::cmd_simulate(s, 2, out) == 0, "keyed simulation runs");
    auto doc = nlohmann::json::parse(out.str());
    check(doc["spec"]["mac"]["kind"] == "keyed" && !doc["spec"]["mac"].contains("seed"),
          "keyed backend embeds no oracle seed");
  }

  // ==== compare-schemes command ===========================================
  const std::string bareCsv = write_file("bare.csv",
                                         "B,energy_db,p_fp\n"
                                         "16,0,1e-1\n16,10,1e-2\n16,20,1e-3\n");
  const std::string macCsv = write_file("mac.csv",
                                        "B,energy_db,p_fp\n"
                                        "24,0,5e-2\n24,10,5e-3\n24,20,5e-4\n");
  const std::string addrCsv = write_file("addr.csv",
                                         "B,energy_db,p_fp\n"
                                         "32,0,2e-2\n32,10,2e-3\n32,20,2e-4\n");
  const std::string compareSpec = std::string(R"({"name":"three-way",
    "config":{"N":200,"K":10,"L":8,"D":16,"A":8,"scheme":"AddressMac"},
    "analytic":{"pTP":0.99,"pFP":0.01},
    "tables":{"bare":")") + bareCsv + R"(","mac_only":")" + macCsv +
                                  R"(","address_mac":")" + addrCsv + R"("}})";
  {
    ExperimentSpec s = spec_of(compareSpec.c_str());
    std::ostringstream out;
    check(uralab::cmd_compare_schemes(s, out) == 0, "comparison runs");
    auto lines = split_lines(out.str());
    check(lines.size() == 10, "four header lines, note, columns, three rows, floor");
    check(lines[0] == "# ura-auth-lab compare-schemes", "comparison banner");
    check(lines[4] ==
              "# p_fp columns are table inputs (measured decoder rates), not derived here",
          "provenance note present");
    check(lines[5] ==
              "energy_db,p_fp_bare,p_fp_mac_only,p_fp_address_mac,"
              "p_misauth_bare,p_misauth_mac_only,p_misauth_address_mac",
          "comparison column set");

    analytics::CryptoParams params;
    params.N = 200;
    params.K = 10;
    params.L = 8;
    params.kTP = uint64_t(std::llround(10 * 0.99));
    auto wantRow = [&](double e, double fpB, double fpM, double fpA) {
      return sci(e) + ',' + sci(fpB) + ',' + sci(fpM) + ',' + sci(fpA) + ',' +
             sci(analytics::total_misauth(Scheme::Bare, fpB, params)) + ',' +
             sci(analytics::total_misauth(Scheme::MacOnly, fpM, params)) + ',' +
             sci(analytics::total_misauth(Scheme::AddressMac, fpA, params));
    };
    check(lines[6] == wantRow(0.0, 1e-1, 5e-2, 2e-2), "row at the lowest energy");
    check(lines[7] == wantRow(10.0, 1e-2, 5e-3, 2e-3), "row at the middle energy");
    check(lines[8] == wantRow(20.0, 1e-3, 5e-4, 2e-4), "row at the highest energy");
    double fB = analytics::collision_floor(10, 16);
    double fM = analytics::collision_floor(10, 24);
    double fA = analytics::collision_floor(10, 32);
    std::string floorWant =
        "floor," + sci(fB) + ',' + sci(fM) + ',' + sci(fA) + ',' +
        sci(analytics::total_misauth(Scheme::Bare, fB, params)) + ',' +
        sci(analytics::total_misauth(Scheme::MacOnly, fM, params)) + ',' +
        sci(analytics::total_misauth(Scheme::AddressMac, fA, params));
    check(lines[9] == floorWant, "floor row composes per-scheme payload collisions");

    // The MAC layers must actually help at these operating points.
    auto row0 = split_fields(lines[6]);
    check(std::stod(row0[5]) < std::stod(row0[4]) && std::stod(row0[6]) < std::stod(row0[5]),
          "each added field cuts the composed error");
  }
  {
    // An explicit energy sweep interpolates between table rows.
    std::string text = compareSpec;
    text.insert(text.size() - 1, R"(,"sweep":{"parameter":"energy_db","values":[5.0]})");
    ExperimentSpec s = spec_of(text.c_str());
    std::ostringstream out;
    check(uralab::cmd_compare_schemes(s, out) == 0, "energy sweep runs");
    auto lines = split_lines(out.str());
    check(lines.size() == 8, "one swept row plus floor");
    auto f = split_fields(lines[6]);
    uralab::PfpTable bt = uralab::PfpTable::load_csv(bareCsv);
    check(f[1] == sci(uralab::lookup_pfp(bt, 16, 5.0)),
          "swept energy uses the interpolated decoder rate");

    std::string badSweep = compareSpec;
    badSweep.insert(badSweep.size() - 1, R"(,"sweep":{"parameter":"N","values":[5]})");
    ExperimentSpec s2 = spec_of(badSweep.c_str());
    check_parse_error([&] { uralab::cmd_compare_schemes(s2, out); },
                      "comparison sweeps energy only");
  }
  {
    // Missing or disjoint tables are detected before any output row.
    std::string noMac = std::string(R"({"config":
      {"N":200,"K":10,"L":8,"D":16,"A":8,"scheme":"AddressMac"},
      "tables":{"bare":")") + bareCsv + R"(","address_mac":")" + addrCsv + R"("}})";
    ExperimentSpec s = spec_of(noMac.c_str());
    std::ostringstream out;
    check_parse_error([&] { uralab::cmd_compare_schemes(s, out); },
                      "absent per-scheme table rejected");

    std::string farCsv = write_file("far.csv", "B,energy_db,p_fp\n32,100,1e-2\n32,110,1e-3\n");
    std::string disjoint = std::string(R"({"config":
      {"N":200,"K":10,"L":8,"D":16,"A":8,"scheme":"AddressMac"},
      "tables":{"bare":")") + bareCsv + R"(","mac_only":")" + macCsv +
                           R"(","address_mac":")" + farCsv + R"("}})";
    ExperimentSpec s2 = spec_of(disjoint.c_str());
    check_config_error([&] { uralab::cmd_compare_schemes(s2, out); },
                       "disjoint energy ranges rejected");

    std::string wrongB = std::string(R"({"config":
      {"N":200,"K":10,"L":8,"D":16,"A":8,"scheme":"AddressMac"},
      "tables":{"bare":")") + macCsv + R"(","mac_only":")" + macCsv +
                         R"(","address_mac":")" + addrCsv + R"("}})";
    ExperimentSpec s3 = spec_of(wrongB.c_str());
    check_config_error([&] { uralab::cmd_compare_schemes(s3, out); },
                       "table lacking the scheme's width rejected");
  }

  // ==== selftest command ==================================================
  {
    std::ostringstream out;
    int rc = uralab::cmd_selftest(1, out);
    check(rc == 0, "verification battery passes");
    auto lines = split_lines(out.str());
    unsigned okCount = 0;
    bool anyFail = false;
    for (const auto& l : lines) {
      if (l.rfind("ok - ", 0) == 0) ++okCount;
      if (l.rfind("FAIL", 0) == 0) anyFail = true;
    }
    check(okCount == 9 && !anyFail, "nine checks reported ok");
  }

  // ==== command-line driver ===============================================
  {
    std::string cli = std::filesystem::exists("./ura-auth-lab") ? "./ura-auth-lab"
                                                                : "./build/ura-auth-lab";
    check(std::filesystem::exists(cli), "driver binary present");

    check(run_cli(cli, "") == 2, "missing subcommand is a usage error");
    check(run_cli(cli, "analytic") == 2, "missing config is a usage error");
    check(run_cli(cli, "analytic --preset fig99") == 2, "unknown preset is a usage error");
    check(run_cli(cli, "analytic --bogus") == 2, "unknown flag is a usage error");
    check(run_cli(cli, "analytic --preset fig3 --config x.json") == 2,
          "config and preset are mutually exclusive");
    check(run_cli(cli, "simulate --config /nonexistent.json") == 2,
          "unreadable config is a usage error");

    std::string infeasible = write_file(
        "infeasible.json", R"({"config":{"N":10,"K":20,"L":8,"D":8,"scheme":"MacOnly"}})");
    check(run_cli(cli, "analytic --config " + infeasible) == 3,
          "infeasible configuration exits 3");

    std::string outPath = temp_dir() + "/fig3.csv";
    check(run_cli(cli, "analytic --preset fig3 --out " + outPath) == 0,
          "preset sweep to a file succeeds");
    std::ifstream in(outPath);
    std::string first;
    std::getline(in, first);
    check(first == "# ura-auth-lab analytic", "file output carries the banner");

    std::string simSpec = write_file("sim.json", R"({"name":"cli",
      "config":{"N":30,"K":3,"L":8,"D":8,"scheme":"MacOnly"},
      "channel":{"kind":"parametric","pTP":0.9},"trials":500,"masterSeed":5})");
    std::string simOut = temp_dir() + "/sim.json.out";
    check(run_cli(cli, "simulate --config " + simSpec + " --trials 60 --seed 8 --out " +
                           simOut) == 0,
          "simulation with overrides succeeds");
    std::ifstream simIn(simOut);
    auto doc = nlohmann::json::parse(simIn);
    check(doc["spec"]["trials"] == 60 && doc["spec"]["masterSeed"] == 8 &&
              doc["results"]["counters"]["rounds"] == 60,
          "command-line overrides land in the embedded spec");

    check(run_cli(cli, "selftest --seed 1") == 0, "driver selftest passes");
  }

  if (g_failures == 0) {
    std::cout << "test_experiment: all checks passed\n";
    return 0;
  }
  std::cout << "test_experiment: " << g_failures << " failure(s)\n";
  return 1;
}
