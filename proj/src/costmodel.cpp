#include "qot/costmodel.hpp"

#include <algorithm>
#include <stdexcept>

#include "qot/protocol.hpp"

namespace qot {

namespace {

constexpr std::int64_t kDecoysPerTransmission = 50;
constexpr std::int64_t kLoyaltyTests = 20;

// Total-cost constants follow the table's last column.
constexpr std::array<ProtocolCost, 4> kTable{{
    {CostedProtocol::Yang2013, 4, 1, kDecoysPerTransmission, 0, kDecoysPerTransmission},
    {CostedProtocol::YSW2015, 4, 1, 2 * kDecoysPerTransmission, 0, kDecoysPerTransmission},
    {CostedProtocol::YYLSZ2015, 4, 2, 2 * kDecoysPerTransmission, 0, 2 * kDecoysPerTransmission},
    {CostedProtocol::Proposed, 1, 2, 2 * kDecoysPerTransmission, 2 * kLoyaltyTests,
     2 * (kDecoysPerTransmission + kLoyaltyTests)},
}};

}  // namespace

std::string_view to_string(CostedProtocol id) noexcept {
  switch (id) {
    case CostedProtocol::Yang2013: return "yang";
    case CostedProtocol::YSW2015: return "ysw";
    case CostedProtocol::YYLSZ2015: return "yylsz";
    case CostedProtocol::Proposed: return "proposed";
  }
  return "?";
}

const std::array<ProtocolCost, 4>& cost_table() noexcept { return kTable; }

const ProtocolCost& cost_of(CostedProtocol id) noexcept { return kTable[static_cast<std::size_t>(id)]; }

std::int64_t total_cost(CostedProtocol id, std::int64_t R) {
  if (R < 0) throw std::invalid_argument("total_cost: R must be nonnegative");
  return cost_of(id).total(R);
}

std::int64_t crossover() {
  // Every slope is positive and the proposed one is smallest, so the scan ends.
  for (std::int64_t R = 0;; ++R) {
    const auto mine = total_cost(CostedProtocol::Proposed, R);
    const bool cheapest = std::all_of(kCostedProtocols.begin(), kCostedProtocols.end(),
                                      [&](CostedProtocol id) { return mine <= total_cost(id, R); });
    if (cheapest) return R;
  }
}

std::vector<CostRow> emit_curve(std::int64_t r_max) {
  if (r_max < 1) throw std::invalid_argument("emit_curve: R_max must be at least 1");
  std::vector<CostRow> rows;
  rows.reserve(static_cast<std::size_t>(r_max));
  for (std::int64_t R = 1; R <= r_max; ++R) {
    CostRow row{R, {}};
    for (std::size_t i = 0; i < kCostedProtocols.size(); ++i) row.cost[i] = total_cost(kCostedProtocols[i], R);
    rows.push_back(row);
  }
  return rows;
}

std::string cost_csv_header() { return "R,yang,ysw,yylsz,proposed"; }

std::string to_csv(const CostRow& row) {
  std::string s = std::to_string(row.R);
  for (auto c : row.cost) s += ',' + std::to_string(c);
  return s;
}

std::vector<std::string> cost_footnotes() {
  std::vector<std::string> notes;
  for (const auto& p : kTable) {
    if (p.decoy_qubits + p.loyalty_qubits != p.fixed_cost) {
      notes.push_back(std::string(to_string(p.id)) + ": decoy column lists " + std::to_string(p.decoy_qubits) +
                      " qubits but the total uses " + std::to_string(p.fixed_cost) +
                      "; the total is used for every comparison");
    }
  }
  return notes;
}

std::int64_t measured_qubit_consumption(std::int64_t R, std::size_t M, std::size_t M2, std::size_t K,
                                        std::uint64_t seed) {
  if (R < 1) throw std::invalid_argument("measured_qubit_consumption: R must be at least 1");
  ProtocolConfig cfg;
  cfg.N = static_cast<std::size_t>(R);
  cfg.M = M;
  cfg.M2 = M2;
  cfg.K = K;
  cfg.seed = seed;
  Rng rng(derive_seed(seed, 0));
  std::vector<Choice> choices;
  std::vector<MessagePair> pairs;
  draw_inputs(cfg.N, rng, choices, pairs);
  const auto t = run_protocol(cfg, choices, pairs);
  if (t.verdict != Verdict::Success) throw std::runtime_error("measured_qubit_consumption: honest run aborted");
  return static_cast<std::int64_t>(t.qubits_prepared);
}

}  // namespace qot
