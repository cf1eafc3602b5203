#pragma once

// Quantum resource cost of receiving R bits, for the direct protocol and
// three protocols that go through all-or-nothing transfer first.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace qot {

enum class CostedProtocol : std::uint8_t { Yang2013, YSW2015, YYLSZ2015, Proposed };

inline constexpr std::array<CostedProtocol, 4> kCostedProtocols{CostedProtocol::Yang2013, CostedProtocol::YSW2015,
                                                                CostedProtocol::YYLSZ2015, CostedProtocol::Proposed};

std::string_view to_string(CostedProtocol id) noexcept;

/// One comparison-table row. `fixed_cost` is the constant term of the total;
/// it equals decoy_qubits + loyalty_qubits except for YSW, whose table row
/// lists 2x50 decoys next to a total of 4R + 50 (see cost_footnotes()).
struct ProtocolCost {
  CostedProtocol id;
  std::int64_t qubits_per_message;
  std::int64_t transmissions;
  std::int64_t decoy_qubits;
  std::int64_t loyalty_qubits;
  std::int64_t fixed_cost;

  std::int64_t total(std::int64_t R) const noexcept { return qubits_per_message * R + fixed_cost; }
};

const std::array<ProtocolCost, 4>& cost_table() noexcept;
const ProtocolCost& cost_of(CostedProtocol id) noexcept;

/// Throws std::invalid_argument for R < 0.
std::int64_t total_cost(CostedProtocol id, std::int64_t R);

/// Smallest R at which the proposed protocol costs no more than any other.
std::int64_t crossover();

struct CostRow {
  std::int64_t R;
  std::array<std::int64_t, 4> cost;  ///< in kCostedProtocols order
};

/// Rows for R = 1..r_max. Throws std::invalid_argument for r_max < 1.
std::vector<CostRow> emit_curve(std::int64_t r_max);

std::string cost_csv_header();
std::string to_csv(const CostRow& row);

/// Notes on table rows whose columns do not add up to their total.
std::vector<std::string> cost_footnotes();

/// Qubits the simulator actually prepares in an honest run receiving R bits
/// with M Bob decoys, M2 Alice decoys and K loyalty tests.
std::int64_t measured_qubit_consumption(std::int64_t R, std::size_t M, std::size_t M2, std::size_t K,
                                        std::uint64_t seed = 0);

}  // namespace qot
