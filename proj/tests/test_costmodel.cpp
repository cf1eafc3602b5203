#include <stdexcept>

#include "doctest.h"
#include "qot/costmodel.hpp"

using namespace qot;

TEST_CASE("per-protocol totals") {
  for (std::int64_t R : {0, 1, 29, 30, 31, 100, 1000}) {
    CHECK(total_cost(CostedProtocol::Yang2013, R) == 4 * R + 50);
    CHECK(total_cost(CostedProtocol::YSW2015, R) == 4 * R + 50);
    CHECK(total_cost(CostedProtocol::YYLSZ2015, R) == 4 * R + 100);
    CHECK(total_cost(CostedProtocol::Proposed, R) == R + 140);
  }
  CHECK_THROWS_AS(total_cost(CostedProtocol::Proposed, -1), std::invalid_argument);
}

TEST_CASE("crossover is the first R where the proposed protocol is cheapest") {
  const auto x = crossover();
  CHECK(x == 30);
  for (auto id : kCostedProtocols) CHECK(total_cost(CostedProtocol::Proposed, x) <= total_cost(id, x));
  CHECK(total_cost(CostedProtocol::Proposed, x - 1) > total_cost(CostedProtocol::Yang2013, x - 1));
}

TEST_CASE("curve rows and csv") {
  const auto rows = emit_curve(3);
  REQUIRE(rows.size() == 3);
  CHECK(rows.front().R == 1);
  CHECK(to_csv(rows.front()) == "1,54,54,104,141");
  CHECK(cost_csv_header() == "R,yang,ysw,yylsz,proposed");
  CHECK_THROWS(emit_curve(0));
  CHECK(to_string(CostedProtocol::YYLSZ2015) == "yylsz");
  CHECK(cost_footnotes().size() == 1);
}

TEST_CASE("table rows are self-consistent") {
  for (const auto& row : cost_table()) {
    CHECK(&cost_of(row.id) == &row);
    CHECK(row.total(0) == row.fixed_cost);
  }
  // The proposed protocol's fixed cost is its decoys plus its loyalty qubits.
  const auto& p = cost_of(CostedProtocol::Proposed);
  CHECK(p.fixed_cost == p.decoy_qubits + p.loyalty_qubits);
}

TEST_CASE("simulated consumption") {
  for (std::int64_t R : {1, 7, 30}) CHECK(measured_qubit_consumption(R, 50, 50, 20, 3) == R + 140);
  CHECK(measured_qubit_consumption(4, 2, 3, 1, 0) == 4 + 2 + 3 + 2);
}
