#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qot::cli {

enum class Subcommand { Honest, Attack, Sweep, Oblivious, Cost, Replay };
enum class OutputFormat { Csv, Jsonl };

struct RunConfig {
  Subcommand subcommand = Subcommand::Honest;
  std::size_t N = 1, M = 0, M2 = 0, K = 0;
  double tau = 0.0;
  std::string scenario = "honest";
  std::string policy = "guess-choice";
  std::size_t trials = 100000;
  std::uint64_t seed = 0;
  OutputFormat format = OutputFormat::Csv;
  std::string out_path;         ///< empty: standard output
  std::string transcript_path;  ///< honest: where to write; replay: what to read
  std::string ue_path;
  std::size_t runs = 1;
  std::string choices;  ///< e.g. "01"; empty: drawn from the seed
  std::string pairs;    ///< e.g. "01,10"; empty: drawn from the seed
  std::string param = "K";
  std::size_t from = 1, to = 20;
  std::int64_t rmax = 100;
  unsigned workers = 1;
};

/// Flat `key = value` file; blank lines and `#` comments are ignored. Keys
/// are flag names without the leading dashes. Throws std::runtime_error if
/// the file cannot be read or a line has no '='.
std::map<std::string, std::string> load_config_file(const std::string& path);

/// Entry point of the qotsim tool. `args` excludes the program name.
/// Returns 0 on success, 1 when a replay diverges or a run fails, 2 on a
/// usage or input error; every failure writes one diagnostic line to `err`.
int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qot::cli
