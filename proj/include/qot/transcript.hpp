#pragma once

// Line-delimited JSON encoding of protocol transcripts, and replay.

#include <cstddef>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qot/protocol.hpp"

namespace qot {

inline constexpr std::string_view kTranscriptVersion = "qotsim-transcript/1";

/// Malformed transcript line.
class TranscriptError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Well-formed line written by a different tool version.
class TranscriptVersionError : public TranscriptError {
 public:
  using TranscriptError::TranscriptError;
};

/// One JSON object on one line, no trailing newline. Field order is fixed so
/// equal transcripts serialize to identical bytes.
std::string to_jsonl(const Transcript& t);

Transcript parse_transcript(std::string_view line);

struct Divergence {
  std::size_t record = 0;  ///< 1-based line number
  std::string field;       ///< first top-level field that differs
};

struct ReplayReport {
  std::size_t records = 0;
  std::optional<Divergence> divergence;

  bool verified() const noexcept { return !divergence.has_value(); }
};

/// Re-executes every record from its stored inputs and compares bytes.
/// Stops at the first divergence. Throws TranscriptError on a corrupt line.
ReplayReport replay(std::istream& in);

}  // namespace qot
