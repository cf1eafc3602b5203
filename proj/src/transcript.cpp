#include "qot/transcript.hpp"

#include <sstream>

#include "json.hpp"

namespace qot {

namespace {

using Json = nlohmann::ordered_json;

std::string bits_string(const std::vector<int>& bits) {
  std::string s;
  s.reserve(bits.size());
  for (int b : bits) s.push_back(b ? '1' : '0');
  return s;
}

std::string bits_string(const std::vector<std::uint8_t>& bits) {
  std::string s;
  s.reserve(bits.size());
  for (auto b : bits) s.push_back(b ? '1' : '0');
  return s;
}

std::string choices_string(const std::vector<Choice>& c) {
  std::string s;
  for (Choice x : c) s.push_back(x == Choice::Z ? '0' : '1');
  return s;
}

template <typename Int>
std::vector<Int> parse_bits(const Json& j, std::string_view what) {
  const auto s = j.get<std::string>();
  std::vector<Int> out;
  out.reserve(s.size());
  for (char ch : s) {
    if (ch != '0' && ch != '1') throw TranscriptError("corrupt transcript: bad bit in " + std::string(what));
    out.push_back(static_cast<Int>(ch - '0'));
  }
  return out;
}

Json channel_json(const ChannelCheck& c) {
  Json positions = Json::array();
  std::string states;
  for (const auto& d : c.published) {
    positions.push_back(d.position);
    states += to_string(d.state);
  }
  return Json{{"positions", positions},     {"states", states},
              {"outcomes", bits_string(c.outcomes)}, {"errors", c.errors},
              {"error_rate", c.error_rate}, {"abort", c.abort}};
}

ChannelCheck parse_channel(const Json& j) {
  ChannelCheck c;
  const auto positions = j.at("positions").get<std::vector<std::size_t>>();
  const auto states = j.at("states").get<std::string>();
  if (positions.size() != states.size()) throw TranscriptError("corrupt transcript: decoy list length mismatch");
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const auto s = parse_prep_state(std::string_view(&states[i], 1));
    if (!s) throw TranscriptError("corrupt transcript: bad decoy state");
    c.published.push_back({positions[i], *s});
  }
  c.outcomes = parse_bits<int>(j.at("outcomes"), "outcomes");
  c.errors = j.at("errors").get<std::size_t>();
  c.error_rate = j.at("error_rate").get<double>();
  c.abort = j.at("abort").get<bool>();
  return c;
}

Json to_json(const Transcript& t) {
  Json pairs = Json::array();
  for (const auto& p : t.pairs) pairs.push_back(std::string{char('0' + p.m0), char('0' + p.m1)});
  std::string bases;
  for (Basis b : t.loyalty.published) bases += to_string(b);

  Json j;
  j["version"] = kTranscriptVersion;
  j["seed"] = t.config.seed;
  j["config"] = Json{{"N", t.config.N}, {"M", t.config.M}, {"K", t.config.K}, {"M2", t.config.M2},
                     {"tau", t.config.tau}};
  j["choices"] = choices_string(t.choices);
  j["pairs"] = pairs;
  j["verdict"] = to_string(t.verdict);
  j["prepared"] = choices_string(t.prepared);
  j["to_alice"] = channel_json(t.to_alice);
  j["loyalty"] = Json{{"positions", t.loyalty.positions}, {"bases", bases},
                      {"outcomes", bits_string(t.loyalty.outcomes)}, {"failures", t.loyalty.failures},
                      {"error_rate", t.loyalty.error_rate}, {"dishonest", t.loyalty.dishonest}};
  j["permutation"] = t.permutation;
  j["to_bob"] = channel_json(t.to_bob);
  j["decode_outcomes"] = bits_string(t.decode_outcomes);
  j["decoded"] = bits_string(t.decoded);
  j["qubits_prepared"] = t.qubits_prepared;
  return j;
}

std::vector<Choice> parse_choices(const Json& j) {
  std::vector<Choice> out;
  for (int b : parse_bits<int>(j, "choices")) out.push_back(choice_from_bit(b));
  return out;
}

}  // namespace

std::string to_jsonl(const Transcript& t) { return to_json(t).dump(); }

Transcript parse_transcript(std::string_view line) {
  Json j;
  try {
    j = Json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw TranscriptError(std::string("corrupt transcript: ") + e.what());
  }
  try {
    if (!j.is_object() || !j.contains("version")) throw TranscriptError("corrupt transcript: missing version");
    const auto version = j.at("version").get<std::string>();
    if (version != kTranscriptVersion) {
      throw TranscriptVersionError("transcript version '" + version + "' is not supported (expected '" +
                                   std::string(kTranscriptVersion) + "')");
    }
    Transcript t;
    t.config.seed = j.at("seed").get<std::uint64_t>();
    const auto& c = j.at("config");
    t.config.N = c.at("N").get<std::size_t>();
    t.config.M = c.at("M").get<std::size_t>();
    t.config.K = c.at("K").get<std::size_t>();
    t.config.M2 = c.at("M2").get<std::size_t>();
    t.config.tau = c.at("tau").get<double>();
    t.choices = parse_choices(j.at("choices"));
    for (const auto& p : j.at("pairs")) {
      const auto s = p.get<std::string>();
      if (s.size() != 2 || (s[0] != '0' && s[0] != '1') || (s[1] != '0' && s[1] != '1')) {
        throw TranscriptError("corrupt transcript: bad message pair");
      }
      t.pairs.push_back({static_cast<std::uint8_t>(s[0] - '0'), static_cast<std::uint8_t>(s[1] - '0')});
    }
    const auto verdict = parse_verdict(j.at("verdict").get<std::string>());
    if (!verdict) throw TranscriptError("corrupt transcript: unknown verdict");
    t.verdict = *verdict;
    t.prepared = parse_choices(j.at("prepared"));
    t.to_alice = parse_channel(j.at("to_alice"));
    const auto& loy = j.at("loyalty");
    t.loyalty.positions = loy.at("positions").get<std::vector<std::size_t>>();
    for (char b : loy.at("bases").get<std::string>()) {
      if (b != 'Z' && b != 'X') throw TranscriptError("corrupt transcript: bad basis");
      t.loyalty.published.push_back(b == 'Z' ? Basis::Z : Basis::X);
    }
    t.loyalty.outcomes = parse_bits<int>(loy.at("outcomes"), "loyalty outcomes");
    t.loyalty.failures = loy.at("failures").get<std::size_t>();
    t.loyalty.error_rate = loy.at("error_rate").get<double>();
    t.loyalty.dishonest = loy.at("dishonest").get<bool>();
    t.permutation = j.at("permutation").get<std::vector<std::size_t>>();
    t.to_bob = parse_channel(j.at("to_bob"));
    t.decode_outcomes = parse_bits<int>(j.at("decode_outcomes"), "decode outcomes");
    t.decoded = parse_bits<std::uint8_t>(j.at("decoded"), "decoded");
    t.qubits_prepared = j.at("qubits_prepared").get<std::size_t>();
    if (t.choices.size() != t.config.N || t.pairs.size() != t.config.N) {
      throw TranscriptError("corrupt transcript: inputs do not match N");
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw TranscriptError(std::string("corrupt transcript: ") + e.what());
  }
}

ReplayReport replay(std::istream& in) {
  ReplayReport report;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const Transcript stored = parse_transcript(line);
    ++report.records;
    Transcript rerun;
    try {
      rerun = run_protocol(stored.config, stored.choices, stored.pairs);
    } catch (const std::exception& e) {
      throw TranscriptError("record " + std::to_string(line_no) + " cannot be re-executed: " + e.what());
    }
    const std::string expected = to_jsonl(rerun);
    if (expected == line) continue;

    Divergence d{line_no, "<encoding>"};
    const Json a = Json::parse(line);
    const Json b = to_json(rerun);
    for (const auto& [key, value] : b.items()) {
      if (!a.contains(key) || a.at(key) != value) {
        d.field = key;
        break;
      }
    }
    report.divergence = d;
    break;
  }
  return report;
}

}  // namespace qot
