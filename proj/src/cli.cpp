#include "qot/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "qot/adversary.hpp"
#include "qot/costmodel.hpp"
#include "qot/experiments.hpp"
#include "qot/transcript.hpp"

namespace qot::cli {

namespace {

constexpr int kExitRunFailure = 1;
constexpr int kExitUsage = 2;

// Usage problems that CLI11 cannot see (cross-flag rules, bad values).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

ProtocolConfig protocol_config(const RunConfig& rc) {
  ProtocolConfig c;
  c.N = rc.N;
  c.M = rc.M;
  c.M2 = rc.M2;
  c.K = rc.K;
  c.tau = rc.tau;
  c.seed = rc.seed;
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return c;
}

std::vector<Choice> parse_choice_string(const std::string& s, std::size_t n) {
  if (s.size() != n) throw UsageError("--choices needs exactly N = " + std::to_string(n) + " digits");
  std::vector<Choice> out;
  for (char ch : s) {
    if (ch != '0' && ch != '1') throw UsageError("--choices may only contain 0 and 1");
    out.push_back(choice_from_bit(ch - '0'));
  }
  return out;
}

std::vector<MessagePair> parse_pair_string(const std::string& s, std::size_t n) {
  std::vector<MessagePair> out;
  std::istringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    tok = trim(tok);
    if (tok.size() != 2 || (tok[0] != '0' && tok[0] != '1') || (tok[1] != '0' && tok[1] != '1')) {
      throw UsageError("--pairs entries must look like 01");
    }
    out.push_back({static_cast<std::uint8_t>(tok[0] - '0'), static_cast<std::uint8_t>(tok[1] - '0')});
  }
  if (out.size() != n) throw UsageError("--pairs needs exactly N = " + std::to_string(n) + " pairs");
  return out;
}

ResendPolicy resend_policy(const RunConfig& rc) {
  const auto p = parse_resend_policy(rc.policy);
  if (!p) throw UsageError("unknown --policy '" + rc.policy + "'");
  return *p;
}

AttackScenario scenario_of(const RunConfig& rc) {
  std::optional<UeParams> ue;
  if (!rc.ue_path.empty()) {
    if (rc.scenario != "entangling") throw UsageError("--ue-file is only valid with --scenario entangling");
    std::ifstream in(rc.ue_path);
    if (!in) throw UsageError("cannot read Ue parameter file '" + rc.ue_path + "'");
    try {
      ue = read_ue_params(in);
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("Ue parameter file: ") + e.what());
    }
  }
  try {
    return scenario_from_name(rc.scenario, ue);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

void emit_rows(std::ostream& out, OutputFormat format, const std::vector<EstimateRow>& rows) {
  if (format == OutputFormat::Csv) out << estimate_csv_header() << '\n';
  for (const auto& r : rows) out << (format == OutputFormat::Csv ? to_csv(r) : to_json_line(r)) << '\n';
}

void run_honest_command(const RunConfig& rc, std::ostream& out) {
  if (rc.runs == 0) throw UsageError("--runs must be at least 1");
  if (rc.runs > 1 && (!rc.choices.empty() || !rc.pairs.empty())) {
    throw UsageError("--choices and --pairs fix a single run; drop --runs");
  }
  const ProtocolConfig base = protocol_config(rc);
  for (std::size_t i = 0; i < rc.runs; ++i) {
    ProtocolConfig cfg = base;
    cfg.seed = rc.seed + i;
    Rng input_rng(derive_seed(cfg.seed, 0));
    std::vector<Choice> choices;
    std::vector<MessagePair> pairs;
    draw_inputs(cfg.N, input_rng, choices, pairs);
    if (!rc.choices.empty()) choices = parse_choice_string(rc.choices, cfg.N);
    if (!rc.pairs.empty()) pairs = parse_pair_string(rc.pairs, cfg.N);
    out << to_jsonl(run_protocol(cfg, choices, pairs)) << '\n';
  }
}

void run_attack_command(const RunConfig& rc, std::ostream& out) {
  const AttackScenario scenario = scenario_of(rc);
  const ProtocolConfig cfg = protocol_config(rc);
  if (rc.trials == 0) throw UsageError("--trials must be at least 1");

  const bool alice = std::holds_alternative<AliceMeasureResend>(scenario) ||
                     std::holds_alternative<AliceMeasureResendDummy>(scenario);
  if (!alice) {
    ExperimentSpec spec{scenario, cfg, rc.trials, std::nullopt, rc.workers};
    emit_rows(out, rc.format, {estimate_detection_rate(spec)});
    return;
  }

  const ResendPolicy policy = resend_policy(rc);
  const auto variant = std::holds_alternative<AliceMeasureResendDummy>(scenario) ? AliceVariant::Dummy
                                                                                  : AliceVariant::Plain;
  const auto report = alice_attack_report(rc.trials, variant, cfg, policy, rc.workers);
  const double expected_bit = expected_alice_bit_error(policy);
  struct Line {
    const char* metric;
    const RateEstimate& r;
    double expected;
  };
  const Line lines[] = {
      {"conclusive", report.conclusive, kAliceConclusiveRate},
      {variant == AliceVariant::Plain ? "bit_error" : "dummy_error", report.downstream(),
       variant == AliceVariant::Plain ? expected_bit : expected_bit / 2},
  };
  if (rc.format == OutputFormat::Csv) out << "metric,empirical,closed_form,stderr,trials\n";
  for (const auto& l : lines) {
    if (rc.format == OutputFormat::Csv) {
      out << l.metric << ',' << format_number(l.r.rate) << ',' << format_number(l.expected) << ','
          << format_number(l.r.std_error) << ',' << l.r.samples << '\n';
    } else {
      out << "{\"metric\":\"" << l.metric << "\",\"empirical\":" << format_number(l.r.rate)
          << ",\"closed_form\":" << format_number(l.expected) << ",\"stderr\":" << format_number(l.r.std_error)
          << ",\"trials\":" << l.r.samples << "}\n";
    }
  }
}

void run_sweep_command(const RunConfig& rc, std::ostream& out) {
  const AttackScenario scenario = scenario_of(rc);
  const auto param = parse_sweep_param(rc.param);
  if (!param) throw UsageError("--param must be N, M or K");
  if (rc.from > rc.to) throw UsageError("empty sweep range: --from exceeds --to");
  if (rc.trials == 0) throw UsageError("--trials must be at least 1");
  Sweep sweep{*param, {}};
  for (std::size_t v = rc.from; v <= rc.to; ++v) sweep.values.push_back(v);
  ExperimentSpec spec{scenario, protocol_config(rc), rc.trials, sweep, rc.workers};
  try {
    emit_rows(out, rc.format, sweep_curve(spec));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

void run_oblivious_command(std::ostream& out) {
  out << "choice,chosen_bit,trace_distance\n";
  for (Choice c : {Choice::Z, Choice::X}) {
    for (int bit : {0, 1}) {
      out << bit_of(c) << ',' << bit << ',' << format_number(obliviousness_report(c, bit)) << '\n';
    }
  }
}

void run_cost_command(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  if (rc.rmax < 1) throw UsageError("--rmax must be at least 1");
  out << cost_csv_header() << '\n';
  for (const auto& row : emit_curve(rc.rmax)) out << to_csv(row) << '\n';
  err << "# crossover: R = " << crossover() << '\n';
  for (const auto& note : cost_footnotes()) err << "# note: " << note << '\n';
}

int run_replay_command(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  if (rc.transcript_path.empty()) throw UsageError("replay needs --transcript");
  std::ifstream in(rc.transcript_path);
  if (!in) throw UsageError("cannot read transcript '" + rc.transcript_path + "'");
  const auto report = replay(in);
  if (report.verified()) {
    out << "verified " << report.records << " record(s)\n";
    return 0;
  }
  err << "qotsim: replay divergence at record " << report.divergence->record << ", field '"
      << report.divergence->field << "'\n";
  return kExitRunFailure;
}

// Finds --config in the arguments, removes it, and splices the file's
// settings in right after the subcommand so explicit flags still win.
std::vector<std::string> expand_config(const std::vector<std::string>& args, const CLI::App& app) {
  std::vector<std::string> rest;
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a file path");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (path.empty()) return rest;

  std::map<std::string, std::string> settings;
  try {
    settings = load_config_file(path);
  } catch (const std::runtime_error& e) {
    throw UsageError(e.what());
  }
  const auto sub_it = std::find_if(rest.begin(), rest.end(), [&](const std::string& a) {
    return app.get_subcommand_no_throw(a) != nullptr;
  });
  if (sub_it == rest.end()) throw UsageError("--config given without a subcommand");
  const CLI::App* sub = app.get_subcommand_no_throw(*sub_it);

  std::vector<std::string> injected;
  for (const auto& [key, value] : settings) {
    if (key == "config" || sub->get_option_no_throw("--" + key) == nullptr) {
      throw UsageError("config file '" + path + "': unknown key '" + key + "' for " + sub->get_name());
    }
    injected.push_back("--" + key);
    injected.push_back(value);
  }
  rest.insert(sub_it + 1, injected.begin(), injected.end());
  return rest;
}

}  // namespace

std::map<std::string, std::string> load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file '" + path + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config file '" + path + "', line " + std::to_string(line_no) + ": expected key = value");
    }
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig rc;
  std::string format = "csv";

  CLI::App app{"Simulator for single-qubit one-out-of-two quantum oblivious transfer", "qotsim"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);

  auto protocol_flags = [&](CLI::App* sub) {
    sub->add_option("--N", rc.N, "payload qubits (bits received)");
    sub->add_option("--M", rc.M, "Bob's decoy qubits");
    sub->add_option("--M2", rc.M2, "Alice's decoy qubits");
    sub->add_option("--K", rc.K, "loyalty tests (Bob prepares 2K loyalty qubits)");
    sub->add_option("--tau", rc.tau, "abort threshold on observed error rate");
    sub->add_option("--seed", rc.seed, "random seed")->envname("QOTSIM_SEED");
  };
  auto output_flags = [&](CLI::App* sub) {
    sub->add_option("--out", rc.out_path, "output file (default: standard output)");
    sub->add_option("--format", format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
  };
  auto trial_flags = [&](CLI::App* sub) {
    sub->add_option("--trials", rc.trials, "Monte Carlo trials");
    sub->add_option("--workers", rc.workers, "worker threads (results do not depend on this)");
    sub->add_option("--scenario", rc.scenario, "honest, intercept, entangling, bell-cheat, alice-resend, alice-resend-dummy");
    sub->add_option("--ue-file", rc.ue_path, "entangling probe parameters");
    sub->add_option("--policy", rc.policy, "dishonest Alice resend policy: guess-choice, collapsed, uniform-four");
  };

  auto* honest = app.add_subcommand("honest", "run the protocol with honest parties and write transcripts");
  protocol_flags(honest);
  output_flags(honest);
  honest->add_option("--runs", rc.runs, "number of runs (run i uses seed + i)");
  honest->add_option("--choices", rc.choices, "Bob's choices, e.g. 01");
  honest->add_option("--pairs", rc.pairs, "Alice's pairs, e.g. 01,10");
  honest->add_option("--transcript", rc.transcript_path, "transcript file (default: --out or standard output)");

  auto* attack = app.add_subcommand("attack", "estimate a detection or error rate under one attack");
  protocol_flags(attack);
  output_flags(attack);
  trial_flags(attack);

  auto* sweep = app.add_subcommand("sweep", "detection rate over a parameter range");
  protocol_flags(sweep);
  output_flags(sweep);
  trial_flags(sweep);
  sweep->add_option("--param", rc.param, "N, M or K");
  sweep->add_option("--from", rc.from, "first value");
  sweep->add_option("--to", rc.to, "last value (inclusive)");

  auto* oblivious = app.add_subcommand("oblivious", "trace distance hiding the unchosen bit");
  output_flags(oblivious);

  auto* cost = app.add_subcommand("cost", "quantum cost curve of the compared protocols");
  output_flags(cost);
  cost->add_option("--rmax", rc.rmax, "largest R");

  auto* replay_cmd = app.add_subcommand("replay", "re-execute transcripts and compare byte for byte");
  replay_cmd->add_option("--transcript", rc.transcript_path, "transcript file")->required();

  try {
    std::vector<std::string> expanded = expand_config(args, app);
    std::reverse(expanded.begin(), expanded.end());  // CLI11 consumes from the back
    app.parse(expanded);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "qotsim: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "qotsim: " << e.what() << '\n';
    return kExitUsage;
  }
  rc.format = format == "jsonl" ? OutputFormat::Jsonl : OutputFormat::Csv;

  try {
    std::ofstream file;
    std::string path = rc.out_path;
    if (honest->parsed() && !rc.transcript_path.empty()) path = rc.transcript_path;
    if (!path.empty() && !replay_cmd->parsed()) {
      file.open(path, std::ios::binary | std::ios::trunc);
      if (!file) throw UsageError("cannot write '" + path + "'");
    }
    std::ostream& sink = file.is_open() ? static_cast<std::ostream&>(file) : out;

    if (honest->parsed()) {
      rc.subcommand = Subcommand::Honest;
      run_honest_command(rc, sink);
    } else if (attack->parsed()) {
      rc.subcommand = Subcommand::Attack;
      run_attack_command(rc, sink);
    } else if (sweep->parsed()) {
      rc.subcommand = Subcommand::Sweep;
      run_sweep_command(rc, sink);
    } else if (oblivious->parsed()) {
      rc.subcommand = Subcommand::Oblivious;
      run_oblivious_command(sink);
    } else if (cost->parsed()) {
      rc.subcommand = Subcommand::Cost;
      run_cost_command(rc, sink, err);
    } else {
      rc.subcommand = Subcommand::Replay;
      return run_replay_command(rc, out, err);
    }
    sink.flush();
    if (!sink) throw std::runtime_error("write failed");
    return 0;
  } catch (const UsageError& e) {
    err << "qotsim: " << e.what() << '\n';
    return kExitUsage;
  } catch (const TranscriptVersionError& e) {
    err << "qotsim: " << e.what() << '\n';
    return kExitUsage;
  } catch (const TranscriptError& e) {
    err << "qotsim: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "qotsim: " << e.what() << '\n';
    return kExitRunFailure;
  }
}

}  // namespace qot::cli
