#include "divnorm/cli.hpp"

#include <unistd.h>

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "divnorm/dimension.hpp"
#include "divnorm/divergence.hpp"
#include "divnorm/errors.hpp"
#include "divnorm/gambler.hpp"
#include "divnorm/sequences.hpp"
#include "divnorm/synthesis.hpp"

namespace divnorm::cli {
namespace {

struct Common {
  std::string input = "-";
  std::string output;
  std::string report;
  std::optional<std::string> alphabet;
  std::optional<std::string> alpha;
  std::string checkpoints = "geom";
  std::string tail = "1/2";
  std::string mode = "float";
  bool no_timestamp = false;
  bool parallel = false;
};

class Config {
 public:
  explicit Config(std::string command) : command_(std::move(command)) {}
  void set(const std::string& key, const std::string& value) { entries_.emplace_back(key, value); }

  std::string header(bool timestamp) const {
    std::string out = "# divnorm " + command_ + "\n";
    if (timestamp) {
      char buf[64];
      const std::time_t now = std::time(nullptr);
      std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
      out += std::string("# timestamp=") + buf + "\n";
    }
    for (const auto& [k, v] : entries_) out += "# " + k + "=" + v + "\n";
    return out;
  }

 private:
  std::string command_;
  std::vector<std::pair<std::string, std::string>> entries_;
};

// Writes through a temporary file in the same directory so a failed run never
// leaves a partial file behind.
void write_output(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
    return;
  }
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write '" + path + "'");
    f << content;
    f.flush();
    if (!f) {
      std::remove(tmp.c_str());
      throw IoError("cannot write '" + path + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::remove(tmp.c_str());
    throw IoError("cannot write '" + path + "': " + ec.message());
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  if (f.bad()) throw IoError("read error on '" + path + "'");
  return ss.str();
}

// Holds whichever concrete stream backs the input.
struct Input {
  std::unique_ptr<SymbolStream> stream;
  std::unique_ptr<SequenceReader> stdin_reader;

  SymbolStream& get() { return stream ? *stream : *stdin_reader; }
};

Input open_input(const Common& c) {
  std::optional<Alphabet> override_alphabet;
  if (c.alphabet) override_alphabet.emplace(*c.alphabet);
  Input in;
  if (c.input == "-")
    in.stdin_reader = std::make_unique<SequenceReader>(std::cin, override_alphabet);
  else
    in.stream = std::make_unique<SequenceFile>(c.input, override_alphabet);
  return in;
}

Prob alpha_for(const Common& c, const Alphabet& sigma, NumericMode mode) {
  const OutcomeSpace space(sigma);
  const Prob p = c.alpha ? parse_prob(*c.alpha, space) : Prob::uniform(space);
  return p.to_mode(mode);
}

double parse_fraction(const std::string& text, const char* what) {
  try {
    return to_double(parse_rational(text, true));
  } catch (const ParseError&) {
    throw DomainError(std::string("invalid ") + what + " '" + text + "'");
  }
}

void add_common(CLI::App* sub, Common& c, bool input = true) {
  if (input) sub->add_option("--input", c.input, "Sequence file ('-' for stdin)");
  sub->add_option("--alphabet", c.alphabet, "Alphabet symbols when the input has no header");
  sub->add_option("--alpha", c.alpha, "Reference measure such as 1/3,2/3 (default uniform)");
  sub->add_option("--checkpoints", c.checkpoints, "geom, geom:N, every:K or a list");
  sub->add_option("--tail", c.tail, "Tail window fraction");
  sub->add_option("--mode", c.mode, "exact or float");
  sub->add_flag("--no-timestamp", c.no_timestamp, "Omit the timestamp header line");
}

void echo_common(Config& cfg, const Common& c, const Alphabet& sigma, const Prob& alpha) {
  cfg.set("input", c.input);
  cfg.set("alphabet", sigma.symbols());
  const OutcomeSpace space(sigma);
  cfg.set("alpha", format_prob(c.alpha ? parse_prob(*c.alpha, space) : Prob::uniform(space)));
  cfg.set("mode", std::string(to_string(alpha.mode())));
  cfg.set("defaults", "gamma=0.9 lmax=8 tail=0.5 epsilon=0.01 sgrid_step=1/32");
}

// generate ------------------------------------------------------------------

struct GenerateArgs {
  std::string kind;
  std::string alphabet = "01";
  std::uint64_t length = 0;
  std::string pattern;
  std::uint64_t seed = 0;
  std::optional<std::string> alpha;
  std::size_t order = 1;
  std::string output;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
  SequenceSpec spec;
  spec.kind = parse_sequence_kind(a.kind);
  if (spec.kind == SequenceKind::file) throw DomainError("generate cannot produce kind 'file'");
  spec.alphabet = Alphabet(a.alphabet);
  spec.pattern = a.pattern;
  spec.seed = a.seed;
  spec.order = a.order;
  spec.length = a.length;
  if (a.alpha) spec.alpha = parse_prob(*a.alpha, OutcomeSpace(spec.alphabet));
  auto stream = open_sequence(spec);
  std::ostringstream body;
  write_sequence(body, *stream);
  write_output(a.output, body.str(), out);
  return kExitOk;
}

// analyze -------------------------------------------------------------------

struct AnalyzeArgs {
  Common c;
  std::size_t lmax = 8;
  std::string epsilon = "0.01";
};

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
  const NumericMode mode = parse_mode(a.c.mode);
  const double tail = parse_fraction(a.c.tail, "tail fraction");
  const double epsilon = parse_fraction(a.epsilon, "epsilon");
  const CheckpointSpec cps = CheckpointSpec::parse(a.c.checkpoints);
  Input in = open_input(a.c);
  const Prob alpha = alpha_for(a.c, in.get().alphabet(), mode);

  Config cfg("analyze");
  echo_common(cfg, a.c, in.get().alphabet(), alpha);
  cfg.set("lmax", std::to_string(a.lmax));
  cfg.set("checkpoints", cps.describe());
  cfg.set("tail", format_real(tail));
  cfg.set("epsilon", format_real(epsilon));
  const std::string header = cfg.header(!a.c.no_timestamp);

  DivergenceOptions opts{cps, tail, a.c.parallel};
  const DivergenceProfile profile = divergence_profile(in.get(), alpha, a.lmax, opts);
  const NormalityVerdict verdict = normality_check(profile, epsilon);

  std::string report = header;
  for (std::size_t l = 1; l <= a.lmax; ++l) {
    const auto& t = profile.trace(l);
    const auto& e = profile.estimate(l);
    const double inv = 1.0 / static_cast<double>(l);
    report += "l=" + std::to_string(l) + " blocks=" + std::to_string(t.checkpoints.back()) +
              " checkpoints=" + std::to_string(t.checkpoints.size()) + " lower_bits=" + format_ext(e.lower) +
              " upper_bits=" + format_ext(e.upper) + " lower_per_symbol=" + format_ext(e.lower.scaled(inv)) +
              " upper_per_symbol=" + format_ext(e.upper.scaled(inv)) + " last_l1=" + format_real(verdict.last_l1[l - 1]) +
              " within_epsilon=" + (verdict.passes[l - 1] ? "yes" : "no") +
              (t.truncated ? " truncated=yes" : "") + "\n";
  }
  report += "lower_divergence=" + format_ext(profile.lower_divergence) + "\n";
  report += "upper_divergence=" + format_ext(profile.upper_divergence) + "\n";
  report += std::string("verdict=") + (verdict.normal ? "normal" : "non-normal") + "\n";

  if (!a.c.output.empty()) write_output(a.c.output, header + format_profile_csv(profile), out);
  write_output(a.c.report, report, out);
  return kExitOk;
}

// simulate ------------------------------------------------------------------

struct SimulateArgs {
  Common c;
  std::string gambler;
  std::string gamma = "0.9";
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  const NumericMode mode = parse_mode(a.c.mode);
  const double gamma = parse_fraction(a.gamma, "gamma");
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("γ must lie strictly between 0 and 1");
  const CheckpointSpec cps = CheckpointSpec::parse(a.c.checkpoints);
  const Gambler g = parse_gambler(read_text_file(a.gambler));
  Common c = a.c;
  if (!c.alphabet) c.alphabet = g.alphabet().symbols();
  Input in = open_input(c);
  const NumericMode alpha_mode = mode == NumericMode::exact ? NumericMode::exact : NumericMode::floating;
  const Prob alpha = alpha_for(c, in.get().alphabet(), alpha_mode);

  Config cfg("simulate");
  echo_common(cfg, c, in.get().alphabet(), alpha);
  cfg.set("gambler", a.gambler);
  cfg.set("states", std::to_string(g.state_count()));
  cfg.set("gamma", format_real(gamma));
  cfg.set("checkpoints", cps.describe());
  const std::string header = cfg.header(!a.c.no_timestamp);

  RunOptions ro{mode, cps, gamma};
  const CapitalTrace trace = run(g, alpha, in.get(), ro);

  std::string report = header;
  report += "steps=" + std::to_string(trace.steps()) + "\n";
  report += "log2_capital=" + format_real(trace.log2_capital.back()) + "\n";
  report += "total_risk_bits=" + format_real(trace.total_risk.back()) + "\n";
  report += "bankrupt_at=" + (trace.bankrupt_at ? std::to_string(*trace.bankrupt_at) : std::string("none")) + "\n";
  report += "decomposition_residual=" +
            (trace.bankrupt_at ? std::string("undefined") : format_real(log_capital_decomposition(trace, g, alpha))) + "\n";
  for (std::size_t q = 0; q < g.state_count(); ++q)
    report += "risk state=" + std::to_string(q) + " bits=" + format_ext(state_risk(g, q, alpha)) + "\n";

  const SccReport scc = bottom_sccs(g);
  report += "components=" + std::to_string(scc.components.size()) + "\n";
  for (const auto& set : scc.bottom_sets()) {
    report += "bottom_scc=";
    for (std::size_t i = 0; i < set.size(); ++i) report += (i ? "," : "") + std::to_string(set[i]);
    report += "\n";
  }
  report += "absorbed_at=" + (trace.absorbed_at ? std::to_string(*trace.absorbed_at) : std::string("none")) + "\n";
  report += std::string("absorption_held=") + (trace.absorption_held ? "yes" : "no") + "\n";

  for (const auto& row : agafonov_stats(trace, g, alpha)) {
    report += "agafonov state=" + std::to_string(row.state) + " visits=" + std::to_string(row.visits) + " freq=";
    for (std::size_t i = 0; i < row.frequencies.size(); ++i) report += (i ? "," : "") + format_real(row.frequencies[i]);
    report += " l1=" + format_real(row.l1_to_alpha) + "\n";
  }

  const DichotomyReport dich = dichotomy_check_part2(trace, gamma);
  for (const auto& row : dich.rows)
    report += "dichotomy step=" + std::to_string(row.step) + " log2_capital=" + format_real(row.log2_capital) +
              " risk=" + format_real(row.total_risk) + " ratio=" + format_real(row.ratio) + " holds=" +
              (row.boundary ? "boundary" : row.holds ? "yes" : "no") + "\n";
  report += "last_violation=" + (dich.last_violation ? std::to_string(*dich.last_violation) : std::string("none")) +
            "\n";

  if (!a.c.output.empty()) write_output(a.c.output, header + format_trace_csv(trace, g), out);
  write_output(a.c.report, report, out);
  return kExitOk;
}

// synthesize ----------------------------------------------------------------

struct SynthesizeArgs {
  Common c;
  std::size_t l = 2;
  std::string block_measure;
  std::string measure_output;
};

int cmd_synthesize(const SynthesizeArgs& a, std::ostream& out) {
  const NumericMode mode = parse_mode(a.c.mode);
  const double tail = parse_fraction(a.c.tail, "tail fraction");
  const CheckpointSpec cps = CheckpointSpec::parse(a.c.checkpoints);
  const bool have_input = a.block_measure.empty() || a.c.input != "-";

  std::optional<Input> in;
  std::string sequence;
  std::optional<Alphabet> sigma;
  if (have_input) {
    in = open_input(a.c);
    sequence = read_all(in->get());
    sigma = in->get().alphabet();
  } else {
    sigma.emplace(a.c.alphabet.value_or("01"));
  }
  const Prob alpha = alpha_for(a.c, *sigma, mode);

  Config cfg("synthesize");
  echo_common(cfg, a.c, *sigma, alpha);
  std::optional<BlockMeasure> pi0;
  if (!a.block_measure.empty()) {
    pi0 = parse_block_measure(read_text_file(a.block_measure), *sigma);
    cfg.set("block_measure", a.block_measure);
  } else {
    cfg.set("l", std::to_string(a.l));
    cfg.set("checkpoints", cps.describe());
    cfg.set("tail", format_real(tail));
  }
  std::string report;
  if (!pi0) {
    const Pi0Selection sel = select_pi0(sequence, alpha, a.l, cps, tail);
    pi0 = sel.measure;
    cfg.set("selected_blocks", std::to_string(sel.blocks));
    cfg.set("selected_divergence_bits", format_ext(sel.divergence));
  }
  const std::string header = cfg.header(!a.c.no_timestamp);
  const Gambler g = exploit_gambler(*pi0);

  report = header;
  report += "states=" + std::to_string(g.state_count()) + "\n";
  report += "l=" + std::to_string(pi0->block_length()) + "\n";
  if (have_input) {
    RunOptions ro;
    ro.mode = NumericMode::floating;
    std::vector<std::uint64_t> points;
    for (const auto n : cps.resolve(sequence.size() / pi0->block_length())) points.push_back(n * pi0->block_length());
    if (!points.empty()) ro.checkpoints = CheckpointSpec::list(points);
    const CapitalTrace trace = run(g, alpha, sequence, ro);
    const GrowthReport growth = verify_growth_bound(trace, *pi0, alpha, sequence);
    for (const auto& row : growth.rows)
      report += "growth blocks=" + std::to_string(row.blocks) + " steps=" + std::to_string(row.steps) +
                " log2_capital=" + format_real(row.log2_capital) + " predicted=" + format_real(row.predicted) +
                " residual=" + format_real(row.residual) + " fallback=" + (row.fallback_traversed ? "yes" : "no") + "\n";
  }

  std::string gambler_text = header;
  gambler_text += format_gambler(g);
  if (!a.measure_output.empty()) write_output(a.measure_output, header + format_block_measure(*pi0), out);
  write_output(a.c.output, gambler_text, out);
  if (!a.c.report.empty()) write_output(a.c.report, report, out);
  return kExitOk;
}

// dimension -----------------------------------------------------------------

struct DimensionArgs {
  Common c;
  std::size_t lmax = 8;
  std::string sgrid = "0:1:1/32";
  std::string threshold = "0.01";
};

int cmd_dimension(const DimensionArgs& a, std::ostream& out) {
  const NumericMode mode = parse_mode(a.c.mode);
  const double tail = parse_fraction(a.c.tail, "tail fraction");
  const double threshold = parse_fraction(a.threshold, "slope threshold");
  const CheckpointSpec cps = CheckpointSpec::parse(a.c.checkpoints);
  const std::vector<double> grid = parse_s_grid(a.sgrid);
  Input in = open_input(a.c);
  const std::string sequence = read_all(in.get());
  const Prob alpha = alpha_for(a.c, in.get().alphabet(), mode);

  Config cfg("dimension");
  echo_common(cfg, a.c, in.get().alphabet(), alpha);
  cfg.set("lmax", std::to_string(a.lmax));
  cfg.set("checkpoints", cps.describe());
  cfg.set("tail", format_real(tail));
  cfg.set("sgrid", a.sgrid);
  cfg.set("slope_threshold", format_real(threshold));
  const std::string header = cfg.header(!a.c.no_timestamp);

  DimensionOptions opts{cps, tail, threshold, a.c.parallel};
  const DimensionReport report = estimate_dimension(sequence, alpha, a.lmax, grid, opts);
  if (!a.c.output.empty()) write_output(a.c.output, header + format_sgale_csv(report), out);
  write_output(a.c.report, header + format_dimension_report(report), out);
  return kExitOk;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Divergence, normality and finite-state gambling on symbol sequences", "divnorm"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Write a test sequence");
  g->add_option("--kind", gen.kind, "champernowne, lexcat, periodic, iid or debruijn")->required();
  g->add_option("--alphabet", gen.alphabet, "Alphabet symbols");
  g->add_option("--length", gen.length, "Number of symbols")->required();
  g->add_option("--pattern", gen.pattern, "Pattern for periodic sequences");
  g->add_option("--seed", gen.seed, "Seed for iid sequences");
  g->add_option("--alpha", gen.alpha, "Symbol measure for iid sequences");
  g->add_option("--order", gen.order, "Order for de Bruijn sequences");
  g->add_option("--output", gen.output, "Output file (default stdout)");

  AnalyzeArgs an;
  auto* a = app.add_subcommand("analyze", "Block divergence profile and normality verdict");
  add_common(a, an.c);
  a->add_option("--lmax", an.lmax, "Largest block length");
  a->add_option("--epsilon", an.epsilon, "Normality threshold in bits");
  a->add_option("--output", an.c.output, "Profile CSV file");
  a->add_option("--report", an.c.report, "Report file (default stdout)");
  a->add_flag("--parallel", an.c.parallel, "Advance block lengths on separate threads");

  SimulateArgs si;
  auto* s = app.add_subcommand("simulate", "Run a gambler file on a sequence");
  add_common(s, si.c);
  s->add_option("--gambler", si.gambler, "Gambler file")->required();
  s->add_option("--gamma", si.gamma, "Exponent for the risk comparison");
  s->add_option("--output", si.c.output, "Trace CSV file");
  s->add_option("--report", si.c.report, "Report file (default stdout)");

  SynthesizeArgs sy;
  auto* y = app.add_subcommand("synthesize", "Build the block gambler for a sequence or block measure");
  add_common(y, sy.c);
  y->add_option("--l", sy.l, "Block length");
  y->add_option("--block-measure", sy.block_measure, "Use this block measure instead of selecting one");
  y->add_option("--measure-output", sy.measure_output, "Write the block measure used");
  y->add_option("--output", sy.c.output, "Gambler file (default stdout)");
  y->add_option("--report", sy.c.report, "Growth report file");

  DimensionArgs di;
  auto* d = app.add_subcommand("dimension", "Dimension bounds and s-gale estimate");
  add_common(d, di.c);
  d->add_option("--lmax", di.lmax, "Largest block length");
  d->add_option("--sgrid", di.sgrid, "lo:hi:step or a list of s values");
  d->add_option("--threshold", di.threshold, "Slope above which an s-gale diverges");
  d->add_option("--output", di.c.output, "s-gale CSV file");
  d->add_option("--report", di.c.report, "Report file (default stdout)");
  d->add_flag("--parallel", di.c.parallel, "Evaluate block lengths on separate threads");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "divnorm: " << e.what() << "\n";
    err << "run 'divnorm --help' for usage\n";
    return kExitUsage;
  }

  if (g->parsed()) return cmd_generate(gen, out);
  if (a->parsed()) return cmd_analyze(an, out);
  if (s->parsed()) return cmd_simulate(si, out);
  if (y->parsed()) return cmd_synthesize(sy, out);
  return cmd_dimension(di, out);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const ParseError& e) {
    err << "divnorm: malformed input";
    if (e.line() != 0) err << " (line " << e.line() << ")";
    if (e.offset() != 0) err << " (byte offset " << e.offset() << ")";
    err << ": " << e.what() << "\n";
    return kExitMalformed;
  } catch (const DomainError& e) {
    err << "divnorm: " << e.what() << "\n";
    return kExitInvalidMath;
  } catch (const IoError& e) {
    err << "divnorm: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "divnorm: " << e.what() << "\n";
    return kExitInvalidMath;
  }
}

}  // namespace divnorm::cli
