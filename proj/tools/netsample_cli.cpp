// netsample: trace generation, parameter calculator, experiment runner.
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "netsample/analysis.hpp"
#include "netsample/error.hpp"
#include "netsample/experiment.hpp"
#include "netsample/report.hpp"
#include "netsample/trace.hpp"

namespace {

using namespace netsample;

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitConfig = 4;
constexpr int kExitInternal = 5;

int exit_code_for(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::kIo: return kExitIo;
    case ErrorCategory::kInvalidArgument:
    case ErrorCategory::kFormat: return kExitConfig;
    case ErrorCategory::kMismatch: return kExitInternal;
  }
  return kExitInternal;
}

// Counts may be written as 1e6 on the command line.
std::uint64_t to_count(double v, const char* name) {
  if (!(v >= 0.0) || v != std::floor(v) || v > 1.8e19) {
    throw_invalid(std::string(name) + " must be a non-negative integer");
  }
  return static_cast<std::uint64_t>(v);
}

struct GenerateArgs {
  double packets = 1e5;
  double skew = 1.0;
  double universe = 1e4;
  std::uint64_t seed = 1;
  double superspreaders = 0;
  double fanout = 0;
  bool plain_ids = false;
  bool addresses = false;
  std::string out;
};

struct ParamsArgs {
  double epsilon = 0.01;
  double delta = 0.01;
  double alpha = 2.0;
  bool json = false;
};

struct RunArgs {
  std::string config;
  std::string trace;
  std::string report;
  std::string csv;
  std::string routing;
  unsigned slot_bits = 0;
  std::size_t switches = 0;
  unsigned threads = 0;
  std::uint64_t hash_seed = 0;
  std::uint64_t routing_seed = 0;
  bool baselines = false;
};

struct TruthArgs {
  std::string trace;
  std::string out;
  double theta = 0.001;
  double psi = 1000.0;
  std::vector<unsigned> prefix_lengths{8, 16, 24, 32};
  bool flow_sizes = false;
};

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
  } else {
    write_text_file(path, text);
  }
}

int cmd_generate(const GenerateArgs& a) {
  TraceParams p;
  p.packets = to_count(a.packets, "--n");
  p.skew = a.skew;
  p.flows = to_count(a.universe, "--universe");
  p.seed = a.seed;
  p.superspreaders = to_count(a.superspreaders, "--superspreaders");
  p.superspreader_fanout = to_count(a.fanout, "--fanout");
  p.address_ids = !a.plain_ids;
  Trace t = gen_zipf_trace(p);
  t.write_addresses = a.addresses;
  save_trace(t, a.out);
  std::cerr << "wrote " << t.size() << " packets to " << a.out << "\n";
  return 0;
}

int cmd_params(const ParamsArgs& a) {
  const auto m = required_sample_size(a.epsilon, a.delta);
  const unsigned bits = slot_bits_for(m, a.alpha);
  const auto bound = convergence_bound(m, a.alpha, a.delta);
  const double beta = a.alpha > 1.0 ? convergence_factor(m, a.alpha, a.delta) : 0.0;
  if (a.json) {
    std::printf("{\"epsilon\": %s, \"delta\": %s, \"alpha\": %s, \"sample_size\": %llu, "
                "\"slot_bits\": %u, \"slots\": %llu, \"beta\": %s, \"convergence_bound\": %llu}\n",
                format_number(a.epsilon).c_str(), format_number(a.delta).c_str(),
                format_number(a.alpha).c_str(), static_cast<unsigned long long>(m), bits,
                1ULL << bits, format_number(beta).c_str(), static_cast<unsigned long long>(bound));
  } else {
    std::printf("sample size M      %llu\n", static_cast<unsigned long long>(m));
    std::printf("slot bits m        %u\n", bits);
    std::printf("slots 2^m          %llu\n", 1ULL << bits);
    if (a.alpha > 1.0) std::printf("beta               %s\n", format_number(beta).c_str());
    std::printf("convergence bound  %llu packets\n", static_cast<unsigned long long>(bound));
  }
  return 0;
}

int cmd_run(const RunArgs& a) {
  ExperimentConfig c = load_config(a.config);
  if (!a.trace.empty()) {
    c.generate.reset();
    c.trace_path = a.trace;
  }
  if (!a.report.empty()) c.report_path = a.report;
  if (!a.csv.empty()) c.csv_path = a.csv;
  if (!a.routing.empty()) c.routing.kind = parse_routing_kind(a.routing);
  if (a.slot_bits) c.slot_bits = a.slot_bits;
  if (a.switches) c.routing.switches = a.switches;
  if (a.threads) c.threads = a.threads;
  if (a.hash_seed) c.hash_seed = a.hash_seed;
  if (a.routing_seed) c.routing_seed = a.routing_seed;
  if (a.baselines) c.baselines.enabled = true;

  const ExperimentReport rep = run_experiment(c);
  emit(c.report_path, report_to_json(rep));
  if (!c.csv_path.empty()) write_text_file(c.csv_path, report_to_csv(rep));
  std::cerr << "packets " << rep.trace_packets << ", flows " << rep.distinct_flows << ", slots 2^"
            << rep.slot_bits << ", sample " << rep.packet_sample.m_tilde << "/" << rep.flow_sample.m_tilde
            << (rep.oblivious_verified ? ", merge verified" : "") << "\n";
  return 0;
}

int cmd_truth(const TruthArgs& a) {
  const Trace t = load_trace(a.trace);
  const GroundTruth g = compute_ground_truth(t, a.theta, a.psi, a.prefix_lengths);
  emit(a.out, ground_truth_to_json(g, a.flow_sizes));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Routing-oblivious network-wide packet and flow sampling"};
  app.set_version_flag("--version", netsample::library_version());
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Write a synthetic Zipf trace");
  g->add_option("-n,--n,--packets", gen.packets, "Number of packets (1e6 notation accepted)")
      ->check(CLI::PositiveNumber);
  g->add_option("--skew", gen.skew, "Zipf exponent (>= 0)")->check(CLI::NonNegativeNumber);
  g->add_option("--universe,--flows", gen.universe, "Flow universe size")->check(CLI::PositiveNumber);
  g->add_option("--seed", gen.seed, "Generator seed");
  g->add_option("--superspreaders", gen.superspreaders, "Planted superspreader sources")
      ->check(CLI::NonNegativeNumber);
  g->add_option("--fanout", gen.fanout, "Distinct destinations per planted source")
      ->check(CLI::NonNegativeNumber);
  g->add_flag("--plain-ids", gen.plain_ids, "Flow ids are popularity ranks instead of address pairs");
  g->add_flag("--addresses", gen.addresses, "Write src/dst columns");
  g->add_option("-o,--out", gen.out, "Output trace file")->required();

  ParamsArgs par;
  auto* p = app.add_subcommand("params", "Print sample size, slot count and convergence bound");
  p->add_option("--epsilon,-e", par.epsilon, "Additive error");
  p->add_option("--delta,-d", par.delta, "Failure probability");
  p->add_option("--alpha,-a", par.alpha, "Slot over-provisioning factor (>= 1)");
  p->add_flag("--json", par.json, "Print JSON");

  RunArgs run;
  auto* r = app.add_subcommand("run", "Run an experiment from a JSON config");
  r->add_option("-c,--config", run.config, "Experiment config (JSON)")->required();
  r->add_option("--trace", run.trace, "Use this trace file instead of the config source");
  r->add_option("--report", run.report, "Report output path ('-' for stdout)");
  r->add_option("--csv", run.csv, "Long-format CSV output path");
  r->add_option("--routing", run.routing, "single | uniform-subset | hop-count | fixed-path");
  r->add_option("--slot-bits", run.slot_bits, "Slot exponent m")->check(CLI::Range(1, 30));
  r->add_option("--switches,-k", run.switches, "Number of switches")->check(CLI::PositiveNumber);
  r->add_option("--threads,-j", run.threads, "Worker threads")->check(CLI::PositiveNumber);
  r->add_option("--hash-seed", run.hash_seed, "Sketch hash seed");
  r->add_option("--routing-seed", run.routing_seed, "Routing seed");
  r->add_flag("--baselines", run.baselines, "Also run the count-distinct baselines");

  TruthArgs tru;
  auto* t = app.add_subcommand("truth", "Compute exact ground truth for a trace");
  t->add_option("--trace", tru.trace, "Trace file")->required();
  t->add_option("--theta", tru.theta, "Heavy-hitter fraction");
  t->add_option("--psi", tru.psi, "Superspreader fan-out threshold");
  t->add_option("--prefix-lengths", tru.prefix_lengths, "Source prefix lengths")->delimiter(',');
  t->add_flag("--flow-sizes", tru.flow_sizes, "Include every flow size");
  t->add_option("-o,--out", tru.out, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*g) return cmd_generate(gen);
    if (*p) return cmd_params(par);
    if (*r) return cmd_run(run);
    if (*t) return cmd_truth(tru);
  } catch (const netsample::Error& e) {
    std::cerr << "error[" << netsample::category_name(e.category()) << "]: " << e.what() << "\n";
    return exit_code_for(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
