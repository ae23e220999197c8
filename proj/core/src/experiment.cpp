#include "netsample/experiment.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>
#include <thread>

#include "netsample/analysis.hpp"
#include "netsample/cm_distinct.hpp"
#include "netsample/count_distinct.hpp"
#include "netsample/error.hpp"
#include "netsample/hashing.hpp"
#include "netsample/hier_hh.hpp"
#include "netsample/metrics.hpp"

#ifndef NETSAMPLE_VERSION
#define NETSAMPLE_VERSION "0.0.0"
#endif

namespace netsample {

std::string library_version() { return NETSAMPLE_VERSION; }

void ExperimentConfig::validate() const {
  if (generate.has_value() == !trace_path.empty()) {
    throw_invalid("config needs exactly one trace source (generate or trace path)");
  }
  if (generate) {
    if (generate->packets < 1) throw_invalid("generate.packets must be at least 1");
    if (!(generate->skew >= 0.0) || !std::isfinite(generate->skew)) {
      throw_invalid("generate.skew must be a finite value >= 0");
    }
    if (generate->flows < 1) throw_invalid("generate.flows must be at least 1");
  }
  if (routing.switches < 1) throw_invalid("routing needs at least one switch");
  if (routing.kind == RoutingKind::kUniformSubset &&
      !(routing.subset_probability > 0.0 && routing.subset_probability <= 1.0)) {
    throw_invalid("subset probability must lie in (0, 1]");
  }
  if (slot_bits) {
    if (*slot_bits < 1 || *slot_bits > 30) throw_invalid("slot_bits must lie in [1, 30]");
  } else {
    const unsigned bits = slot_bits_for(required_sample_size(epsilon, delta), alpha);
    if (bits > 30) throw_invalid("derived slot count exceeds 2^30");
  }
  if (!(theta > 0.0 && theta < 1.0)) throw_invalid("theta must lie in (0, 1)");
  if (!(psi > 0.0)) throw_invalid("psi must be positive");
  for (unsigned len : prefix_lengths) {
    if (len < 1 || len > 32) throw_invalid("prefix lengths must lie in [1, 32]");
  }
  if (threads < 1) throw_invalid("threads must be at least 1");
  if (baselines.enabled) {
    CmDistinctParams::from(baselines.cmd_epsilon, baselines.cmd_delta);
    CountDistinctSketch probe(baselines.volume_register_bits, 0);
    (void)probe;
    if (baselines.hier_hh) HierHhParams::from(baselines.hhh_epsilon, baselines.hhh_delta, 8);
  }
}

unsigned ExperimentConfig::resolved_slot_bits() const {
  if (slot_bits) return *slot_bits;
  return slot_bits_for(required_sample_size(epsilon, delta), alpha);
}

Trace load_experiment_trace(const ExperimentConfig& config) {
  if (config.generate) return gen_zipf_trace(*config.generate);
  return load_trace(config.trace_path);
}

namespace {

// Sketch state held by one worker: every switch it owns is built from scratch
// and folded into these accumulators.
struct Accumulator {
  std::optional<SampleSketch> packets;
  std::optional<SampleSketch> flows;
  std::optional<CountDistinctSketch> volume;
  std::optional<CmDistinct> cmd;
  std::optional<HierHh> hier;
};

template <typename T>
void fold(std::optional<T>& acc, T&& value) {
  if (acc) {
    acc->merge_from(value);
  } else {
    acc.emplace(std::forward<T>(value));
  }
}

struct SwitchBuilder {
  const ExperimentConfig& config;
  const Trace& trace;
  unsigned slot_bits;
  unsigned universe_bits;

  void build(const std::vector<std::uint32_t>& indices, Accumulator& acc) const {
    SampleSketch pkt(SampleMode::kPacket, slot_bits, config.hash_seed);
    SampleSketch flw(SampleMode::kFlow, slot_bits, config.hash_seed);
    for (std::uint32_t i : indices) {
      pkt.add(trace.packets[i]);
      flw.add(trace.packets[i]);
    }
    fold(acc.packets, std::move(pkt));
    fold(acc.flows, std::move(flw));
    if (!config.baselines.enabled) return;

    const auto& b = config.baselines;
    CountDistinctSketch vol(b.volume_register_bits, b.seed);
    CmDistinct cmd(b.cmd_epsilon, b.cmd_delta, b.seed);
    std::optional<HierHh> hier;
    if (b.hier_hh) hier.emplace(b.hhh_epsilon, b.hhh_delta, universe_bits, b.seed);
    for (std::uint32_t i : indices) {
      const auto& p = trace.packets[i];
      const auto entry = packet_entry_bytes(p.pid, p.fid);
      vol.add(std::span(entry.bytes.data(), entry.len));
      cmd.add(p.fid, p.pid);
      if (hier) hier->add(p.fid, p.pid);
    }
    fold(acc.volume, std::move(vol));
    fold(acc.cmd, std::move(cmd));
    if (hier) fold(acc.hier, std::move(*hier));
  }
};

void merge_into(Accumulator& into, Accumulator&& from) {
  if (from.packets) fold(into.packets, std::move(*from.packets));
  if (from.flows) fold(into.flows, std::move(*from.flows));
  if (from.volume) fold(into.volume, std::move(*from.volume));
  if (from.cmd) fold(into.cmd, std::move(*from.cmd));
  if (from.hier) fold(into.hier, std::move(*from.hier));
}

Accumulator build_switches(const SwitchBuilder& builder, const Routing& routing, unsigned threads) {
  const std::size_t k = routing.per_switch.size();
  const std::size_t workers = std::min<std::size_t>(threads, k);
  std::vector<Accumulator> partial(workers);
  auto work = [&](std::size_t w) {
    for (std::size_t s = w; s < k; s += workers) builder.build(routing.per_switch[s], partial[w]);
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          work(w);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  Accumulator out;
  for (auto& p : partial) merge_into(out, std::move(p));
  return out;
}

SampleSummary summarize(const GlobalSample& gs) { return {gs.m_tilde(), gs.v_hat(), gs.p_hat()}; }

double rel_error(double estimate, double truth) {
  if (truth == 0.0) return estimate == 0.0 ? 0.0 : 1.0;
  return std::abs(estimate - truth) / truth;
}

TaskMetrics f1_metrics(const F1Score& s) {
  TaskMetrics m;
  m.precision = s.precision;
  m.recall = s.recall;
  m.f1 = s.f1;
  return m;
}

}  // namespace

std::map<std::string, TaskMetrics> score_report(const ExperimentReport& report,
                                                const GroundTruth& truth) {
  std::map<std::string, TaskMetrics> out;
  const auto& tasks = report.config.tasks;

  TaskMetrics card_pkt;
  card_pkt.estimate = report.packet_sample.v_hat;
  card_pkt.truth = static_cast<double>(truth.total_packets);
  card_pkt.rel_error = rel_error(*card_pkt.estimate, *card_pkt.truth);
  out["cardinality_packets"] = card_pkt;
  TaskMetrics card_flow;
  card_flow.estimate = report.flow_sample.v_hat;
  card_flow.truth = static_cast<double>(truth.distinct_flows);
  card_flow.rel_error = rel_error(*card_flow.estimate, *card_flow.truth);
  out["cardinality_flows"] = card_flow;

  if (tasks.frequency) {
    TaskMetrics m;
    std::unordered_map<std::uint64_t, double> est(report.frequency.begin(), report.frequency.end());
    m.rmse = metric_rmse(est, truth.flow_sizes);
    out["frequency"] = m;
  }
  if (tasks.heavy_hitters) out["heavy_hitters"] = f1_metrics(metric_f1(report.heavy_hitters, truth.heavy_hitters));
  if (tasks.hierarchical) out["hierarchical"] = f1_metrics(metric_f1(report.hierarchical, truth.hierarchical));
  if (tasks.superspreaders) {
    out["superspreaders"] = f1_metrics(metric_f1(report.superspreaders, truth.superspreaders));
  }
  if (tasks.flow_size_distribution) {
    TaskMetrics m;
    m.wmrd = metric_wmrd(report.flow_sizes, truth.size_histogram);
    out["flow_size_distribution"] = m;
  }
  if (report.baseline) {
    const auto& b = *report.baseline;
    TaskMetrics vol;
    vol.estimate = b.volume_estimate;
    vol.truth = static_cast<double>(truth.total_packets);
    vol.rel_error = rel_error(b.volume_estimate, *vol.truth);
    out["baseline_volume"] = vol;
    TaskMetrics freq;
    std::unordered_map<std::uint64_t, double> est(b.cmd_frequency.begin(), b.cmd_frequency.end());
    freq.rmse = metric_rmse(est, truth.flow_sizes);
    out["baseline_cmd_frequency"] = freq;
    out["baseline_cmd_heavy_hitters"] = f1_metrics(metric_f1(b.cmd_heavy_hitters, truth.heavy_hitters));
    if (b.hier_ran) {
      out["baseline_hier_heavy_hitters"] = f1_metrics(metric_f1(b.hier_heavy_hitters, truth.heavy_hitters));
    }
  }
  return out;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  return run_experiment(config, nullptr);
}

ExperimentReport run_experiment(const ExperimentConfig& config, ExperimentArtifacts* artifacts) {
  config.validate();
  Trace trace = load_experiment_trace(config);
  if (trace.packets.empty()) throw_invalid("trace holds no packets");
  if (config.baselines.enabled && config.baselines.hier_hh && trace.universe_bits > 32) {
    throw_invalid("hierarchical baseline needs a flow universe of at most 32 bits (trace has " +
                  std::to_string(trace.universe_bits) + ")");
  }
  GroundTruth truth = compute_ground_truth(trace, config.theta, config.psi, config.prefix_lengths);
  Routing routing = route(trace, config.routing, config.routing_seed);

  ExperimentReport rep;
  rep.config = config;
  rep.version = library_version();
  rep.slot_bits = config.resolved_slot_bits();
  rep.universe_bits = trace.universe_bits;
  rep.trace_packets = trace.size();
  rep.distinct_flows = truth.distinct_flows;
  rep.switches = routing.per_switch.size();
  rep.observations = routing.total_observations();

  const SwitchBuilder builder{config, trace, rep.slot_bits, trace.universe_bits};
  Accumulator acc = build_switches(builder, routing, config.threads);
  GlobalSample packets(std::move(*acc.packets));
  GlobalSample flows(std::move(*acc.flows));

  if (config.verify_oblivious || config.checkpoints) {
    SampleSketch single_pkt(SampleMode::kPacket, rep.slot_bits, config.hash_seed);
    SampleSketch single_flw(SampleMode::kFlow, rep.slot_bits, config.hash_seed);
    std::uint64_t next_mark = 1;
    for (std::size_t i = 0; i < trace.size(); ++i) {
      single_pkt.add(trace.packets[i]);
      single_flw.add(trace.packets[i]);
      const std::uint64_t seen = i + 1;
      if (config.checkpoints && (seen == next_mark || seen == trace.size())) {
        rep.convergence.push_back({seen, single_pkt.filled_count(), single_flw.filled_count()});
        while (next_mark <= seen) next_mark *= 2;
      }
    }
    if (config.verify_oblivious) {
      if (!(single_pkt == packets.merged()) || !(single_flw == flows.merged())) {
        throw Error(ErrorCategory::kMismatch,
                    "merged per-switch samples differ from the single-stream sample");
      }
      rep.oblivious_verified = true;
    }
  }

  rep.packet_sample = summarize(packets);
  rep.flow_sample = summarize(flows);
  const bool have_packets = packets.m_tilde() > 0;
  const bool have_flows = flows.m_tilde() > 0;
  if (config.tasks.frequency && have_packets) {
    for (const auto& [fid, count] : packets.flow_counts()) {
      rep.frequency[fid] = estimate_frequency(packets, fid);
    }
  }
  if (config.tasks.heavy_hitters) rep.heavy_hitters = heavy_hitters(packets, config.theta);
  if (config.tasks.hierarchical) {
    rep.hierarchical = hierarchical_heavy_hitters(packets, config.theta, config.prefix_lengths);
  }
  if (config.tasks.superspreaders && have_flows) rep.superspreaders = superspreaders(flows, config.psi);
  if (config.tasks.flow_size_distribution && have_packets && have_flows) {
    rep.flow_sizes = flow_size_distribution(packets, flows);
  }

  if (config.baselines.enabled) {
    BaselineReport b;
    b.volume_estimate = acc.volume->query();
    const FrozenCmDistinct grid(*acc.cmd);
    const double cut = config.theta * b.volume_estimate;
    for (const auto& [fid, size] : truth.flow_sizes) {
      const double f = grid.query(fid);
      b.cmd_frequency[fid] = f;
    }
    for (const auto& [fid, f] : b.cmd_frequency) {
      if (f >= cut) b.cmd_heavy_hitters.push_back(fid);
    }
    if (acc.hier) {
      acc.hier->finalize();
      const auto q = acc.hier->query(config.theta);
      b.hier_ran = true;
      b.hier_heavy_hitters = q.flows;
      std::sort(b.hier_heavy_hitters.begin(), b.hier_heavy_hitters.end());
      b.hier_threshold = q.threshold;
      b.hier_threshold_clamped = q.threshold_clamped;
    }
    rep.baseline = std::move(b);
  }

  rep.metrics = score_report(rep, truth);
  if (artifacts) {
    artifacts->trace = std::move(trace);
    artifacts->truth = std::move(truth);
    artifacts->routing = std::move(routing);
    artifacts->packets = std::move(packets);
    artifacts->flows = std::move(flows);
  }
  return rep;
}

}  // namespace netsample
