#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "netsample/controller.hpp"
#include "netsample/ground_truth.hpp"
#include "netsample/routing.hpp"
#include "netsample/trace.hpp"

namespace netsample {

struct TaskSelection {
  bool frequency = true;
  bool heavy_hitters = true;
  bool hierarchical = true;
  bool superspreaders = true;
  bool flow_size_distribution = true;
  friend bool operator==(const TaskSelection&, const TaskSelection&) = default;
};

struct BaselineConfig {
  bool enabled = false;
  std::uint64_t seed = 7;
  unsigned volume_register_bits = 12;
  double cmd_epsilon = 0.1;
  double cmd_delta = 0.25;
  // The prefix hierarchy needs a flow universe of at most 32 bits and costs
  // u + 1 grids per switch.
  bool hier_hh = false;
  double hhh_epsilon = 0.2;
  double hhh_delta = 0.25;
  friend bool operator==(const BaselineConfig&, const BaselineConfig&) = default;
};

struct ExperimentConfig {
  // Exactly one trace source.
  std::optional<TraceParams> generate;
  std::string trace_path;

  RoutingModel routing;
  std::uint64_t routing_seed = 1;

  // Either an explicit slot exponent or (epsilon, delta, alpha).
  std::optional<unsigned> slot_bits;
  double epsilon = 0.05;
  double delta = 0.05;
  double alpha = 2.0;
  std::uint64_t hash_seed = 1;

  TaskSelection tasks;
  BaselineConfig baselines;

  double theta = 0.001;
  double psi = 1000.0;
  std::vector<unsigned> prefix_lengths{8, 16, 24, 32};

  // Record filled slots after every 2^j packets of the unified stream.
  bool checkpoints = true;
  unsigned threads = 1;
  // Compare the merged samples against one sketch fed the whole trace.
  bool verify_oblivious = true;

  std::string report_path;
  std::string csv_path;

  void validate() const;
  unsigned resolved_slot_bits() const;
};

struct SampleSummary {
  std::uint64_t m_tilde = 0;
  double v_hat = 0.0;
  std::optional<double> p_hat;
};

struct TaskMetrics {
  std::optional<double> rmse;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
  std::optional<double> wmrd;
  std::optional<double> estimate;
  std::optional<double> truth;
  std::optional<double> rel_error;
};

struct ConvergencePoint {
  std::uint64_t packets = 0;
  std::uint64_t packet_slots = 0;
  std::uint64_t flow_slots = 0;
};

struct BaselineReport {
  double volume_estimate = 0.0;
  // CMDistinct estimates for every flow of the trace.
  std::map<std::uint64_t, double> cmd_frequency;
  std::vector<std::uint64_t> cmd_heavy_hitters;
  bool hier_ran = false;
  std::vector<std::uint64_t> hier_heavy_hitters;
  double hier_threshold = 0.0;
  bool hier_threshold_clamped = false;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::string version;
  unsigned slot_bits = 0;
  unsigned universe_bits = 0;
  std::uint64_t trace_packets = 0;
  std::uint64_t distinct_flows = 0;
  std::size_t switches = 0;
  std::size_t observations = 0;
  bool oblivious_verified = false;

  SampleSummary packet_sample;
  SampleSummary flow_sample;
  std::map<std::uint64_t, double> frequency;  // sampled flows only
  std::vector<std::uint64_t> heavy_hitters;
  std::vector<Prefix> hierarchical;
  std::vector<std::uint32_t> superspreaders;
  SizeHistogram flow_sizes;
  std::vector<ConvergencePoint> convergence;
  std::optional<BaselineReport> baseline;

  std::map<std::string, TaskMetrics> metrics;
};

// Everything the run needs besides the config; exposed so tests can build
// the pieces separately.
struct ExperimentArtifacts {
  Trace trace;
  GroundTruth truth;
  Routing routing;
  std::optional<GlobalSample> packets;
  std::optional<GlobalSample> flows;
};

Trace load_experiment_trace(const ExperimentConfig& config);
ExperimentReport run_experiment(const ExperimentConfig& config);
ExperimentReport run_experiment(const ExperimentConfig& config, ExperimentArtifacts* artifacts);

// Rebuilds the metric table from stored estimates and ground truth.
std::map<std::string, TaskMetrics> score_report(const ExperimentReport& report,
                                                const GroundTruth& truth);

std::string library_version();

}  // namespace netsample
