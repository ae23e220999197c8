#pragma once

#include <cstdint>
#include <string>

#include "netsample/experiment.hpp"
#include "netsample/ground_truth.hpp"

namespace netsample {

// JSON experiment manifest. Unknown keys are rejected so typos surface.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& config);

// Deterministic JSON: fixed key order, flow ids as 0x-prefixed hex strings,
// addresses as dotted quads.
std::string report_to_json(const ExperimentReport& report);
// Long format, one value per row: task,x,metric,value.
std::string report_to_csv(const ExperimentReport& report);
std::string ground_truth_to_json(const GroundTruth& truth, bool include_flow_sizes);

std::string format_flow_id(std::uint64_t fid);
std::string format_ipv4(std::uint32_t address);
std::string format_number(double value);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace netsample
