#include "netsample/controller.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "netsample/error.hpp"

namespace netsample {

namespace {

void require_mode(const GlobalSample& gs, SampleMode mode, const char* op) {
  if (gs.mode() != mode) {
    throw_invalid(std::string(op) + " needs a " + std::string(mode_name(mode)) +
                  "-mode sample, got " + std::string(mode_name(gs.mode())));
  }
}

void check_theta(double theta) {
  if (!(theta > 0.0 && theta < 1.0)) {
    throw_invalid("theta must lie in (0, 1), got " + std::to_string(theta));
  }
}

}  // namespace

double estimate_cardinality(const SampleSketch& merged) {
  if (merged.filled_count() == 0) return 0.0;
  const double slots = static_cast<double>(merged.slot_count());
  return slots * slots / merged.rank_sum();
}

GlobalSample::GlobalSample(SampleSketch merged)
    : merged_(std::move(merged)),
      m_tilde_(merged_.filled_count()),
      v_hat_(estimate_cardinality(merged_)),
      entries_(merged_.sample_ids()) {
  if (v_hat_ > 0.0) p_hat_ = std::min(1.0, static_cast<double>(m_tilde_) / v_hat_);
  if (merged_.mode() == SampleMode::kPacket) {
    for (const auto& e : entries_) ++flow_counts_[e.fid(SampleMode::kPacket)];
  }
}

const std::unordered_map<std::uint64_t, std::uint64_t>& GlobalSample::flow_counts() const {
  require_mode(*this, SampleMode::kPacket, "flow_counts");
  return flow_counts_;
}

GlobalSample merge_all(std::span<const SampleSketch> sketches) {
  if (sketches.empty()) throw_invalid("merge_all needs at least one sketch");
  SampleSketch acc = sketches.front();
  for (std::size_t i = 1; i < sketches.size(); ++i) acc.merge_from(sketches[i]);
  return GlobalSample(std::move(acc));
}

double estimate_cardinality(const GlobalSample& gs) { return gs.v_hat(); }

double sampling_probability(const GlobalSample& gs) {
  if (!gs.p_hat()) throw_invalid("sampling probability undefined on an empty sample");
  return *gs.p_hat();
}

std::uint64_t sample_count(const GlobalSample& gs, std::uint64_t fid) {
  const auto& counts = gs.flow_counts();
  auto it = counts.find(fid);
  return it == counts.end() ? 0 : it->second;
}

double estimate_frequency(const GlobalSample& gs, std::uint64_t fid) {
  require_mode(gs, SampleMode::kPacket, "estimate_frequency");
  const std::uint64_t t = sample_count(gs, fid);
  if (t == 0) return 0.0;
  return static_cast<double>(t) / sampling_probability(gs);
}

std::vector<std::uint64_t> heavy_hitters(const GlobalSample& gs, double theta) {
  require_mode(gs, SampleMode::kPacket, "heavy_hitters");
  check_theta(theta);
  const double threshold = theta * static_cast<double>(gs.m_tilde());
  std::vector<std::uint64_t> out;
  for (const auto& [fid, t] : gs.flow_counts()) {
    if (static_cast<double>(t) >= threshold) out.push_back(fid);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::uint32_t mask_prefix(std::uint32_t address, unsigned length) {
  if (length == 0) return 0;
  return address & (0xffffffffU << (32 - length));
}

std::vector<Prefix> hierarchical_heavy_hitters(const GlobalSample& gs, double theta,
                                               std::span<const unsigned> prefix_lengths) {
  require_mode(gs, SampleMode::kPacket, "hierarchical_heavy_hitters");
  check_theta(theta);
  for (unsigned len : prefix_lengths) {
    if (len < 1 || len > 32) throw_invalid("prefix length " + std::to_string(len) + " not in [1, 32]");
  }
  const double threshold = theta * static_cast<double>(gs.m_tilde());
  std::vector<Prefix> out;
  for (unsigned len : prefix_lengths) {
    std::unordered_map<std::uint32_t, std::uint64_t> agg;
    for (const auto& [fid, t] : gs.flow_counts()) agg[mask_prefix(source_address(fid), len)] += t;
    for (const auto& [prefix, count] : agg) {
      if (static_cast<double>(count) > threshold) out.push_back({prefix, len});
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::uint32_t> superspreaders(const GlobalSample& gs, double psi) {
  require_mode(gs, SampleMode::kFlow, "superspreaders");
  if (!(psi > 0.0)) throw_invalid("superspreader threshold must be positive");
  const double threshold = psi * sampling_probability(gs);
  std::unordered_map<std::uint32_t, std::uint64_t> per_source;
  for (const auto& e : gs.entries()) ++per_source[source_address(e.fid(SampleMode::kFlow))];
  std::vector<std::uint32_t> out;
  for (const auto& [src, count] : per_source) {
    if (static_cast<double>(count) > threshold) out.push_back(src);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace netsample
