#include "netsample/hier_hh.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <string>

#include "netsample/error.hpp"
#include "netsample/hashing.hpp"

namespace netsample {

namespace {

constexpr std::uint8_t kMagic[4] = {'A', 'H', 'H', 'H'};
constexpr std::uint8_t kVersion = 1;
constexpr std::size_t kHeaderSize = 32;

void put_le64(std::uint8_t* out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * i));
}
std::uint64_t get_le64(const std::uint8_t* in) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | in[i];
  return v;
}

std::uint64_t universe_mask(unsigned bits) {
  return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
}

}  // namespace

HierHhParams HierHhParams::from(double epsilon, double delta, unsigned universe_bits) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw_invalid("epsilon must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw_invalid("delta must lie in (0, 1)");
  if (universe_bits < 1 || universe_bits > 32) throw_invalid("universe bits must lie in [1, 32]");
  HierHhParams p;
  p.epsilon = epsilon;
  p.delta = delta;
  p.universe_bits = universe_bits;
  p.psi = universe_bits * std::log2(1.0 / delta) / epsilon;
  p.level_epsilon = epsilon / 2.0;
  // Tiny hierarchies give psi <= 2; keep the per-level failure rate a probability.
  p.level_delta = std::min(1.0 / p.psi, 0.5);
  p.top_size = static_cast<std::size_t>(std::ceil(1.0 / p.level_epsilon - 1e-12));
  return p;
}

std::uint64_t level_prefix(std::uint64_t fid, unsigned q, unsigned universe_bits) {
  const std::uint64_t keep = q >= 64 ? 0 : (~std::uint64_t{0} << q);
  return fid & keep & universe_mask(universe_bits);
}

std::vector<std::uint64_t> hhh_descendants(std::span<const std::uint64_t> parents, unsigned q) {
  std::vector<std::uint64_t> out;
  out.reserve(parents.size() * 2);
  for (std::uint64_t p : parents) {
    out.push_back(p);
    out.push_back(p | (std::uint64_t{1} << q));
  }
  return out;
}

HierHh::HierHh(const HierHhParams& params, std::uint64_t seed) : params_(params), seed_(seed) {
  const auto level_params = CmDistinctParams::from(params.level_epsilon, params.level_delta);
  levels_.reserve(params.universe_bits + 1);
  for (unsigned q = 0; q <= params.universe_bits; ++q) {
    levels_.emplace_back(level_params, mix64(seed + 0x632be59bd9b4e019ULL * (q + 1)));
  }
}

void HierHh::add(std::uint64_t fid, std::uint64_t pid) {
  if (fid > universe_mask(params_.universe_bits)) {
    throw_invalid("flow id does not fit the " + std::to_string(params_.universe_bits) +
                  "-bit universe");
  }
  // Element <prefix, pid||fid>: the serial is unique per packet even when
  // packets of different flows share a prefix and a sequence number.
  std::uint8_t serial[24];
  put_be64(serial + 8, pid);
  put_be64(serial + 16, fid);
  for (unsigned q = 0; q <= params_.universe_bits; ++q) {
    const std::uint64_t prefix = level_prefix(fid, q, params_.universe_bits);
    put_be64(serial, prefix);
    levels_[q].add_keyed(prefix, serial);
  }
  v_hat_.reset();
}

void HierHh::merge_from(const HierHh& other) {
  if (!(params_ == other.params_) || seed_ != other.seed_) {
    throw_mismatch("cannot merge hierarchies with different parameters or seed");
  }
  for (std::size_t q = 0; q < levels_.size(); ++q) levels_[q].merge_from(other.levels_[q]);
  v_hat_.reset();
}

void HierHh::finalize() {
  const unsigned u = params_.universe_bits;
  top_.assign(u + 1, {});
  candidates_.clear();
  v_hat_ = levels_[u].query(0);
  top_[u] = {0};
  for (int q = static_cast<int>(u) - 1; q >= 0; --q) {
    const auto desc = hhh_descendants(top_[q + 1], static_cast<unsigned>(q));
    std::vector<std::pair<double, std::uint64_t>> scored;
    scored.reserve(desc.size());
    for (std::uint64_t p : desc) scored.emplace_back(levels_[q].query(p), p);
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    if (scored.size() > params_.top_size) scored.resize(params_.top_size);
    auto& level_top = top_[q];
    for (const auto& [est, p] : scored) level_top.push_back(p);
    std::sort(level_top.begin(), level_top.end());
  }
  for (std::uint64_t x : top_[0]) candidates_[x] = levels_[0].query(x);
}

void HierHh::require_finalized() const {
  if (!v_hat_) throw_invalid("hierarchy must be finalized before querying");
}

double HierHh::v_hat() const {
  require_finalized();
  return *v_hat_;
}

const std::vector<std::uint64_t>& HierHh::top(unsigned q) const {
  require_finalized();
  return top_.at(q);
}

const std::map<std::uint64_t, double>& HierHh::candidates() const {
  require_finalized();
  return candidates_;
}

double hhh_report_threshold(double v_hat, double theta, double eps_a) {
  return v_hat * (theta / (1.0 + eps_a) - eps_a * (1.0 + eps_a));
}

HhQueryResult HierHh::query(double theta) const {
  require_finalized();
  if (!(theta > 0.0 && theta < 1.0)) throw_invalid("theta must lie in (0, 1)");
  HhQueryResult r;
  r.threshold = hhh_report_threshold(*v_hat_, theta, params_.level_epsilon);
  r.threshold_clamped = r.threshold <= 0.0;
  for (const auto& [x, f] : candidates_) {
    if (r.threshold_clamped || f >= r.threshold) r.flows.push_back(x);
  }
  return r;
}

double HierHh::freq_est(std::uint64_t fid) const {
  require_finalized();
  auto it = candidates_.find(fid);
  return it == candidates_.end() ? 0.0 : it->second;
}

std::vector<std::uint8_t> HierHh::serialize() const {
  std::vector<std::uint8_t> out(kHeaderSize, 0);
  std::memcpy(out.data(), kMagic, 4);
  out[4] = kVersion;
  out[5] = static_cast<std::uint8_t>(params_.universe_bits);
  put_le64(out.data() + 8, std::bit_cast<std::uint64_t>(params_.epsilon));
  put_le64(out.data() + 16, std::bit_cast<std::uint64_t>(params_.delta));
  put_le64(out.data() + 24, seed_);
  for (const auto& level : levels_) {
    const auto blob = level.serialize();
    std::uint8_t len[8];
    put_le64(len, blob.size());
    out.insert(out.end(), len, len + 8);
    out.insert(out.end(), blob.begin(), blob.end());
  }
  return out;
}

HierHh HierHh::deserialize(std::span<const std::uint8_t> data) {
  if (data.size() < kHeaderSize) throw_format("hierarchy blob truncated");
  if (std::memcmp(data.data(), kMagic, 4) != 0) throw_format("bad hierarchy magic");
  if (data[4] != kVersion) throw_format("unsupported hierarchy version");
  const double eps = std::bit_cast<double>(get_le64(data.data() + 8));
  const double delta = std::bit_cast<double>(get_le64(data.data() + 16));
  HierHh h(HierHhParams::from(eps, delta, data[5]), get_le64(data.data() + 24));
  std::size_t pos = kHeaderSize;
  for (auto& level : h.levels_) {
    if (data.size() < pos + 8) throw_format("hierarchy blob truncated at level header");
    const std::uint64_t len = get_le64(data.data() + pos);
    pos += 8;
    if (data.size() - pos < len) throw_format("hierarchy blob truncated inside a level");
    CmDistinct decoded = CmDistinct::deserialize(data.subspan(pos, len));
    if (decoded.seed() != level.seed() || !(decoded.params() == level.params())) {
      throw_format("hierarchy level parameters inconsistent with header");
    }
    level = std::move(decoded);
    pos += len;
  }
  if (pos != data.size()) throw_format("trailing bytes after hierarchy levels");
  return h;
}

void hhh_add(HierHh& h, std::uint64_t fid, std::uint64_t pid) { h.add(fid, pid); }

HierHh hhh_merge(std::span<const HierHh> routers) {
  if (routers.empty()) throw_invalid("hhh_merge needs at least one instance");
  HierHh acc = routers.front();
  for (std::size_t i = 1; i < routers.size(); ++i) acc.merge_from(routers[i]);
  acc.finalize();
  return acc;
}

HhQueryResult hhh_query(const HierHh& h, double theta) { return h.query(theta); }

double hhh_freq_est(const HierHh& h, std::uint64_t fid) { return h.freq_est(fid); }

}  // namespace netsample
