#include "netsample/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>
#include <unordered_set>

#include "netsample/error.hpp"
#include "netsample/random.hpp"

namespace netsample {

namespace {

constexpr std::string_view kHeaderPrefix = "#aroma-trace v1 universe=";

// First octets of the synthetic source networks; planted superspreaders live
// in 172/8, which the pool never uses.
constexpr std::uint32_t kNetworks[] = {10, 23, 45, 67, 89, 101, 150, 199};
constexpr std::uint32_t kPlantedNetwork = 172;

std::vector<std::uint32_t> make_source_pool(std::size_t size, Rng& rng) {
  std::vector<std::uint32_t> pool;
  pool.reserve(size);
  std::unordered_set<std::uint32_t> seen;
  while (pool.size() < size) {
    const std::uint32_t a = kNetworks[rng.below(std::size(kNetworks))];
    const auto b = static_cast<std::uint32_t>(rng.below(16));
    const auto c = static_cast<std::uint32_t>(rng.below(256));
    const auto d = static_cast<std::uint32_t>(1 + rng.below(254));
    const std::uint32_t addr = (a << 24) | (b << 16) | (c << 8) | d;
    if (seen.insert(addr).second) pool.push_back(addr);
  }
  return pool;
}

unsigned bits_for_count(std::uint64_t n) {
  unsigned bits = 1;
  while (bits < 64 && (std::uint64_t{1} << bits) < n) ++bits;
  return bits;
}

std::string hex(std::uint64_t v, int width) {
  char buf[17];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, 16);
  std::string s(buf, end);
  if (static_cast<int>(s.size()) < width) s.insert(0, width - s.size(), '0');
  return s;
}

std::uint64_t parse_number(std::string_view field, int base, std::size_t line) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v, base);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw_format("line " + std::to_string(line) + ": bad numeric field '" + std::string(field) + "'");
  }
  return v;
}

}  // namespace

double zipf_probability(std::uint64_t rank, double skew, std::uint64_t flows) {
  double norm = 0.0;
  for (std::uint64_t r = 1; r <= flows; ++r) norm += std::pow(static_cast<double>(r), -skew);
  return std::pow(static_cast<double>(rank), -skew) / norm;
}

Trace gen_zipf_trace(const TraceParams& params) {
  if (params.packets < 1) throw_invalid("trace needs at least one packet");
  if (!(params.skew >= 0.0) || !std::isfinite(params.skew)) throw_invalid("Zipf skew must be >= 0");
  if (params.flows < 1) throw_invalid("flow universe must be non-empty");
  if (params.superspreaders > 0 && params.superspreader_fanout == 0) {
    throw_invalid("planted superspreaders need a positive fanout");
  }
  if (params.superspreaders > 0 && !params.address_ids) {
    throw_invalid("planted superspreaders need address-encoded flow ids");
  }

  Rng rng(params.seed);

  std::vector<double> cdf(params.flows);
  double acc = 0.0;
  for (std::uint64_t r = 0; r < params.flows; ++r) {
    acc += std::pow(static_cast<double>(r + 1), -params.skew);
    cdf[r] = acc;
  }
  for (double& c : cdf) c /= acc;

  // Flow ids by popularity rank.
  std::vector<std::uint64_t> ids(params.flows);
  if (params.address_ids) {
    const auto pool = make_source_pool(std::max<std::size_t>(1, params.flows / 8), rng);
    std::unordered_set<std::uint64_t> seen;
    for (auto& id : ids) {
      do {
        const std::uint32_t src = pool[rng.below(pool.size())];
        const auto dst = static_cast<std::uint32_t>(rng.next() >> 32);
        id = make_flow_id(src, dst);
      } while (!seen.insert(id).second);
    }
  } else {
    for (std::uint64_t r = 0; r < params.flows; ++r) ids[r] = r;
  }

  std::vector<std::uint64_t> fids;
  fids.reserve(params.packets + params.superspreaders * params.superspreader_fanout);
  for (std::uint64_t i = 0; i < params.packets; ++i) {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    fids.push_back(ids[std::min<std::size_t>(it - cdf.begin(), params.flows - 1)]);
  }

  if (params.superspreaders > 0) {
    for (std::uint64_t s = 0; s < params.superspreaders; ++s) {
      const std::uint32_t src = (kPlantedNetwork << 24) | static_cast<std::uint32_t>(s + 1);
      std::unordered_set<std::uint32_t> dsts;
      while (dsts.size() < params.superspreader_fanout) {
        const auto dst = static_cast<std::uint32_t>(rng.next() >> 32);
        if (dsts.insert(dst).second) fids.push_back(make_flow_id(src, dst));
      }
    }
    for (std::size_t i = fids.size() - 1; i > 0; --i) std::swap(fids[i], fids[rng.below(i + 1)]);
  }

  Trace t;
  t.universe_bits = params.address_ids ? 64 : bits_for_count(params.flows);
  t.packets.reserve(fids.size());
  for (std::size_t i = 0; i < fids.size(); ++i) t.packets.push_back({fids[i], i});
  return t;
}

std::string format_trace(const Trace& trace) {
  std::string out;
  out.reserve(trace.packets.size() * 28 + 40);
  out += kHeaderPrefix;
  out += std::to_string(trace.universe_bits);
  out += '\n';
  const int width = static_cast<int>((trace.universe_bits + 3) / 4);
  for (const auto& p : trace.packets) {
    out += std::to_string(p.pid);
    out += ',';
    out += hex(p.fid, width);
    if (trace.write_addresses) {
      out += ',';
      out += hex(source_address(p.fid), 8);
      out += ',';
      out += hex(destination_address(p.fid), 8);
    }
    out += '\n';
  }
  return out;
}

Trace parse_trace(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || !line.starts_with(kHeaderPrefix)) {
    throw_format("missing '#aroma-trace v1 universe=<bits>' header");
  }
  Trace t;
  const auto bits = parse_number(std::string_view(line).substr(kHeaderPrefix.size()), 10, 1);
  if (bits < 1 || bits > 64) throw_format("universe bits must lie in [1, 64]");
  t.universe_bits = static_cast<unsigned>(bits);
  const std::uint64_t limit_mask = bits == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;

  std::size_t lineno = 1;
  bool any_addresses = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != 2 && fields.size() != 4) {
      throw_format("line " + std::to_string(lineno) + ": expected 2 or 4 fields");
    }
    PacketRecord p{parse_number(fields[1], 16, lineno), parse_number(fields[0], 10, lineno)};
    if ((p.fid & ~limit_mask) != 0) {
      throw_format("line " + std::to_string(lineno) + ": flow id outside the declared universe");
    }
    if (fields.size() == 4) {
      any_addresses = true;
      const auto src = parse_number(fields[2], 16, lineno);
      const auto dst = parse_number(fields[3], 16, lineno);
      if (src != source_address(p.fid) || dst != destination_address(p.fid)) {
        throw_format("line " + std::to_string(lineno) + ": src/dst disagree with the flow id");
      }
    }
    if (!t.packets.empty() && p.pid <= t.packets.back().pid) {
      throw_format("line " + std::to_string(lineno) +
                   (p.pid == t.packets.back().pid ? ": duplicate pid " : ": pid not increasing ") +
                   std::to_string(p.pid));
    }
    t.packets.push_back(p);
  }
  t.write_addresses = any_addresses;
  return t;
}

void save_trace(const Trace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_io("cannot open '" + path + "' for writing");
  const std::string text = format_trace(trace);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw_io("write to '" + path + "' failed");
}

Trace load_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_io("cannot open trace file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_trace(buf.str());
}

}  // namespace netsample
