#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "netsample/sample_sketch.hpp"

namespace netsample {

struct Trace {
  std::vector<PacketRecord> packets;
  unsigned universe_bits = 64;
  // Emit the optional src/dst columns when saving.
  bool write_addresses = false;

  std::size_t size() const { return packets.size(); }
};

struct TraceParams {
  std::uint64_t packets = 100000;
  double skew = 1.0;
  std::uint64_t flows = 10000;  // universe size for the Zipf draw
  std::uint64_t seed = 1;
  // Planted sources that each contact `superspreader_fanout` distinct
  // destinations with one packet per flow; these packets come on top of
  // `packets`.
  std::uint64_t superspreaders = 0;
  std::uint64_t superspreader_fanout = 0;
  // Pair-encoded ids carry addresses; otherwise flow ids are the Zipf ranks
  // 0..flows-1 in a ceil(log2 flows)-bit universe.
  bool address_ids = true;
};

// Packets drawn i.i.d. Zipf(skew) over the flow universe; pid = packet index.
Trace gen_zipf_trace(const TraceParams& params);

// Analytic Zipf probability of the flow at (1-based) popularity rank r.
double zipf_probability(std::uint64_t rank, double skew, std::uint64_t flows);

// Text format: "#aroma-trace v1 universe=<bits>" then "pid,fid_hex[,src_hex,dst_hex]".
void save_trace(const Trace& trace, const std::string& path);
Trace load_trace(const std::string& path);
std::string format_trace(const Trace& trace);
Trace parse_trace(const std::string& text);

}  // namespace netsample
