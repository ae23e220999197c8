#include "netsample/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "netsample/error.hpp"

namespace netsample {

using ojson = nlohmann::ordered_json;

namespace {

void check_keys(const ojson& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw_invalid(where + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!ok.count(it.key())) throw_invalid("unknown key '" + it.key() + "' in " + where);
  }
}

std::uint64_t as_u64(const ojson& v, const std::string& name) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    const auto i = v.get<std::int64_t>();
    if (i < 0) throw_invalid(name + " must be non-negative");
    return static_cast<std::uint64_t>(i);
  }
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (!(d >= 0.0) || d != std::floor(d) || d > 1.8e19) throw_invalid(name + " must be a non-negative integer");
    return static_cast<std::uint64_t>(d);
  }
  throw_invalid(name + " must be a number");
}

double as_double(const ojson& v, const std::string& name) {
  if (!v.is_number()) throw_invalid(name + " must be a number");
  return v.get<double>();
}

bool as_bool(const ojson& v, const std::string& name) {
  if (!v.is_boolean()) throw_invalid(name + " must be true or false");
  return v.get<bool>();
}

std::string as_string(const ojson& v, const std::string& name) {
  if (!v.is_string()) throw_invalid(name + " must be a string");
  return v.get<std::string>();
}

template <typename F>
void with(const ojson& obj, const char* key, F&& f) {
  auto it = obj.find(key);
  if (it != obj.end()) f(*it);
}

ojson opt(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

ojson config_json(const ExperimentConfig& c) {
  ojson j;
  ojson trace;
  if (c.generate) {
    const auto& g = *c.generate;
    trace["generate"] = {{"packets", g.packets},
                         {"skew", g.skew},
                         {"flows", g.flows},
                         {"seed", g.seed},
                         {"superspreaders", g.superspreaders},
                         {"superspreader_fanout", g.superspreader_fanout},
                         {"address_ids", g.address_ids}};
  } else {
    trace["path"] = c.trace_path;
  }
  j["trace"] = trace;
  j["routing"] = {{"kind", std::string(routing_kind_name(c.routing.kind))},
                  {"switches", c.routing.switches},
                  {"subset_probability", c.routing.subset_probability},
                  {"hop_nodes", c.routing.hop_nodes},
                  {"hop_k_max", c.routing.hop_k_max},
                  {"seed", c.routing_seed}};
  ojson sketch;
  if (c.slot_bits) sketch["slot_bits"] = *c.slot_bits;
  sketch["epsilon"] = c.epsilon;
  sketch["delta"] = c.delta;
  sketch["alpha"] = c.alpha;
  sketch["hash_seed"] = c.hash_seed;
  j["sketch"] = sketch;
  j["tasks"] = {{"frequency", c.tasks.frequency},
                {"heavy_hitters", c.tasks.heavy_hitters},
                {"hierarchical", c.tasks.hierarchical},
                {"superspreaders", c.tasks.superspreaders},
                {"flow_size_distribution", c.tasks.flow_size_distribution}};
  j["baselines"] = {{"enabled", c.baselines.enabled},
                    {"seed", c.baselines.seed},
                    {"volume_register_bits", c.baselines.volume_register_bits},
                    {"cmd_epsilon", c.baselines.cmd_epsilon},
                    {"cmd_delta", c.baselines.cmd_delta},
                    {"hier_hh", c.baselines.hier_hh},
                    {"hhh_epsilon", c.baselines.hhh_epsilon},
                    {"hhh_delta", c.baselines.hhh_delta}};
  j["theta"] = c.theta;
  j["psi"] = c.psi;
  j["prefix_lengths"] = c.prefix_lengths;
  j["checkpoints"] = c.checkpoints;
  j["threads"] = c.threads;
  j["verify_oblivious"] = c.verify_oblivious;
  j["output"] = {{"report", c.report_path}, {"csv", c.csv_path}};
  return j;
}

ojson metrics_json(const TaskMetrics& m) {
  ojson j = ojson::object();
  auto put = [&j](const char* k, const std::optional<double>& v) {
    if (v) j[k] = *v;
  };
  put("rmse", m.rmse);
  put("precision", m.precision);
  put("recall", m.recall);
  put("f1", m.f1);
  put("wmrd", m.wmrd);
  put("estimate", m.estimate);
  put("truth", m.truth);
  put("rel_error", m.rel_error);
  return j;
}

ojson flow_list(const std::vector<std::uint64_t>& flows) {
  ojson a = ojson::array();
  for (auto f : flows) a.push_back(format_flow_id(f));
  return a;
}

ojson flow_map(const std::map<std::uint64_t, double>& m) {
  ojson o = ojson::object();
  for (const auto& [fid, v] : m) o[format_flow_id(fid)] = v;
  return o;
}

ojson prefix_list(const std::vector<Prefix>& prefixes) {
  ojson a = ojson::array();
  for (const auto& p : prefixes) a.push_back(format_ipv4(p.value) + "/" + std::to_string(p.length));
  return a;
}

ojson address_list(const std::vector<std::uint32_t>& addrs) {
  ojson a = ojson::array();
  for (auto x : addrs) a.push_back(format_ipv4(x));
  return a;
}

ojson summary_json(const SampleSummary& s) {
  return {{"m_tilde", s.m_tilde}, {"v_hat", s.v_hat}, {"p_hat", opt(s.p_hat)}};
}

ExperimentConfig config_from(const ojson& j) {
  check_keys(j, "config", {"trace", "routing", "sketch", "tasks", "baselines", "theta", "psi",
                           "prefix_lengths", "checkpoints", "threads", "verify_oblivious", "output"});
  ExperimentConfig c;
  auto tr = j.find("trace");
  if (tr == j.end()) throw_invalid("config needs a 'trace' section");
  check_keys(*tr, "trace", {"generate", "path"});
  with(*tr, "path", [&](const ojson& v) { c.trace_path = as_string(v, "trace.path"); });
  with(*tr, "generate", [&](const ojson& g) {
    check_keys(g, "trace.generate", {"packets", "skew", "flows", "seed", "superspreaders",
                                     "superspreader_fanout", "address_ids"});
    TraceParams p;
    with(g, "packets", [&](const ojson& v) { p.packets = as_u64(v, "packets"); });
    with(g, "skew", [&](const ojson& v) { p.skew = as_double(v, "skew"); });
    with(g, "flows", [&](const ojson& v) { p.flows = as_u64(v, "flows"); });
    with(g, "seed", [&](const ojson& v) { p.seed = as_u64(v, "seed"); });
    with(g, "superspreaders", [&](const ojson& v) { p.superspreaders = as_u64(v, "superspreaders"); });
    with(g, "superspreader_fanout",
         [&](const ojson& v) { p.superspreader_fanout = as_u64(v, "superspreader_fanout"); });
    with(g, "address_ids", [&](const ojson& v) { p.address_ids = as_bool(v, "address_ids"); });
    c.generate = p;
  });

  with(j, "routing", [&](const ojson& r) {
    check_keys(r, "routing", {"kind", "switches", "subset_probability", "hop_nodes", "hop_k_max", "seed"});
    with(r, "kind", [&](const ojson& v) { c.routing.kind = parse_routing_kind(as_string(v, "routing.kind")); });
    with(r, "switches", [&](const ojson& v) { c.routing.switches = as_u64(v, "routing.switches"); });
    with(r, "subset_probability",
         [&](const ojson& v) { c.routing.subset_probability = as_double(v, "routing.subset_probability"); });
    with(r, "hop_nodes", [&](const ojson& v) { c.routing.hop_nodes = as_double(v, "routing.hop_nodes"); });
    with(r, "hop_k_max", [&](const ojson& v) { c.routing.hop_k_max = as_u64(v, "routing.hop_k_max"); });
    with(r, "seed", [&](const ojson& v) { c.routing_seed = as_u64(v, "routing.seed"); });
  });
  with(j, "sketch", [&](const ojson& s) {
    check_keys(s, "sketch", {"slot_bits", "epsilon", "delta", "alpha", "hash_seed"});
    with(s, "slot_bits", [&](const ojson& v) {
      const auto bits = as_u64(v, "sketch.slot_bits");
      if (bits > 64) throw_invalid("sketch.slot_bits out of range");
      c.slot_bits = static_cast<unsigned>(bits);
    });
    with(s, "epsilon", [&](const ojson& v) { c.epsilon = as_double(v, "sketch.epsilon"); });
    with(s, "delta", [&](const ojson& v) { c.delta = as_double(v, "sketch.delta"); });
    with(s, "alpha", [&](const ojson& v) { c.alpha = as_double(v, "sketch.alpha"); });
    with(s, "hash_seed", [&](const ojson& v) { c.hash_seed = as_u64(v, "sketch.hash_seed"); });
  });
  with(j, "tasks", [&](const ojson& t) {
    check_keys(t, "tasks", {"frequency", "heavy_hitters", "hierarchical", "superspreaders",
                            "flow_size_distribution"});
    with(t, "frequency", [&](const ojson& v) { c.tasks.frequency = as_bool(v, "tasks.frequency"); });
    with(t, "heavy_hitters", [&](const ojson& v) { c.tasks.heavy_hitters = as_bool(v, "tasks.heavy_hitters"); });
    with(t, "hierarchical", [&](const ojson& v) { c.tasks.hierarchical = as_bool(v, "tasks.hierarchical"); });
    with(t, "superspreaders",
         [&](const ojson& v) { c.tasks.superspreaders = as_bool(v, "tasks.superspreaders"); });
    with(t, "flow_size_distribution", [&](const ojson& v) {
      c.tasks.flow_size_distribution = as_bool(v, "tasks.flow_size_distribution");
    });
  });
  with(j, "baselines", [&](const ojson& b) {
    check_keys(b, "baselines", {"enabled", "seed", "volume_register_bits", "cmd_epsilon", "cmd_delta",
                                "hier_hh", "hhh_epsilon", "hhh_delta"});
    auto& o = c.baselines;
    with(b, "enabled", [&](const ojson& v) { o.enabled = as_bool(v, "baselines.enabled"); });
    with(b, "seed", [&](const ojson& v) { o.seed = as_u64(v, "baselines.seed"); });
    with(b, "volume_register_bits", [&](const ojson& v) {
      const auto bits = as_u64(v, "baselines.volume_register_bits");
      if (bits > 64) throw_invalid("baselines.volume_register_bits out of range");
      o.volume_register_bits = static_cast<unsigned>(bits);
    });
    with(b, "cmd_epsilon", [&](const ojson& v) { o.cmd_epsilon = as_double(v, "baselines.cmd_epsilon"); });
    with(b, "cmd_delta", [&](const ojson& v) { o.cmd_delta = as_double(v, "baselines.cmd_delta"); });
    with(b, "hier_hh", [&](const ojson& v) { o.hier_hh = as_bool(v, "baselines.hier_hh"); });
    with(b, "hhh_epsilon", [&](const ojson& v) { o.hhh_epsilon = as_double(v, "baselines.hhh_epsilon"); });
    with(b, "hhh_delta", [&](const ojson& v) { o.hhh_delta = as_double(v, "baselines.hhh_delta"); });
  });
  with(j, "theta", [&](const ojson& v) { c.theta = as_double(v, "theta"); });
  with(j, "psi", [&](const ojson& v) { c.psi = as_double(v, "psi"); });
  with(j, "prefix_lengths", [&](const ojson& v) {
    if (!v.is_array()) throw_invalid("prefix_lengths must be an array");
    c.prefix_lengths.clear();
    for (const auto& e : v) {
      const auto len = as_u64(e, "prefix_lengths[]");
      if (len > 64) throw_invalid("prefix length out of range");
      c.prefix_lengths.push_back(static_cast<unsigned>(len));
    }
  });
  with(j, "checkpoints", [&](const ojson& v) { c.checkpoints = as_bool(v, "checkpoints"); });
  with(j, "threads", [&](const ojson& v) {
    const auto t = as_u64(v, "threads");
    if (t > 4096) throw_invalid("threads out of range");
    c.threads = static_cast<unsigned>(t);
  });
  with(j, "verify_oblivious", [&](const ojson& v) { c.verify_oblivious = as_bool(v, "verify_oblivious"); });
  with(j, "output", [&](const ojson& o) {
    check_keys(o, "output", {"report", "csv"});
    with(o, "report", [&](const ojson& v) { c.report_path = as_string(v, "output.report"); });
    with(o, "csv", [&](const ojson& v) { c.csv_path = as_string(v, "output.csv"); });
  });
  return c;
}

}  // namespace

std::string format_flow_id(std::uint64_t fid) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(fid));
  return buf;
}

std::string format_ipv4(std::uint32_t a) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%u.%u.%u.%u", a >> 24, (a >> 16) & 0xff, (a >> 8) & 0xff, a & 0xff);
  return buf;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

ExperimentConfig parse_config(const std::string& json_text) {
  ojson j;
  try {
    j = ojson::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw_format(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from(j);
}

ExperimentConfig load_config(const std::string& path) { return parse_config(read_text_file(path)); }

std::string config_to_json(const ExperimentConfig& config) { return config_json(config).dump(2) + "\n"; }

std::string report_to_json(const ExperimentReport& r) {
  ojson j;
  j["version"] = r.version;
  j["config"] = config_json(r.config);
  j["trace"] = {{"packets", r.trace_packets},
                {"distinct_flows", r.distinct_flows},
                {"universe_bits", r.universe_bits}};
  j["routing"] = {{"switches", r.switches},
                  {"observations", r.observations},
                  {"mean_duplication",
                   r.trace_packets ? static_cast<double>(r.observations) / static_cast<double>(r.trace_packets)
                                   : 0.0}};
  j["slot_bits"] = r.slot_bits;
  j["oblivious_verified"] = r.oblivious_verified;
  j["packet_sample"] = summary_json(r.packet_sample);
  j["flow_sample"] = summary_json(r.flow_sample);

  ojson est;
  est["frequency"] = flow_map(r.frequency);
  est["heavy_hitters"] = flow_list(r.heavy_hitters);
  est["hierarchical"] = prefix_list(r.hierarchical);
  est["superspreaders"] = address_list(r.superspreaders);
  ojson fsd = ojson::object();
  for (const auto& [size, count] : r.flow_sizes) fsd[std::to_string(size)] = count;
  est["flow_size_distribution"] = fsd;
  j["estimates"] = est;

  ojson conv = ojson::array();
  for (const auto& p : r.convergence) {
    conv.push_back({{"packets", p.packets}, {"packet_slots", p.packet_slots}, {"flow_slots", p.flow_slots}});
  }
  j["convergence"] = conv;

  if (r.baseline) {
    const auto& b = *r.baseline;
    ojson bj;
    bj["volume_estimate"] = b.volume_estimate;
    bj["cmd_frequency"] = flow_map(b.cmd_frequency);
    bj["cmd_heavy_hitters"] = flow_list(b.cmd_heavy_hitters);
    if (b.hier_ran) {
      bj["hier_heavy_hitters"] = flow_list(b.hier_heavy_hitters);
      bj["hier_threshold"] = b.hier_threshold;
      bj["hier_threshold_clamped"] = b.hier_threshold_clamped;
    }
    j["baselines"] = bj;
  } else {
    j["baselines"] = nullptr;
  }

  ojson m = ojson::object();
  for (const auto& [task, metrics] : r.metrics) m[task] = metrics_json(metrics);
  j["metrics"] = m;
  return j.dump(2) + "\n";
}

std::string report_to_csv(const ExperimentReport& r) {
  std::ostringstream out;
  out << "task,x,metric,value\n";
  auto row = [&out](const std::string& task, const std::string& x, const std::string& metric, double v) {
    out << task << ',' << x << ',' << metric << ',' << format_number(v) << '\n';
  };
  for (const auto& p : r.convergence) {
    const auto x = std::to_string(p.packets);
    row("convergence", x, "packet_slots", static_cast<double>(p.packet_slots));
    row("convergence", x, "flow_slots", static_cast<double>(p.flow_slots));
  }
  for (const auto& [size, count] : r.flow_sizes) row("flow_size_estimate", std::to_string(size), "flows", count);
  const auto slot_x = std::to_string(r.slot_bits);
  for (const auto& [task, m] : r.metrics) {
    auto put = [&](const char* name, const std::optional<double>& v) {
      if (v) row(task, slot_x, name, *v);
    };
    put("rmse", m.rmse);
    put("precision", m.precision);
    put("recall", m.recall);
    put("f1", m.f1);
    put("wmrd", m.wmrd);
    put("estimate", m.estimate);
    put("truth", m.truth);
    put("rel_error", m.rel_error);
  }
  return out.str();
}

std::string ground_truth_to_json(const GroundTruth& t, bool include_flow_sizes) {
  ojson j;
  j["total_packets"] = t.total_packets;
  j["distinct_flows"] = t.distinct_flows;
  j["theta"] = t.theta;
  j["psi"] = t.psi;
  j["prefix_lengths"] = t.prefix_lengths;
  j["heavy_hitters"] = flow_list(t.heavy_hitters);
  j["hierarchical"] = prefix_list(t.hierarchical);
  j["superspreaders"] = address_list(t.superspreaders);
  ojson hist = ojson::object();
  for (const auto& [size, count] : t.size_histogram) hist[std::to_string(size)] = count;
  j["size_histogram"] = hist;
  if (include_flow_sizes) {
    std::map<std::uint64_t, std::uint64_t> sorted(t.flow_sizes.begin(), t.flow_sizes.end());
    ojson fs = ojson::object();
    for (const auto& [fid, size] : sorted) fs[format_flow_id(fid)] = size;
    j["flow_sizes"] = fs;
  }
  return j.dump(2) + "\n";
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_io("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw_io("error while reading '" + path + "'");
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw_io("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw_io("error while writing '" + path + "'");
}

}  // namespace netsample
