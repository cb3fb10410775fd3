#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <vector>

#include "odnet/errors.hpp"
#include "odnet/geodesy.hpp"

namespace odnet {

// One raw trip, endpoints in geographic degrees. Pre-aggregated survey rows
// carry their expansion weight in multiplicity.
struct TripRecord {
  GeoCoordinate origin;
  GeoCoordinate destination;
  std::uint64_t multiplicity = 1;
};

// A trip whose endpoints already resolved to zones.
struct ZonedTrip {
  std::string origin;
  std::string destination;
  std::uint64_t multiplicity = 1;
};

struct DegreeProfile {
  std::uint64_t k_in = 0;       // distinct predecessors
  std::uint64_t k_out = 0;      // distinct successors
  std::uint64_t strength_in = 0;
  std::uint64_t strength_out = 0;
};

// Weighted directed graph over zone ids. Immutable once built; nodes are
// stored sorted by id so ordinal order equals lexicographic order.
class Network {
public:
  std::size_t node_count() const { return ids_.size(); }
  std::uint64_t edge_count() const { return edge_count_; }           // L, self-loops included
  std::uint64_t nonloop_edge_count() const { return nonloop_edge_count_; }
  std::uint64_t total_weight() const { return total_weight_; }       // T
  std::uint64_t discarded_self_loops() const { return discarded_self_loops_; }

  const std::vector<std::string>& ids() const { return ids_; }

  const DegreeProfile& profile(std::size_t ordinal) const { return profiles_[ordinal]; }

  const DegreeProfile& profile(std::string_view id) const {
    const auto ord = ordinal_of(id);
    if (!ord) fail(Errc::unknown_node, "node '" + std::string(id) + "' not in network");
    return profiles_[*ord];
  }

  std::optional<std::size_t> ordinal_of(std::string_view id) const {
    const auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
    if (it == ids_.end() || *it != id) return std::nullopt;
    return static_cast<std::size_t>(it - ids_.begin());
  }

  // Visits edges as (src ordinal, dst ordinal, weight), sorted by (src, dst).
  template <typename Fn>
  void for_each_edge(Fn&& fn) const {
    for (std::size_t src = 0; src < adjacency_.size(); ++src)
      for (const auto& [dst, w] : adjacency_[src]) fn(src, static_cast<std::size_t>(dst), w);
  }

  // Edge list contract: "origin<TAB>dest<TAB>weight" rows in lexicographic
  // (origin, dest) order; nodes are implied.
  void write_edge_list(std::ostream& out) const {
    for_each_edge([&](std::size_t src, std::size_t dst, std::uint64_t w) {
      out << ids_[src] << '\t' << ids_[dst] << '\t' << w << '\n';
    });
  }

private:
  friend class NetworkBuilder;

  std::vector<std::string> ids_;  // sorted
  std::vector<std::vector<std::pair<std::uint32_t, std::uint64_t>>> adjacency_;
  std::vector<DegreeProfile> profiles_;
  std::uint64_t edge_count_ = 0;
  std::uint64_t nonloop_edge_count_ = 0;
  std::uint64_t total_weight_ = 0;
  std::uint64_t discarded_self_loops_ = 0;
};

class NetworkBuilder {
public:
  explicit NetworkBuilder(bool include_self_loops = true)
      : include_self_loops_(include_self_loops) {}

  void add(std::string_view origin, std::string_view destination, std::uint64_t multiplicity = 1) {
    if (multiplicity == 0) fail(Errc::domain_error, "trip multiplicity must be >= 1");
    const std::uint32_t src = intern(origin);
    const std::uint32_t dst = intern(destination);
    if (src == dst && !include_self_loops_) {
      discarded_self_loops_ += multiplicity;
      return;
    }
    counts_[(std::uint64_t(src) << 32) | dst] += multiplicity;
  }

  void add(const ZonedTrip& trip) { add(trip.origin, trip.destination, trip.multiplicity); }

  // Nodes with no trips still enter the network when added here.
  void add_node(std::string_view id) { intern(id); }

  void merge(const NetworkBuilder& other) {
    std::vector<std::uint32_t> remap(other.names_.size());
    for (std::size_t i = 0; i < other.names_.size(); ++i) remap[i] = intern(other.names_[i]);
    for (const auto& [key, w] : other.counts_) {
      const std::uint32_t src = remap[key >> 32];
      const std::uint32_t dst = remap[key & 0xffffffffu];
      counts_[(std::uint64_t(src) << 32) | dst] += w;
    }
    discarded_self_loops_ += other.discarded_self_loops_;
  }

  Network finish() {
    Network net;
    net.ids_ = names_;
    std::sort(net.ids_.begin(), net.ids_.end());
    std::vector<std::uint32_t> remap(names_.size());
    for (std::size_t i = 0; i < names_.size(); ++i) {
      const auto it = std::lower_bound(net.ids_.begin(), net.ids_.end(), names_[i]);
      remap[i] = static_cast<std::uint32_t>(it - net.ids_.begin());
    }

    net.adjacency_.resize(net.ids_.size());
    net.profiles_.resize(net.ids_.size());
    for (const auto& [key, w] : counts_) {
      const std::uint32_t src = remap[key >> 32];
      const std::uint32_t dst = remap[key & 0xffffffffu];
      net.adjacency_[src].emplace_back(dst, w);
    }
    for (std::size_t src = 0; src < net.adjacency_.size(); ++src) {
      auto& row = net.adjacency_[src];
      std::sort(row.begin(), row.end());
      for (const auto& [dst, w] : row) {
        ++net.edge_count_;
        if (dst != src) ++net.nonloop_edge_count_;
        net.total_weight_ += w;
        auto& sp = net.profiles_[src];
        auto& dp = net.profiles_[dst];
        ++sp.k_out;
        sp.strength_out += w;
        ++dp.k_in;
        dp.strength_in += w;
      }
    }
    net.discarded_self_loops_ = discarded_self_loops_;
    return net;
  }

private:
  std::uint32_t intern(std::string_view id) {
    const auto it = index_.find(id);
    if (it != index_.end()) return it->second;
    const auto ord = static_cast<std::uint32_t>(names_.size());
    names_.emplace_back(id);
    index_.emplace(names_.back(), ord);
    return ord;
  }

  struct SvHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };
  struct SvEq {
    using is_transparent = void;
    bool operator()(std::string_view a, std::string_view b) const { return a == b; }
  };

  bool include_self_loops_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t, SvHash, SvEq> index_;
  std::unordered_map<std::uint64_t, std::uint64_t> counts_;
  std::uint64_t discarded_self_loops_ = 0;
};

inline Network build_network(std::span<const ZonedTrip> trips, bool include_self_loops = true,
                             std::span<const std::string> extra_nodes = {}) {
  NetworkBuilder builder(include_self_loops);
  for (const auto& id : extra_nodes) builder.add_node(id);
  for (const auto& trip : trips) builder.add(trip);
  return builder.finish();
}

// Sharded construction; per-shard count maps merged by integer summation,
// so the result is bit-identical to the serial build.
inline Network build_network_parallel(std::span<const ZonedTrip> trips, unsigned threads,
                                      bool include_self_loops = true,
                                      std::span<const std::string> extra_nodes = {}) {
  if (threads <= 1 || trips.size() < 1024) return build_network(trips, include_self_loops, extra_nodes);
  std::vector<NetworkBuilder> shards;
  shards.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) shards.emplace_back(include_self_loops);
  const std::size_t block = (trips.size() + threads - 1) / threads;
  std::vector<std::thread> workers;
  for (unsigned t = 0; t < threads; ++t) {
    workers.emplace_back([&, t] {
      const std::size_t lo = t * block;
      const std::size_t hi = std::min(trips.size(), lo + block);
      for (std::size_t i = lo; i < hi; ++i) shards[t].add(trips[i]);
    });
  }
  for (auto& w : workers) w.join();
  NetworkBuilder merged(include_self_loops);
  for (const auto& id : extra_nodes) merged.add_node(id);
  for (const auto& shard : shards) merged.merge(shard);
  return merged.finish();
}

inline void write_edge_list(const Network& net, std::ostream& out) { net.write_edge_list(out); }

inline Network read_edge_list(std::istream& in, const std::string& name) {
  NetworkBuilder builder(true);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos)
      fail(Errc::parse_error,
           name + ":" + std::to_string(lineno) + ": expected origin<TAB>dest<TAB>weight");
    std::uint64_t weight = 0;
    try {
      std::size_t used = 0;
      weight = std::stoull(line.substr(t2 + 1), &used);
      if (used != line.size() - t2 - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      fail(Errc::parse_error, name + ":" + std::to_string(lineno) + ": bad weight");
    }
    if (weight == 0)
      fail(Errc::parse_error, name + ":" + std::to_string(lineno) + ": zero-weight edge");
    builder.add(line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1), weight);
  }
  return builder.finish();
}

} // namespace odnet
