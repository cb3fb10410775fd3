#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "odnet/errors.hpp"
#include "odnet/polygon.hpp"

namespace odnet {

// A zone is one census sector (or aggregated area): an id plus one or more
// polygon parts (MultiPolygon inputs are flattened into parts).
struct Zone {
  std::string id;
  std::vector<PolygonGeom> parts;
  BoundingBox bbox;

  void compute_bbox() {
    bbox = BoundingBox{};
    for (auto& part : parts) {
      part.compute_bbox();
      bbox.expand(part.bbox);
    }
  }

  PointLocation locate(double x, double y) const {
    if (!bbox.contains(x, y)) return PointLocation::outside;
    for (const auto& part : parts) {
      const PointLocation loc = part.locate(x, y);
      if (loc != PointLocation::outside) return loc;
    }
    return PointLocation::outside;
  }

  bool contains(const GeoCoordinate& p) const {
    return locate(p.longitude, p.latitude) != PointLocation::outside;
  }
};

class ZoneSet {
public:
  ZoneSet() = default;

  explicit ZoneSet(std::vector<Zone> zones) : zones_(std::move(zones)) {
    std::sort(zones_.begin(), zones_.end(),
              [](const Zone& a, const Zone& b) { return a.id < b.id; });
    for (std::size_t i = 0; i + 1 < zones_.size(); ++i)
      if (zones_[i].id == zones_[i + 1].id)
        fail(Errc::geometry_error, "duplicate zone id '" + zones_[i].id + "'");
    for (auto& z : zones_) {
      z.compute_bbox();
      bbox_.expand(z.bbox);
    }
  }

  std::size_t size() const { return zones_.size(); }
  bool empty() const { return zones_.empty(); }
  const Zone& operator[](std::size_t i) const { return zones_[i]; }
  const std::vector<Zone>& zones() const { return zones_; }
  const BoundingBox& bbox() const { return bbox_; }

  const Zone* find(std::string_view id) const {
    auto it = std::lower_bound(zones_.begin(), zones_.end(), id,
                               [](const Zone& z, std::string_view v) { return z.id < v; });
    return it != zones_.end() && it->id == id ? &*it : nullptr;
  }

private:
  std::vector<Zone> zones_;  // sorted by id; index order == lexicographic order
  BoundingBox bbox_;
};

namespace detail {

inline Ring parse_ring(const nlohmann::json& coords, const std::string& context) {
  if (!coords.is_array()) fail(Errc::parse_error, context + ": ring is not an array");
  Ring ring;
  ring.reserve(coords.size());
  for (const auto& v : coords) {
    if (!v.is_array() || v.size() < 2 || !v[0].is_number() || !v[1].is_number())
      fail(Errc::parse_error, context + ": vertex is not a [lon, lat] pair");
    ring.push_back({v[1].get<double>(), v[0].get<double>()});
  }
  geom::validate_ring(ring, context);
  return ring;
}

inline PolygonGeom parse_polygon(const nlohmann::json& coords, const std::string& context) {
  if (!coords.is_array() || coords.empty())
    fail(Errc::parse_error, context + ": polygon has no rings");
  PolygonGeom poly;
  poly.exterior = parse_ring(coords[0], context);
  geom::validate_simple(poly.exterior, context);
  for (std::size_t i = 1; i < coords.size(); ++i)
    poly.holes.push_back(parse_ring(coords[i], context + " hole " + std::to_string(i)));
  return poly;
}

}  // namespace detail

// Zone file contract: GeoJSON FeatureCollection, each feature carrying a
// string property "id" and Polygon or MultiPolygon geometry in geographic
// degrees. Invalid geometry is reported with the offending feature named.
inline ZoneSet load_zones_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
      !doc.contains("features") || !doc["features"].is_array())
    fail(Errc::parse_error, "zone file is not a GeoJSON FeatureCollection");

  std::vector<Zone> zones;
  std::size_t n = 0;
  for (const auto& feature : doc["features"]) {
    ++n;
    const std::string fallback = "feature #" + std::to_string(n);
    if (!feature.is_object() || !feature.contains("geometry"))
      fail(Errc::parse_error, fallback + ": missing geometry");
    const auto& props = feature.value("properties", nlohmann::json::object());
    if (!props.contains("id"))
      fail(Errc::parse_error, fallback + ": missing property \"id\"");
    std::string id;
    if (props["id"].is_string())
      id = props["id"].get<std::string>();
    else if (props["id"].is_number_integer())
      id = std::to_string(props["id"].get<long long>());
    else
      fail(Errc::parse_error, fallback + ": property \"id\" must be a string");
    const std::string context = "feature '" + id + "'";

    const auto& geometry = feature["geometry"];
    const std::string type = geometry.value("type", "");
    if (!geometry.contains("coordinates"))
      fail(Errc::parse_error, context + ": geometry has no coordinates");
    Zone zone;
    zone.id = id;
    if (type == "Polygon") {
      zone.parts.push_back(detail::parse_polygon(geometry["coordinates"], context));
    } else if (type == "MultiPolygon") {
      for (const auto& poly : geometry["coordinates"])
        zone.parts.push_back(detail::parse_polygon(poly, context));
      if (zone.parts.empty())
        fail(Errc::parse_error, context + ": MultiPolygon has no polygons");
    } else {
      fail(Errc::parse_error, context + ": unsupported geometry type '" + type + "'");
    }
    zones.push_back(std::move(zone));
  }
  return ZoneSet(std::move(zones));
}

inline ZoneSet load_zones(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::parse_error, "cannot open zone file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::parse_error, "zone file '" + path + "': " + e.what());
  }
  return load_zones_from_json(doc);
}

enum class IndexKind { bbox_tree, grid };

// Immutable spatial index over a ZoneSet. Candidate queries return a superset
// of the containing zones, always in ascending zone order so the caller's
// first containment hit is the lexicographically smallest id.
class ZoneIndex {
public:
  explicit ZoneIndex(const ZoneSet& zones, IndexKind kind = IndexKind::bbox_tree)
      : zones_(&zones), kind_(kind) {
    if (kind_ == IndexKind::bbox_tree)
      build_tree();
    else
      build_grid();
  }

  const ZoneSet& zones() const { return *zones_; }
  IndexKind kind() const { return kind_; }

  // Zone ordinals whose bounding box contains the point, ascending.
  void candidates(double x, double y, std::vector<std::uint32_t>& out) const {
    out.clear();
    if (kind_ == IndexKind::bbox_tree)
      tree_candidates(x, y, out);
    else
      grid_candidates(x, y, out);
    std::sort(out.begin(), out.end());
  }

  // Smallest zone ordinal containing the point, if any. The overload with a
  // caller-owned scratch buffer avoids per-call allocation in hot loops and
  // keeps concurrent queries race-free.
  std::optional<std::uint32_t> locate(const GeoCoordinate& p,
                                      std::vector<std::uint32_t>& scratch) const {
    scratch.clear();
    if (kind_ == IndexKind::bbox_tree)
      tree_candidates(p.longitude, p.latitude, scratch);
    else
      grid_candidates(p.longitude, p.latitude, scratch);
    std::sort(scratch.begin(), scratch.end());
    for (const std::uint32_t ord : scratch)
      if ((*zones_)[ord].contains(p)) return ord;
    return std::nullopt;
  }

  std::optional<std::uint32_t> locate(const GeoCoordinate& p) const {
    std::vector<std::uint32_t> scratch;
    return locate(p, scratch);
  }

private:
  struct Node {
    BoundingBox box;
    std::uint32_t first = 0;   // child node index, or first entry if leaf
    std::uint32_t count = 0;   // entry count if leaf, else child count
    bool leaf = false;
  };

  static constexpr std::uint32_t fanout = 8;

  // STR bulk load: sort by center x, slice, sort slices by center y, pack.
  void build_tree() {
    const std::size_t n = zones_->size();
    entries_.resize(n);
    for (std::size_t i = 0; i < n; ++i) entries_[i] = static_cast<std::uint32_t>(i);
    if (n == 0) return;

    const auto cx = [&](std::uint32_t i) {
      const auto& b = (*zones_)[i].bbox;
      return b.min_x + b.max_x;
    };
    const auto cy = [&](std::uint32_t i) {
      const auto& b = (*zones_)[i].bbox;
      return b.min_y + b.max_y;
    };
    std::sort(entries_.begin(), entries_.end(), [&](std::uint32_t a, std::uint32_t b) {
      return cx(a) < cx(b) || (cx(a) == cx(b) && a < b);
    });
    const std::size_t leaves = (n + fanout - 1) / fanout;
    const std::size_t slices = static_cast<std::size_t>(std::ceil(std::sqrt(double(leaves))));
    const std::size_t per_slice = (n + slices - 1) / slices;
    for (std::size_t s = 0; s * per_slice < n; ++s) {
      const auto lo = entries_.begin() + s * per_slice;
      const auto hi = entries_.begin() + std::min(n, (s + 1) * per_slice);
      std::sort(lo, hi, [&](std::uint32_t a, std::uint32_t b) {
        return cy(a) < cy(b) || (cy(a) == cy(b) && a < b);
      });
    }

    // Pack leaves, then build parent levels until one root remains.
    std::vector<std::uint32_t> level;
    for (std::size_t i = 0; i < n; i += fanout) {
      Node node;
      node.leaf = true;
      node.first = static_cast<std::uint32_t>(i);
      node.count = static_cast<std::uint32_t>(std::min<std::size_t>(fanout, n - i));
      for (std::uint32_t k = 0; k < node.count; ++k)
        node.box.expand((*zones_)[entries_[i + k]].bbox);
      level.push_back(static_cast<std::uint32_t>(nodes_.size()));
      nodes_.push_back(node);
    }
    while (level.size() > 1) {
      std::vector<std::uint32_t> next;
      for (std::size_t i = 0; i < level.size(); i += fanout) {
        Node node;
        node.leaf = false;
        node.first = level[i];
        node.count = static_cast<std::uint32_t>(std::min<std::size_t>(fanout, level.size() - i));
        for (std::uint32_t k = 0; k < node.count; ++k)
          node.box.expand(nodes_[level[i + k]].box);
        next.push_back(static_cast<std::uint32_t>(nodes_.size()));
        nodes_.push_back(node);
      }
      // Parent levels reference contiguous child runs.
      level = std::move(next);
    }
    root_ = level.empty() ? 0 : level.front();
  }

  void tree_candidates(double x, double y, std::vector<std::uint32_t>& out) const {
    if (nodes_.empty()) return;
    // Stack bound: (height - 1) * (fanout - 1) + 1; 64 covers ~1e9 zones.
    std::uint32_t stack[64];
    int top = 0;
    stack[top++] = root_;
    while (top > 0) {
      const Node& node = nodes_[stack[--top]];
      if (!node.box.contains(x, y)) continue;
      if (node.leaf) {
        for (std::uint32_t k = 0; k < node.count; ++k) {
          const std::uint32_t ord = entries_[node.first + k];
          if ((*zones_)[ord].bbox.contains(x, y)) out.push_back(ord);
        }
      } else {
        for (std::uint32_t k = 0; k < node.count; ++k) stack[top++] = node.first + k;
      }
    }
  }

  void build_grid() {
    const std::size_t n = zones_->size();
    if (n == 0) return;
    grid_box_ = zones_->bbox();
    grid_dim_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(double(n)) * 2));
    cells_.assign(grid_dim_ * grid_dim_, {});
    for (std::size_t i = 0; i < n; ++i) {
      const auto& b = (*zones_)[i].bbox;
      const auto [x0, y0] = cell_of(b.min_x, b.min_y);
      const auto [x1, y1] = cell_of(b.max_x, b.max_y);
      for (std::size_t gy = y0; gy <= y1; ++gy)
        for (std::size_t gx = x0; gx <= x1; ++gx)
          cells_[gy * grid_dim_ + gx].push_back(static_cast<std::uint32_t>(i));
    }
  }

  std::pair<std::size_t, std::size_t> cell_of(double x, double y) const {
    const double w = grid_box_.max_x - grid_box_.min_x;
    const double h = grid_box_.max_y - grid_box_.min_y;
    const auto clamp = [&](double t) {
      if (t < 0) return std::size_t(0);
      const auto i = static_cast<std::size_t>(t);
      return i >= grid_dim_ ? grid_dim_ - 1 : i;
    };
    const std::size_t gx = clamp(w > 0 ? (x - grid_box_.min_x) / w * double(grid_dim_) : 0.0);
    const std::size_t gy = clamp(h > 0 ? (y - grid_box_.min_y) / h * double(grid_dim_) : 0.0);
    return {gx, gy};
  }

  void grid_candidates(double x, double y, std::vector<std::uint32_t>& out) const {
    if (cells_.empty() || !grid_box_.contains(x, y)) return;
    const auto [gx, gy] = cell_of(x, y);
    for (const std::uint32_t ord : cells_[gy * grid_dim_ + gx])
      if ((*zones_)[ord].bbox.contains(x, y)) out.push_back(ord);
  }

  const ZoneSet* zones_;
  IndexKind kind_;
  // bbox tree
  std::vector<std::uint32_t> entries_;
  std::vector<Node> nodes_;
  std::uint32_t root_ = 0;
  // grid
  BoundingBox grid_box_;
  std::size_t grid_dim_ = 0;
  std::vector<std::vector<std::uint32_t>> cells_;
};

// Even-odd containment with the deterministic tie-break: a point on a shared
// boundary belongs to the zone with the smallest id. Returns nullopt when no
// zone contains the point.
inline std::optional<std::string> assign(const GeoCoordinate& point, const ZoneIndex& index) {
  const auto ord = index.locate(point);
  if (!ord) return std::nullopt;
  return index.zones()[*ord].id;
}

// Brute-force reference: scan every zone, keep the smallest containing id.
inline std::optional<std::string> assign_linear_scan(const GeoCoordinate& point,
                                                     const ZoneSet& zones) {
  for (const auto& z : zones.zones())
    if (z.contains(point)) return z.id;  // zones are sorted by id
  return std::nullopt;
}

// Mapping CSV contract: header "zone_id,group_id", one row per source zone.
inline std::map<std::string, std::string> load_zone_mapping(std::istream& in,
                                                            const std::string& name) {
  std::map<std::string, std::string> mapping;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      fail(Errc::parse_error, name + ":" + std::to_string(lineno) + ": expected zone_id,group_id");
    std::string zone = line.substr(0, comma);
    std::string group = line.substr(comma + 1);
    if (lineno == 1 && zone == "zone_id" && group == "group_id") continue;
    const auto [it, inserted] = mapping.emplace(zone, group);
    if (!inserted && it->second != group)
      fail(Errc::conflict, name + ":" + std::to_string(lineno) + ": zone '" + zone +
                               "' claimed by groups '" + it->second + "' and '" + group + "'");
  }
  return mapping;
}

inline std::map<std::string, std::string> load_zone_mapping(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::parse_error, "cannot open mapping file '" + path + "'");
  return load_zone_mapping(in, path);
}

// Merges zones into groups. Unmapped ids pass through unchanged; the
// resulting zones carry the union of their members' polygon parts, so
// containment in any member implies containment in the group.
inline ZoneSet aggregate_zones(const ZoneSet& zones,
                               const std::map<std::string, std::string>& mapping) {
  std::map<std::string, Zone> groups;
  for (const auto& z : zones.zones()) {
    const auto it = mapping.find(z.id);
    const std::string& target = it == mapping.end() ? z.id : it->second;
    Zone& g = groups[target];
    g.id = target;
    g.parts.insert(g.parts.end(), z.parts.begin(), z.parts.end());
  }
  std::vector<Zone> out;
  out.reserve(groups.size());
  for (auto& [id, zone] : groups) out.push_back(std::move(zone));
  return ZoneSet(std::move(out));
}

} // namespace odnet
