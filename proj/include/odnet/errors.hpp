#pragma once

#include <stdexcept>
#include <string>

namespace odnet {

enum class Errc {
  parse_error,          // malformed input file
  geometry_error,       // invalid polygon or zone geometry
  domain_error,         // violated precondition on values
  out_of_band,          // latitude outside the UTM validity band
  bad_zone_override,    // forced zone too far from the natural one
  numerical_divergence, // inverse projection failed to converge
  conflict,             // contradictory aggregation mapping
  unknown_node,         // node id not present in the network
  empty_network,        // operation needs at least one node/edge
  insufficient_data,    // too few points to fit
  degenerate_x,         // regression abscissae all coincide
};

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

} // namespace odnet
