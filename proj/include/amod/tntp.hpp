#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace amod::tntp {

struct Link {
  int init_node = 0;  // 1-based
  int term_node = 0;
  double capacity = 0.0;
  double length = 0.0;
  double free_flow_time = 0.0;
  double b = 0.15;
  double power = 4.0;
  double speed = 0.0;
  double toll = 0.0;
  int link_type = 0;

  bool operator==(const Link&) const = default;
};

struct Network {
  int node_count = 0;
  int zone_count = 0;  // 0 if the header omits it
  int first_thru_node = 1;
  std::vector<Link> links;
  // Tags other than the ones interpreted above, verbatim.
  std::map<std::string, std::string> extra_metadata;

  bool operator==(const Network&) const = default;
};

// Dense zone x zone matrix, 0-based, diagonal always zero.
struct Trips {
  int zone_count = 0;
  double declared_total = 0.0;  // <TOTAL OD FLOW> header
  double dropped_diagonal = 0.0;
  std::vector<double> flow;  // row-major

  double at(int origin, int dest) const {
    return flow[static_cast<std::size_t>(origin) * zone_count + dest];
  }
  double total() const;
};

// Errors are amod::ParseError with the offending line number.
Network parse_net(std::string_view text);
Trips parse_trips(std::string_view text);

std::string serialize_net(const Network& net);

Network read_net_file(const std::string& path);
Trips read_trips_file(const std::string& path);

}  // namespace amod::tntp
