#include "amod/tntp.hpp"

#include <charconv>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <system_error>

#include "amod/error.hpp"

namespace amod::tntp {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view tok, int line, std::string_view field) {
  T v{};
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (!tok.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw ParseError(line, "non-numeric " + std::string(field) + " '" +
                               std::string(tok) + "'");
  }
  return v;
}

// Splits the text into lines, keeping 1-based numbering.
class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  bool next(std::string_view& line) {
    if (pos_ > text_.size() || (pos_ == text_.size() && !text_.empty() &&
                                text_.back() == '\n')) {
      return false;
    }
    auto nl = text_.find('\n', pos_);
    if (nl == std::string_view::npos) nl = text_.size();
    line = text_.substr(pos_, nl - pos_);
    pos_ = nl + 1;
    ++number_;
    return true;
  }
  int number() const { return number_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int number_ = 0;
};

struct Metadata {
  std::map<std::string, std::string> tags;
  int end_line = 0;
};

// Consumes `<TAG> value` lines up to <END OF METADATA>.
Metadata read_metadata(LineReader& reader) {
  Metadata md;
  std::string_view raw;
  while (reader.next(raw)) {
    const auto line = trim(raw);
    if (line.empty() || line.front() == '~') continue;
    if (line.front() != '<') {
      throw ParseError(reader.number(),
                       "expected a metadata tag before <END OF METADATA>");
    }
    const auto close = line.find('>');
    if (close == std::string_view::npos) {
      throw ParseError(reader.number(), "unterminated metadata tag");
    }
    const std::string tag(trim(line.substr(1, close - 1)));
    if (tag == "END OF METADATA") {
      md.end_line = reader.number();
      return md;
    }
    md.tags[tag] = std::string(trim(line.substr(close + 1)));
  }
  throw ParseError(reader.number(), "missing <END OF METADATA>");
}

template <typename T>
T required_tag(const Metadata& md, const std::string& tag) {
  auto it = md.tags.find(tag);
  if (it == md.tags.end()) {
    throw ParseError(md.end_line, "missing metadata tag <" + tag + ">");
  }
  return parse_number<T>(trim(it->second), md.end_line, tag);
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

constexpr int kLinkFields = 10;

}  // namespace

double Trips::total() const {
  return std::accumulate(flow.begin(), flow.end(), 0.0);
}

Network parse_net(std::string_view text) {
  LineReader reader(text);
  Metadata md = read_metadata(reader);
  Network net;
  net.node_count = required_tag<int>(md, "NUMBER OF NODES");
  const int declared_links = required_tag<int>(md, "NUMBER OF LINKS");
  net.first_thru_node = md.tags.contains("FIRST THRU NODE")
                            ? required_tag<int>(md, "FIRST THRU NODE")
                            : 1;
  if (md.tags.contains("NUMBER OF ZONES")) {
    net.zone_count = required_tag<int>(md, "NUMBER OF ZONES");
  }
  for (auto& [tag, value] : md.tags) {
    if (tag != "NUMBER OF NODES" && tag != "NUMBER OF LINKS" &&
        tag != "FIRST THRU NODE" && tag != "NUMBER OF ZONES") {
      net.extra_metadata[tag] = value;
    }
  }
  if (net.node_count <= 0) {
    throw ParseError(md.end_line, "<NUMBER OF NODES> must be positive");
  }

  std::string_view raw;
  while (reader.next(raw)) {
    auto line = trim(raw);
    if (line.empty() || line.front() == '~') continue;
    const int ln = reader.number();
    const auto semi = line.find(';');
    if (semi == std::string_view::npos) {
      throw ParseError(ln, "link row not terminated by ';'");
    }
    if (!trim(line.substr(semi + 1)).empty()) {
      throw ParseError(ln, "unexpected text after ';'");
    }
    const auto fields = split_ws(line.substr(0, semi));
    if (fields.size() != kLinkFields) {
      throw ParseError(ln, "expected " + std::to_string(kLinkFields) +
                               " link fields, found " +
                               std::to_string(fields.size()));
    }
    Link l;
    l.init_node = parse_number<int>(fields[0], ln, "init node");
    l.term_node = parse_number<int>(fields[1], ln, "term node");
    l.capacity = parse_number<double>(fields[2], ln, "capacity");
    l.length = parse_number<double>(fields[3], ln, "length");
    l.free_flow_time = parse_number<double>(fields[4], ln, "free flow time");
    l.b = parse_number<double>(fields[5], ln, "B");
    l.power = parse_number<double>(fields[6], ln, "power");
    l.speed = parse_number<double>(fields[7], ln, "speed limit");
    l.toll = parse_number<double>(fields[8], ln, "toll");
    l.link_type = parse_number<int>(fields[9], ln, "type");
    if (l.init_node < 1 || l.init_node > net.node_count || l.term_node < 1 ||
        l.term_node > net.node_count) {
      throw ParseError(ln, "node id outside 1.." +
                               std::to_string(net.node_count));
    }
    if (l.init_node == l.term_node) throw ParseError(ln, "self-loop link");
    if (!(l.capacity > 0.0)) throw ParseError(ln, "capacity must be positive");
    if (!(l.length >= 0.0)) throw ParseError(ln, "negative length");
    net.links.push_back(l);
  }
  if (static_cast<int>(net.links.size()) != declared_links) {
    throw ParseError(reader.number(),
                     "<NUMBER OF LINKS> is " + std::to_string(declared_links) +
                         " but " + std::to_string(net.links.size()) +
                         " rows were read");
  }
  return net;
}

Trips parse_trips(std::string_view text) {
  LineReader reader(text);
  Metadata md = read_metadata(reader);
  Trips trips;
  trips.zone_count = required_tag<int>(md, "NUMBER OF ZONES");
  trips.declared_total = required_tag<double>(md, "TOTAL OD FLOW");
  if (trips.zone_count <= 0) {
    throw ParseError(md.end_line, "<NUMBER OF ZONES> must be positive");
  }
  const auto zones = static_cast<std::size_t>(trips.zone_count);
  trips.flow.assign(zones * zones, 0.0);

  auto zone = [&](std::string_view tok, int ln) {
    const int z = parse_number<int>(tok, ln, "zone");
    if (z < 1 || z > trips.zone_count) {
      throw ParseError(ln, "zone " + std::to_string(z) + " outside 1.." +
                               std::to_string(trips.zone_count));
    }
    return z - 1;
  };

  std::optional<int> origin;
  std::string_view raw;
  while (reader.next(raw)) {
    auto line = trim(raw);
    if (line.empty() || line.front() == '~') continue;
    const int ln = reader.number();
    if (line.starts_with("Origin")) {
      const auto toks = split_ws(line);
      if (toks.size() != 2 || toks[0] != "Origin") {
        throw ParseError(ln, "malformed Origin line");
      }
      origin = zone(toks[1], ln);
      continue;
    }
    if (!origin) throw ParseError(ln, "entry before any Origin line");
    std::size_t start = 0;
    while (start < line.size()) {
      auto semi = line.find(';', start);
      const bool terminated = semi != std::string_view::npos;
      if (!terminated) semi = line.size();
      const auto entry = trim(line.substr(start, semi - start));
      start = semi + 1;
      if (entry.empty()) continue;
      if (!terminated) throw ParseError(ln, "entry missing ';'");
      const auto colon = entry.find(':');
      if (colon == std::string_view::npos) {
        throw ParseError(ln, "malformed entry '" + std::string(entry) + "'");
      }
      const auto lhs = trim(entry.substr(0, colon));
      const auto rhs = trim(entry.substr(colon + 1));
      if (lhs.empty() || rhs.empty()) {
        throw ParseError(ln, "malformed entry '" + std::string(entry) + "'");
      }
      const int dest = zone(lhs, ln);
      const double f = parse_number<double>(rhs, ln, "flow");
      if (!(f >= 0.0)) throw ParseError(ln, "negative flow");
      if (dest == *origin) {
        trips.dropped_diagonal += f;
        continue;
      }
      trips.flow[static_cast<std::size_t>(*origin) * zones + dest] += f;
    }
  }
  return trips;
}

std::string serialize_net(const Network& net) {
  std::ostringstream out;
  if (net.zone_count > 0) out << "<NUMBER OF ZONES> " << net.zone_count << '\n';
  out << "<NUMBER OF NODES> " << net.node_count << '\n';
  out << "<FIRST THRU NODE> " << net.first_thru_node << '\n';
  out << "<NUMBER OF LINKS> " << net.links.size() << '\n';
  for (const auto& [tag, value] : net.extra_metadata) {
    out << '<' << tag << "> " << value << '\n';
  }
  out << "<END OF METADATA>\n\n";
  out << "~\tinit\tterm\tcapacity\tlength\tfft\tb\tpower\tspeed\ttoll\ttype\t;\n";
  for (const Link& l : net.links) {
    out << '\t' << l.init_node << '\t' << l.term_node << '\t'
        << format_number(l.capacity) << '\t' << format_number(l.length) << '\t'
        << format_number(l.free_flow_time) << '\t' << format_number(l.b)
        << '\t' << format_number(l.power) << '\t' << format_number(l.speed)
        << '\t' << format_number(l.toll) << '\t' << l.link_type << "\t;\n";
  }
  return out.str();
}

Network read_net_file(const std::string& path) {
  const auto text = read_file(path);
  try {
    return parse_net(text);
  } catch (const ParseError& e) {
    throw DataError(path + ": " + e.what());
  }
}

Trips read_trips_file(const std::string& path) {
  const auto text = read_file(path);
  try {
    return parse_trips(text);
  } catch (const ParseError& e) {
    throw DataError(path + ": " + e.what());
  }
}

}  // namespace amod::tntp
