#pragma once

#include <initializer_list>
#include <vector>

#include "amod/graph.hpp"
#include "amod/scenario.hpp"

namespace amod {

// Set of layers an oracle query may use. Switching arcs are usable when both
// of their endpoint layers are in the mask.
class LayerMask {
 public:
  LayerMask(std::initializer_list<Layer> layers);
  static LayerMask all() {
    return {Layer::kWalking, Layer::kMicromobility, Layer::kRoad};
  }
  bool contains(Layer l) const { return (bits_ >> static_cast<int>(l)) & 1u; }

 private:
  unsigned bits_ = 0;
};

// Free-flow label-setting shortest times from `source` to every dense node
// index; +inf where unreachable within the mask.
std::vector<double> shortest_time(const Supergraph& g, NodeRef source,
                                  LayerMask mask = LayerMask::all());

// Sum over requests of rate * shortest time, one search per distinct origin.
// Throws std::runtime_error naming the first unreachable pair.
double uncapacitated_optimum(const Supergraph& g, const DemandSet& demand,
                             LayerMask mask = LayerMask::all());

}  // namespace amod
