#pragma once

#include "chemo/norms.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace chemo {

/// Time series of one norm of one quantity, e.g. label "u_L2" with kind L2.
struct NormSeries {
  std::string label;
  NormKind kind = NormKind::L2;
  std::vector<double> times;
  std::vector<double> values;

  void push(double t, double value) {
    if (!times.empty() && !(t > times.back()))
      throw std::invalid_argument("series times must be strictly increasing (" + label + ")");
    if (!std::isfinite(value)) throw std::domain_error("non-finite value in series " + label);
    times.push_back(t);
    values.push_back(value);
  }

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
};

}  // namespace chemo
