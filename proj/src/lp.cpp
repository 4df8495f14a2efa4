#include "amod/lp.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace amod::lp {

int LpProblem::add_column(double cost, double upper) {
  cost_.push_back(cost);
  upper_.push_back(upper);
  return num_cols() - 1;
}

int LpProblem::add_row(std::span<const int> cols, std::span<const double> values,
                       Sense sense, double rhs, int tag) {
  if (cols.size() != values.size()) {
    throw std::invalid_argument("add_row: index/value size mismatch");
  }
  cols_.insert(cols_.end(), cols.begin(), cols.end());
  values_.insert(values_.end(), values.begin(), values.end());
  row_start_.push_back(static_cast<int>(cols_.size()));
  sense_.push_back(sense);
  rhs_.push_back(rhs);
  tags_.push_back(tag);
  return num_rows() - 1;
}

std::span<const int> LpProblem::row_cols(int r) const {
  return std::span<const int>(cols_).subspan(row_start_.at(r),
                                             row_start_[r + 1] - row_start_[r]);
}

std::span<const double> LpProblem::row_values(int r) const {
  return std::span<const double>(values_).subspan(
      row_start_.at(r), row_start_[r + 1] - row_start_[r]);
}

double LpProblem::row_activity(int r, std::span<const double> x) const {
  double s = 0.0;
  for (int k = row_start_.at(r); k < row_start_[r + 1]; ++k) {
    s += values_[k] * x[cols_[k]];
  }
  return s;
}

double LpProblem::objective(std::span<const double> x) const {
  double s = 0.0;
  for (int j = 0; j < num_cols(); ++j) s += cost_[j] * x[j];
  return s;
}

void LpProblem::validate() const {
  for (int j = 0; j < num_cols(); ++j) {
    if (!std::isfinite(cost_[j])) throw std::logic_error("non-finite cost");
    if (!(upper_[j] >= 0.0)) throw std::logic_error("negative upper bound");
  }
  for (std::size_t k = 0; k < cols_.size(); ++k) {
    if (cols_[k] < 0 || cols_[k] >= num_cols()) {
      throw std::logic_error("row references invalid column");
    }
    if (!std::isfinite(values_[k])) {
      throw std::logic_error("non-finite coefficient");
    }
  }
  for (int r = 0; r < num_rows(); ++r) {
    if (std::isnan(rhs_[r]) ||
        (sense_[r] == Sense::kEqual && !std::isfinite(rhs_[r]))) {
      throw std::logic_error("invalid right-hand side");
    }
  }
}

std::string to_lp_format(const LpProblem& lp,
                         std::span<const std::string> col_names,
                         std::span<const std::string> row_names) {
  auto cname = [&](int j) {
    return j < static_cast<int>(col_names.size()) ? col_names[j]
                                                  : "x" + std::to_string(j);
  };
  auto rname = [&](int r) {
    return r < static_cast<int>(row_names.size()) ? row_names[r]
                                                  : "r" + std::to_string(r);
  };
  std::ostringstream out;
  out.precision(17);
  auto term = [&](double v, int j, bool first) {
    if (v < 0) {
      out << " - " << -v << ' ' << cname(j);
    } else {
      out << (first ? " " : " + ") << v << ' ' << cname(j);
    }
  };
  out << "Minimize\n obj:";
  bool first = true;
  for (int j = 0; j < lp.num_cols(); ++j) {
    if (lp.cost()[j] == 0.0) continue;
    term(lp.cost()[j], j, first);
    first = false;
  }
  if (first) out << " 0 " << cname(0);
  out << "\nSubject To\n";
  for (int r = 0; r < lp.num_rows(); ++r) {
    if (lp.sense(r) == Sense::kLessEqual && std::isinf(lp.rhs(r))) continue;
    out << ' ' << rname(r) << ':';
    const auto cols = lp.row_cols(r);
    const auto vals = lp.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) term(vals[k], cols[k], k == 0);
    if (cols.empty()) out << " 0 " << cname(0);
    out << (lp.sense(r) == Sense::kEqual ? " = " : " <= ") << lp.rhs(r) << '\n';
  }
  out << "Bounds\n";
  for (int j = 0; j < lp.num_cols(); ++j) {
    if (std::isfinite(lp.upper()[j])) {
      out << " 0 <= " << cname(j) << " <= " << lp.upper()[j] << '\n';
    }
  }
  out << "End\n";
  return out.str();
}

}  // namespace amod::lp
