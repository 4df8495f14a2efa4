#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

namespace amod::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { kLessEqual, kEqual };

// min cost.x  s.t.  rows (<= or =),  0 <= x <= upper.
// Rows are stored in CSR form. Each row carries an integer tag that callers
// use to group constraint families.
class LpProblem {
 public:
  int num_cols() const { return static_cast<int>(cost_.size()); }
  int num_rows() const { return static_cast<int>(sense_.size()); }
  std::size_t num_nonzeros() const { return values_.size(); }

  int add_column(double cost, double upper = kInf);
  int add_row(std::span<const int> cols, std::span<const double> values,
              Sense sense, double rhs, int tag = 0);

  std::span<const double> cost() const { return cost_; }
  std::span<const double> upper() const { return upper_; }
  void set_cost(int col, double c) { cost_.at(col) = c; }
  void set_upper(int col, double u) { upper_.at(col) = u; }
  void set_sense(int row, Sense s) { sense_.at(row) = s; }
  void set_rhs(int row, double rhs) { rhs_.at(row) = rhs; }

  std::span<const int> row_cols(int r) const;
  std::span<const double> row_values(int r) const;
  Sense sense(int r) const { return sense_.at(r); }
  double rhs(int r) const { return rhs_.at(r); }
  int tag(int r) const { return tags_.at(r); }

  double row_activity(int r, std::span<const double> x) const;
  double objective(std::span<const double> x) const;

  // Throws std::logic_error if a row references an invalid column or holds
  // a non-finite coefficient.
  void validate() const;

 private:
  std::vector<double> cost_;
  std::vector<double> upper_;
  std::vector<int> row_start_{0};
  std::vector<int> cols_;
  std::vector<double> values_;
  std::vector<Sense> sense_;
  std::vector<double> rhs_;
  std::vector<int> tags_;
};

// CPLEX-style LP text. Column and row names default to x<i> and r<i>.
std::string to_lp_format(const LpProblem& lp,
                         std::span<const std::string> col_names = {},
                         std::span<const std::string> row_names = {});

}  // namespace amod::lp
