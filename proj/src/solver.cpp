#include "amod/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <mutex>
#include <optional>
#include <random>
#include <stdexcept>

#include <Eigen/CholmodSupport>
#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace amod::lp {

std::string_view to_string(Status s) {
  switch (s) {
    case Status::kOptimal:
      return "optimal";
    case Status::kInfeasible:
      return "infeasible";
    case Status::kUnbounded:
      return "unbounded";
    case Status::kNumericalFailure:
      return "numerical_failure";
  }
  return "?";
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;
using Triplet = Eigen::Triplet<double>;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// min c.x, A x = b, x >= 0 together with the map back to the LpProblem.
struct StandardForm {
  SpMat A;
  Vec b;
  Vec c;
  std::vector<int> col_of_orig;  // -1: column fixed at zero
  std::vector<int> row_of_orig;  // -1: row dropped (free or empty)
  std::optional<int> infeasible_row;
};

StandardForm to_standard(const LpProblem& p) {
  StandardForm sf;
  const int n0 = p.num_cols();
  sf.col_of_orig.assign(n0, -1);
  std::vector<double> c;
  for (int j = 0; j < n0; ++j) {
    if (p.upper()[j] > 0.0) {
      sf.col_of_orig[j] = static_cast<int>(c.size());
      c.push_back(p.cost()[j]);
    }
  }
  std::vector<Triplet> t;
  std::vector<double> b;
  sf.row_of_orig.assign(p.num_rows(), -1);
  for (int r = 0; r < p.num_rows(); ++r) {
    const bool leq = p.sense(r) == Sense::kLessEqual;
    if (leq && std::isinf(p.rhs(r)) && p.rhs(r) > 0) continue;
    const auto cols = p.row_cols(r);
    const auto vals = p.row_values(r);
    const int row = static_cast<int>(b.size());
    bool empty = true;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const int j = sf.col_of_orig[cols[k]];
      if (j < 0 || vals[k] == 0.0) continue;
      t.emplace_back(row, j, vals[k]);
      empty = false;
    }
    if (empty) {
      const double tol = 1e-9 * (1.0 + std::abs(p.rhs(r)));
      const bool ok = leq ? p.rhs(r) >= -tol : std::abs(p.rhs(r)) <= tol;
      if (!ok && !sf.infeasible_row) sf.infeasible_row = r;
      continue;
    }
    sf.row_of_orig[r] = row;
    b.push_back(p.rhs(r));
    if (leq) {
      t.emplace_back(row, static_cast<int>(c.size()), 1.0);
      c.push_back(0.0);
    }
  }
  for (int j = 0; j < n0; ++j) {
    const int col = sf.col_of_orig[j];
    if (col < 0 || std::isinf(p.upper()[j])) continue;
    const int row = static_cast<int>(b.size());
    t.emplace_back(row, col, 1.0);
    t.emplace_back(row, static_cast<int>(c.size()), 1.0);
    c.push_back(0.0);
    b.push_back(p.upper()[j]);
  }
  sf.A.resize(static_cast<Eigen::Index>(b.size()),
              static_cast<Eigen::Index>(c.size()));
  sf.A.setFromTriplets(t.begin(), t.end());
  sf.A.makeCompressed();
  sf.b = Eigen::Map<const Vec>(b.data(), static_cast<Eigen::Index>(b.size()));
  sf.c = Eigen::Map<const Vec>(c.data(), static_cast<Eigen::Index>(c.size()));
  return sf;
}

// Ruiz equilibration: A <- diag(r) A diag(s) with unit max-norm rows/cols.
void equilibrate(SpMat& A, Vec& r, Vec& s, int passes = 12) {
  r = Vec::Ones(A.rows());
  s = Vec::Ones(A.cols());
  for (int pass = 0; pass < passes; ++pass) {
    Vec row_max = Vec::Zero(A.rows());
    Vec col_max = Vec::Zero(A.cols());
    for (int k = 0; k < A.outerSize(); ++k) {
      for (SpMat::InnerIterator it(A, k); it; ++it) {
        const double v = std::abs(it.value());
        row_max[it.row()] = std::max(row_max[it.row()], v);
        col_max[k] = std::max(col_max[k], v);
      }
    }
    Vec dr(A.rows()), ds(A.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
      dr[i] = row_max[i] > 0 ? 1.0 / std::sqrt(row_max[i]) : 1.0;
    }
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      ds[j] = col_max[j] > 0 ? 1.0 / std::sqrt(col_max[j]) : 1.0;
    }
    for (int k = 0; k < A.outerSize(); ++k) {
      for (SpMat::InnerIterator it(A, k); it; ++it) {
        it.valueRef() *= dr[it.row()] * ds[k];
      }
    }
    r.array() *= dr.array();
    s.array() *= ds.array();
  }
}

// Supernodal CHOLMOD goes through the system BLAS. Some OpenBLAS kernel
// builds return garbage on CPUs they misdetect, so factor a small dense SPD
// matrix once and fall back to the simplicial factorization if it fails.
bool supernodal_usable() {
  static bool usable = false;
  static std::once_flag once;
  std::call_once(once, [] {
    const int n = 400;
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd B(n, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) B(i, j) = u(rng);
    const Eigen::MatrixXd D = B * B.transpose() + n * Eigen::MatrixXd::Identity(n, n);
    const SpMat S = D.sparseView();
    Eigen::CholmodSupernodalLLT<SpMat, Eigen::Lower> llt;
    llt.cholmod().print = 0;
    llt.compute(S);
    if (llt.info() != Eigen::Success) return;
    const Vec b = Vec::Ones(n);
    const Vec x = llt.solve(b);
    usable = x.allFinite() && (D * x - b).norm() <= 1e-8 * b.norm();
  });
  return usable;
}

// A diag(d) A' + reg I with a fixed sparsity pattern; the symbolic Cholesky
// analysis is done once and reused for every numeric factorization.
class NormalEquations {
 public:
  explicit NormalEquations(const SpMat& A) : A_(A) {
    const auto m = A.rows();
    std::vector<Triplet> t;
    for (Eigen::Index i = 0; i < m; ++i) t.emplace_back(i, i, 0.0);
    std::vector<int> rows;
    for (int k = 0; k < A.outerSize(); ++k) {
      rows.clear();
      for (SpMat::InnerIterator it(A, k); it; ++it) rows.push_back(static_cast<int>(it.row()));
      for (std::size_t a = 0; a < rows.size(); ++a) {
        for (std::size_t b = 0; b <= a; ++b) {
          t.emplace_back(std::max(rows[a], rows[b]), std::min(rows[a], rows[b]), 0.0);
        }
      }
    }
    M_.resize(m, m);
    M_.setFromTriplets(t.begin(), t.end());
    M_.makeCompressed();

    col_start_.reserve(A.cols() + 1);
    col_start_.push_back(0);
    std::vector<double> vals;
    for (int k = 0; k < A.outerSize(); ++k) {
      rows.clear();
      vals.clear();
      for (SpMat::InnerIterator it(A, k); it; ++it) {
        rows.push_back(static_cast<int>(it.row()));
        vals.push_back(it.value());
      }
      for (std::size_t a = 0; a < rows.size(); ++a) {
        for (std::size_t b = 0; b <= a; ++b) {
          pos_.push_back(position(std::max(rows[a], rows[b]), std::min(rows[a], rows[b])));
          prod_.push_back(vals[a] * vals[b]);
        }
      }
      col_start_.push_back(static_cast<int>(pos_.size()));
    }
    diag_pos_.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) diag_pos_[i] = position(static_cast<int>(i), static_cast<int>(i));
    simplicial_.cholmod().print = 0;  // breakdowns are handled by the caller
    supernodal_.cholmod().print = 0;
    use_supernodal_ = supernodal_usable();
    if (use_supernodal_) {
      supernodal_.analyzePattern(M_);
    } else {
      simplicial_.analyzePattern(M_);
    }
  }

  // Assembles and factors; false if the factorization broke down.
  bool factor(const Vec& d, double reg) {
    double* v = M_.valuePtr();
    std::fill(v, v + M_.nonZeros(), 0.0);
    for (int k = 0; k < static_cast<int>(col_start_.size()) - 1; ++k) {
      const double dk = d[k];
      if (dk == 0.0) continue;
      for (int t = col_start_[k]; t < col_start_[k + 1]; ++t) v[pos_[t]] += dk * prod_[t];
    }
    diag_max_ = 0.0;
    for (int p : diag_pos_) diag_max_ = std::max(diag_max_, v[p]);
    for (int p : diag_pos_) v[p] += reg;
    if (use_supernodal_) {
      supernodal_.factorize(M_);
      if (supernodal_.info() == Eigen::Success) return true;
      // a breakdown the simplicial code does not reproduce means the BLAS
      // path is unreliable here; stay simplicial from now on
      simplicial_.analyzePattern(M_);
      simplicial_.factorize(M_);
      if (simplicial_.info() != Eigen::Success) return false;
      use_supernodal_ = false;
      return true;
    }
    simplicial_.factorize(M_);
    return simplicial_.info() == Eigen::Success;
  }

  // Largest diagonal entry of the last assembled matrix, before reg.
  double diag_max() const { return diag_max_; }

  Vec solve(const Vec& rhs) const {
    return use_supernodal_ ? Vec(supernodal_.solve(rhs)) : Vec(simplicial_.solve(rhs));
  }

  // Solve against the unregularized A diag(d) A' with iterative refinement,
  // continued while it keeps shrinking the residual.
  Vec solve_refined(const Vec& d, const Vec& rhs, int max_steps) const {
    Vec y = solve(rhs);
    Vec r = rhs - apply(d, y);
    double rn = r.lpNorm<Eigen::Infinity>();
    const double target = 1e-15 * std::max(1.0, rhs.lpNorm<Eigen::Infinity>());
    for (int s = 0; s < max_steps && rn > target; ++s) {
      const Vec y2 = y + solve(r);
      const Vec r2 = rhs - apply(d, y2);
      const double rn2 = r2.lpNorm<Eigen::Infinity>();
      if (!(rn2 < 0.9 * rn)) break;
      y = y2;
      r = r2;
      rn = rn2;
    }
    return y;
  }

  Vec apply(const Vec& d, const Vec& y) const {
    const Vec w = (A_.transpose() * y).cwiseProduct(d);
    return A_ * w;
  }

 private:
  int position(int row, int col) const {
    const auto* inner = M_.innerIndexPtr();
    const auto* b = inner + M_.outerIndexPtr()[col];
    const auto* e = inner + M_.outerIndexPtr()[col + 1];
    return static_cast<int>(std::lower_bound(b, e, row) - inner);
  }

  const SpMat& A_;
  SpMat M_;
  std::vector<int> col_start_;
  std::vector<int> pos_;
  std::vector<double> prod_;
  std::vector<int> diag_pos_;
  Eigen::CholmodSupernodalLLT<SpMat, Eigen::Lower> supernodal_;
  Eigen::CholmodSimplicialLLT<SpMat, Eigen::Lower> simplicial_;
  bool use_supernodal_ = false;
  double diag_max_ = 0.0;
};

double max_step(const Vec& v, const Vec& dv) {
  double a = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (dv[i] < 0.0) a = std::min(a, -v[i] / dv[i]);
  }
  return a;
}

struct IpmOutcome {
  Vec x, y, z;
  int iterations = 0;
  bool converged = false;
  bool factor_failed = false;
  double primal_res = kNaN, dual_res = kNaN, gap = kNaN;
};

// Mehrotra predictor-corrector on a scaled standard-form problem whose rows
// are linearly independent.
IpmOutcome run_ipm(const SpMat& A, const Vec& b, const Vec& c,
                   NormalEquations& ne, const SolverOptions& opt) {
  const auto m = A.rows();
  const auto n = A.cols();
  IpmOutcome out;
  const double bnorm = b.lpNorm<Eigen::Infinity>();
  const double cnorm = c.lpNorm<Eigen::Infinity>();

  double reg = 1e-12;
  auto factor = [&](const Vec& d) {
    // escalate; the ceiling is relative so that huge x/z ratios near the
    // optimum can still be regularized
    while (!ne.factor(d, reg)) {
      reg *= 100.0;
      if (reg > 1e-2 * std::max(1.0, ne.diag_max())) return false;
    }
    return true;
  };

  Vec d = Vec::Ones(n);
  if (!factor(d)) {
    out.factor_failed = true;
    return out;
  }
  // Starting point after Mehrotra.
  Vec x = A.transpose() * ne.solve_refined(d, b, 2);
  Vec y = ne.solve_refined(d, A * c, 2);
  Vec z = c - A.transpose() * y;
  const double dxs = std::max(-1.5 * (n ? x.minCoeff() : 0.0), 0.0);
  const double dzs = std::max(-1.5 * (n ? z.minCoeff() : 0.0), 0.0);
  x.array() += dxs;
  z.array() += dzs;
  const double xz = x.dot(z);
  if (xz > 0.0 && z.sum() > 0.0 && x.sum() > 0.0) {
    x.array() += 0.5 * xz / z.sum();
    z.array() += 0.5 * xz / x.sum();
  }
  // With mostly zero costs z can come out ~1e-17 everywhere, which starts
  // the iteration at mu ~ 0 far from feasibility.
  const double xfloor = 1e-4 * std::max(1.0, n ? x.lpNorm<Eigen::Infinity>() : 0.0);
  const double zfloor = 1e-4 * std::max(1.0, cnorm);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!(x[j] > xfloor)) x[j] = std::isfinite(x[j]) ? xfloor : 1.0;
    if (!(z[j] > zfloor)) z[j] = std::isfinite(z[j]) ? zfloor : 1.0;
  }

  double best_merit = std::numeric_limits<double>::infinity();
  int stalled = 0;
  // The last iterate can break down (NaN, failed factorization) after the
  // residuals have already stalled near the optimum; keep the best one.
  struct {
    Vec x, y, z;
    double primal_res, dual_res, gap;
    double merit = std::numeric_limits<double>::infinity();
  } best;
  for (int it = 0; it < opt.max_iterations; ++it) {
    const Vec rp = b - A * x;
    const Vec rd = c - A.transpose() * y - z;
    const double mu = x.dot(z) / static_cast<double>(n);
    const double pobj = c.dot(x);
    const double dobj = b.dot(y);
    out.primal_res = rp.lpNorm<Eigen::Infinity>() / (1.0 + bnorm);
    out.dual_res = rd.lpNorm<Eigen::Infinity>() / (1.0 + cnorm);
    out.gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj));
    out.iterations = it;
    if (out.primal_res < opt.tolerance && out.dual_res < opt.tolerance &&
        out.gap < opt.tolerance) {
      out.converged = true;
      break;
    }
    if (!std::isfinite(pobj) || !std::isfinite(dobj) ||
        x.lpNorm<Eigen::Infinity>() > 1e20 || y.lpNorm<Eigen::Infinity>() > 1e20) {
      break;
    }
    const double merit = std::max({out.primal_res, out.dual_res, out.gap});
    if (merit < best.merit) {
      best = {x, y, z, out.primal_res, out.dual_res, out.gap, merit};
    }
    if (merit < 0.5 * best_merit) {
      best_merit = merit;
      stalled = 0;
    } else if (++stalled > 20) {
      break;
    }

    d = x.cwiseQuotient(z);
    if (!factor(d)) {
      out.factor_failed = true;
      break;
    }
    auto newton = [&](const Vec& rc, Vec& dx, Vec& dy, Vec& dz) {
      const Vec rhs = rp + A * (d.cwiseProduct(rd) - rc.cwiseQuotient(z));
      dy = ne.solve_refined(d, rhs, 10);
      dz = rd - A.transpose() * dy;
      dx = (rc - x.cwiseProduct(dz)).cwiseQuotient(z);
    };
    Vec dx, dy, dz;
    newton(-x.cwiseProduct(z), dx, dy, dz);
    const double ap_aff = max_step(x, dx);
    const double ad_aff = max_step(z, dz);
    const double mu_aff =
        (x + ap_aff * dx).dot(z + ad_aff * dz) / static_cast<double>(n);
    const double sigma = std::pow(mu_aff / mu, 3.0);
    const Vec rc = (sigma * mu - (x.cwiseProduct(z) + dx.cwiseProduct(dz)).array()).matrix();
    newton(rc, dx, dy, dz);
    const double eta = std::max(0.9, 1.0 - 10.0 * mu / (1.0 + mu));
    const double ap = std::min(1.0, eta * max_step(x, dx));
    const double ad = std::min(1.0, eta * max_step(z, dz));
    x += ap * dx;
    y += ad * dy;
    z += ad * dz;
    (void)m;
  }
  if (!out.converged && std::isfinite(best.merit)) {
    out.x = std::move(best.x);
    out.y = std::move(best.y);
    out.z = std::move(best.z);
    out.primal_res = best.primal_res;
    out.dual_res = best.dual_res;
    out.gap = best.gap;
    return out;
  }
  out.x = std::move(x);
  out.y = std::move(y);
  out.z = std::move(z);
  return out;
}

// Fixes the variables the interior point drove to zero and projects the rest
// onto A x = b with a minimum-norm correction; then recomputes y so that the
// reduced costs of the positive variables vanish.
bool polish(const SpMat& A, const Vec& b, const Vec& c, NormalEquations& ne,
            IpmOutcome& st) {
  const auto n = A.cols();
  Vec mask(n);
  for (Eigen::Index j = 0; j < n; ++j) mask[j] = st.x[j] > st.z[j] ? 1.0 : 0.0;
  const double bnorm = 1.0 + b.lpNorm<Eigen::Infinity>();
  Vec x = st.x.cwiseProduct(mask);
  bool ok = false;
  for (int round = 0; round < 8; ++round) {
    if (!ne.factor(mask, 1e-10)) return false;
    Vec r = b - A * x;
    for (int s = 0; s < 40 && r.lpNorm<Eigen::Infinity>() > 1e-15 * bnorm; ++s) {
      const Vec w = ne.solve(r);
      x += (A.transpose() * w).cwiseProduct(mask);
      r = b - A * x;
    }
    if (r.lpNorm<Eigen::Infinity>() > 1e-12 * bnorm) return false;
    bool negative = false;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (mask[j] > 0.0 && x[j] < 0.0) {
        mask[j] = 0.0;
        x[j] = 0.0;
        negative = true;
      }
    }
    if (!negative) {
      ok = true;
      break;
    }
  }
  if (!ok) return false;

  // Dual side: least-squares fit of A_P' y = c_P.
  Vec y = st.y;
  for (int s = 0; s < 20; ++s) {
    const Vec rz = (c - A.transpose() * y).cwiseProduct(mask);
    if (rz.lpNorm<Eigen::Infinity>() <= 1e-15 * (1.0 + c.lpNorm<Eigen::Infinity>())) break;
    y += ne.solve(A * rz);
  }
  const Vec z = c - A.transpose() * y;
  const double ipm_dual_inf = std::max(0.0, -(c - A.transpose() * st.y).minCoeff());
  const double new_dual_inf = std::max(0.0, -z.minCoeff());
  st.x = std::move(x);
  if (new_dual_inf <= std::max(ipm_dual_inf, 1e-12)) {
    st.y = std::move(y);
    st.z = z;
  } else {
    st.z = c - A.transpose() * st.y;
  }
  return true;
}

struct StandardSolution {
  Vec x, y;  // unscaled, y over all rows of the standard form
  bool converged = false;
  bool polished = false;
  int iterations = 0;
};

// Equilibrate, drop dependent rows, run the interior point and polish.
StandardSolution solve_standard(const SpMat& A_in, const Vec& b_in,
                                const Vec& c_in, const SolverOptions& opt) {
  StandardSolution out;
  const auto m = A_in.rows();
  const auto n = A_in.cols();
  if (m == 0) {
    out.x = Vec::Zero(n);
    out.y = Vec::Zero(0);
    out.converged = n == 0 || c_in.minCoeff() >= 0.0;
    return out;
  }
  SpMat A = A_in;
  Vec rs, cs;
  equilibrate(A, rs, cs);
  // Median magnitude rather than the max: a few huge, never-binding limits
  // must not shrink the demand rows to noise.
  const double bs = [&] {
    std::vector<double> mags;
    for (Eigen::Index i = 0; i < b_in.size(); ++i) {
      const double v = std::abs(rs[i] * b_in[i]);
      if (v > 0.0) mags.push_back(v);
    }
    if (mags.empty()) return 1.0;
    auto mid = mags.begin() + static_cast<std::ptrdiff_t>(mags.size() / 2);
    std::nth_element(mags.begin(), mid, mags.end());
    return std::max(1.0, *mid);
  }();
  const double csc = std::max(1.0, (cs.cwiseProduct(c_in)).lpNorm<Eigen::Infinity>());
  Vec b = rs.cwiseProduct(b_in) / bs;
  Vec c = cs.cwiseProduct(c_in) / csc;

  // Dependent equality rows (one per commodity, for instance) are left in;
  // the diagonal regularization of the normal equations absorbs them.
  NormalEquations ne(A);
  IpmOutcome st = run_ipm(A, b, c, ne, opt);
  out.iterations = st.iterations;
  if (st.x.size() != n) return out;
  const bool near = st.primal_res < 1e-6 && st.dual_res < 1e-6 && st.gap < 1e-6;
  out.converged = st.converged;
  if (opt.polish && (st.converged || near)) {
    IpmOutcome trial = st;
    if (polish(A, b, c, ne, trial)) {
      const double p0 = c.dot(st.x);
      const double p1 = c.dot(trial.x);
      const double dual_inf = std::max(0.0, -trial.z.minCoeff());
      if (std::abs(p1 - p0) <= 1e-6 * (1.0 + std::abs(p0)) && dual_inf < 1e-6) {
        st = std::move(trial);
        out.polished = true;
        out.converged = true;
      }
    }
  }
  out.x = cs.cwiseProduct(st.x) * bs;
  out.y = rs.cwiseProduct(st.y) * csc;
  return out;
}

// min 1'(u + v)  s.t.  A x + u - v = b.  Positive optimum proves
// infeasibility; its dual is a Farkas ray.
std::optional<Vec> farkas_ray(const StandardForm& sf, const SolverOptions& opt) {
  const auto m = sf.A.rows();
  const auto n = sf.A.cols();
  std::vector<Triplet> t;
  for (int k = 0; k < sf.A.outerSize(); ++k) {
    for (SpMat::InnerIterator it(sf.A, k); it; ++it) t.emplace_back(it.row(), k, it.value());
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    t.emplace_back(i, n + i, 1.0);
    t.emplace_back(i, n + m + i, -1.0);
  }
  SpMat aux(m, n + 2 * m);
  aux.setFromTriplets(t.begin(), t.end());
  Vec c = Vec::Zero(n + 2 * m);
  c.tail(2 * m).setOnes();
  SolverOptions o = opt;
  o.polish = false;
  const auto s = solve_standard(aux, sf.b, c, o);
  if (s.x.size() == 0) return std::nullopt;
  const double violation = s.x.tail(2 * m).sum();
  if (violation > opt.feasibility_tolerance * (1.0 + sf.b.lpNorm<Eigen::Infinity>())) {
    return s.y;
  }
  return std::nullopt;
}

// A' y <= c feasible?  min 1'w  s.t.  A'y+ - A'y- + s - w = c.
bool dual_infeasible(const StandardForm& sf, const SolverOptions& opt) {
  const auto m = sf.A.rows();
  const auto n = sf.A.cols();
  std::vector<Triplet> t;
  for (int k = 0; k < sf.A.outerSize(); ++k) {
    for (SpMat::InnerIterator it(sf.A, k); it; ++it) {
      t.emplace_back(k, it.row(), it.value());
      t.emplace_back(k, m + it.row(), -it.value());
    }
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    t.emplace_back(j, 2 * m + j, 1.0);
    t.emplace_back(j, 2 * m + n + j, -1.0);
  }
  SpMat aux(n, 2 * m + 2 * n);
  aux.setFromTriplets(t.begin(), t.end());
  Vec c = Vec::Zero(2 * m + 2 * n);
  c.tail(n).setOnes();
  SolverOptions o = opt;
  o.polish = false;
  const auto s = solve_standard(aux, sf.c, c, o);
  if (s.x.size() == 0) return false;
  return s.x.tail(n).sum() >
         opt.feasibility_tolerance * (1.0 + sf.c.lpNorm<Eigen::Infinity>());
}

double max_row_violation(const LpProblem& p, std::span<const double> x) {
  double worst = 0.0;
  for (int r = 0; r < p.num_rows(); ++r) {
    const double a = p.row_activity(r, x);
    if (p.sense(r) == Sense::kEqual) {
      worst = std::max(worst, std::abs(a - p.rhs(r)));
    } else if (std::isfinite(p.rhs(r))) {
      worst = std::max(worst, a - p.rhs(r));
    }
  }
  for (int j = 0; j < p.num_cols(); ++j) {
    worst = std::max({worst, -x[j], x[j] - p.upper()[j]});
  }
  return worst;
}

}  // namespace

namespace {

Result solve_once(const LpProblem& problem, const SolverOptions& options) {
  Result res;
  const StandardForm sf = to_standard(problem);

  auto map_rows = [&](const Vec& y_std) {
    std::vector<double> y(problem.num_rows(), 0.0);
    for (int r = 0; r < problem.num_rows(); ++r) {
      if (sf.row_of_orig[r] >= 0) y[r] = y_std[sf.row_of_orig[r]];
    }
    return y;
  };

  if (sf.infeasible_row) {
    res.status = Status::kInfeasible;
    res.farkas.assign(problem.num_rows(), 0.0);
    const int r = *sf.infeasible_row;
    res.farkas[r] = problem.rhs(r) > 0 ? 1.0 : -1.0;
    res.message = "row " + std::to_string(r) + " has no variables but an unsatisfiable right-hand side";
    return res;
  }

  StandardSolution s = solve_standard(sf.A, sf.b, sf.c, options);
  res.iterations = s.iterations;
  res.polished = s.polished;

  if (s.converged && s.x.size() == sf.A.cols()) {
    res.x.assign(problem.num_cols(), 0.0);
    for (int j = 0; j < problem.num_cols(); ++j) {
      const int col = sf.col_of_orig[j];
      if (col >= 0) res.x[j] = s.x[col];
    }
    res.max_primal_residual = max_row_violation(problem, res.x);
    const Vec z = sf.c - sf.A.transpose() * s.y;
    res.max_dual_infeasibility = std::max(0.0, sf.c.size() ? -z.minCoeff() : 0.0);
    res.objective = problem.objective(res.x);
    res.dual_objective = sf.b.dot(s.y);
    res.relative_gap = std::abs(res.objective - res.dual_objective) /
                       std::max(1.0, std::abs(res.objective));
    res.duals = map_rows(s.y);
    res.reduced_costs.assign(problem.cost().begin(), problem.cost().end());
    for (int r = 0; r < problem.num_rows(); ++r) {
      if (res.duals[r] == 0.0) continue;
      const auto cols = problem.row_cols(r);
      const auto vals = problem.row_values(r);
      for (std::size_t k = 0; k < cols.size(); ++k) {
        res.reduced_costs[cols[k]] -= res.duals[r] * vals[k];
      }
    }
    const double scale = 1.0 + sf.b.lpNorm<Eigen::Infinity>();
    if (res.max_primal_residual <= 1e-6 * scale) {
      res.status = Status::kOptimal;
      return res;
    }
  }

  // Not solved cleanly: classify with auxiliary problems.
  if (auto ray = farkas_ray(sf, options)) {
    res.status = Status::kInfeasible;
    res.farkas = map_rows(*ray);
    res.message = "primal infeasible";
    res.x.clear();
    return res;
  }
  // Nonnegative costs bound the objective below by zero.
  const bool may_be_unbounded = sf.c.size() > 0 && sf.c.minCoeff() < 0.0;
  if (may_be_unbounded && dual_infeasible(sf, options)) {
    res.status = Status::kUnbounded;
    res.message = "dual infeasible (primal unbounded)";
    res.x.clear();
    return res;
  }
  res.status = Status::kNumericalFailure;
  res.message = "interior point did not converge after " +
                std::to_string(s.iterations) + " iterations";
  return res;
}

}  // namespace

// Inequality rows whose right-hand side dwarfs the typical one are held out
// and only added back when the relaxed optimum violates them. An optimum of
// the relaxation that satisfies every row is optimal for the full problem, and
// infeasibility of the relaxation carries over.
Result solve(const LpProblem& problem, const SolverOptions& options) {
  problem.validate();
  // Typical magnitude from the equality rows when there are any: on small
  // instances the limits can outnumber them.
  std::vector<double> mags;
  for (int pass = 0; pass < 2 && mags.empty(); ++pass) {
    for (int r = 0; r < problem.num_rows(); ++r) {
      if (pass == 0 && problem.sense(r) != Sense::kEqual) continue;
      const double v = std::abs(problem.rhs(r));
      if (v > 0.0 && std::isfinite(v)) mags.push_back(v);
    }
  }
  double typical = 1.0;
  if (!mags.empty()) {
    auto mid = mags.begin() + static_cast<std::ptrdiff_t>(mags.size() / 2);
    std::nth_element(mags.begin(), mid, mags.end());
    typical = std::max(1.0, *mid);
  }
  std::vector<int> held;
  for (int r = 0; r < problem.num_rows(); ++r) {
    if (problem.sense(r) == Sense::kLessEqual && std::isfinite(problem.rhs(r)) &&
        problem.rhs(r) > options.loose_row_factor * typical) {
      held.push_back(r);
    }
  }
  if (held.empty()) return solve_once(problem, options);

  LpProblem relaxed = problem;
  for (int r : held) relaxed.set_rhs(r, kInf);
  for (int round = 0;; ++round) {
    Result res = solve_once(relaxed, options);
    if (res.status == Status::kInfeasible) return res;
    if (res.status == Status::kOptimal) {
      std::vector<int> still_held;
      bool violated = false;
      for (int r : held) {
        const double tol = 1e-9 * (1.0 + std::abs(problem.rhs(r)));
        if (problem.row_activity(r, res.x) > problem.rhs(r) + tol) {
          relaxed.set_rhs(r, problem.rhs(r));
          violated = true;
        } else {
          still_held.push_back(r);
        }
      }
      if (!violated) {
        res.max_primal_residual = max_row_violation(problem, res.x);
        return res;
      }
      held = std::move(still_held);
    } else {
      // Unbounded or failed relaxation: fall back to the full problem.
      return solve_once(problem, options);
    }
    if (held.empty() || round >= 8) return solve_once(problem, options);
  }
}

LpProblem restrict_to_optimal_face(const LpProblem& problem, const Result& optimal,
                                   double tolerance) {
  if (optimal.status != Status::kOptimal ||
      static_cast<int>(optimal.reduced_costs.size()) != problem.num_cols()) {
    throw std::invalid_argument("restrict_to_optimal_face: needs an optimal result");
  }
  LpProblem out = problem;
  double cmax = 0.0, xmax = 0.0;
  for (int j = 0; j < problem.num_cols(); ++j) {
    cmax = std::max(cmax, std::abs(problem.cost()[j]));
    xmax = std::max(xmax, std::abs(optimal.x[j]));
  }
  const double ztol = tolerance * (1.0 + cmax);
  const double xtol = tolerance * (1.0 + xmax);
  for (int j = 0; j < problem.num_cols(); ++j) {
    if (optimal.reduced_costs[j] > ztol && optimal.x[j] <= xtol) out.set_upper(j, 0.0);
  }
  for (int r = 0; r < problem.num_rows(); ++r) {
    if (problem.sense(r) != Sense::kLessEqual || !std::isfinite(problem.rhs(r))) continue;
    const double slack = problem.rhs(r) - problem.row_activity(r, optimal.x);
    if (optimal.duals[r] < -ztol && slack <= xtol) {
      out.set_sense(r, Sense::kEqual);
    }
  }
  return out;
}

}  // namespace amod::lp
