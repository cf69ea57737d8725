// Copyright 2026 The CacheVeil Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "cacheveil/common.hpp"

namespace cacheveil::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Relation { less_equal, equal, greater_equal };

enum class Status { optimal, infeasible, unbounded, iteration_limit, numerical_error };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    case Status::iteration_limit: return "iteration_limit";
    case Status::numerical_error: return "numerical_error";
  }
  return "?";
}

struct Term {
  int var = 0;
  double coeff = 0.0;
};

struct Constraint {
  std::vector<Term> terms;  // sparse row
  Relation relation = Relation::less_equal;
  double rhs = 0.0;
  std::string name;
};

// minimize objective . x + objective_offset
// subject to constraints, lower <= x <= upper (lower finite).
struct LinearProgram {
  std::vector<double> objective;
  double objective_offset = 0.0;
  std::vector<Constraint> constraints;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<std::string> names;  // optional variable names

  explicit LinearProgram(std::size_t num_vars = 0)
      : objective(num_vars, 0.0), lower(num_vars, 0.0), upper(num_vars, kInf) {}

  std::size_t num_vars() const { return objective.size(); }
  std::size_t num_rows() const { return constraints.size(); }

  int add_variable(double cost = 0.0, double lo = 0.0, double hi = kInf) {
    objective.push_back(cost);
    lower.push_back(lo);
    upper.push_back(hi);
    return static_cast<int>(objective.size()) - 1;
  }

  Constraint& add_constraint(std::vector<Term> terms, Relation rel, double rhs, std::string name = {}) {
    constraints.push_back({std::move(terms), rel, rhs, std::move(name)});
    return constraints.back();
  }

  void validate() const {
    const std::size_t n = num_vars();
    if (lower.size() != n || upper.size() != n) throw ValidationError("lp: bound vectors size mismatch");
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(lower[j])) throw ValidationError("lp: lower bounds must be finite");
      if (upper[j] < lower[j]) throw ValidationError("lp: upper bound below lower bound");
    }
    for (const auto& c : constraints) {
      if (!std::isfinite(c.rhs)) throw ValidationError("lp: rhs must be finite");
      for (const auto& t : c.terms) {
        if (t.var < 0 || static_cast<std::size_t>(t.var) >= n)
          throw ValidationError("lp: constraint references unknown variable");
      }
    }
  }
};

struct LpSolution {
  Status status = Status::infeasible;
  double objective = 0.0;
  std::vector<double> x;
  std::size_t iterations = 0;
  double max_violation = 0.0;
};

struct SolveOptions {
  double feas_tol = 1e-9;
  double opt_tol = 1e-9;
  double pivot_tol = 1e-9;
  double phase1_tol = 1e-7;   // residual artificial mass that still counts as feasible
  std::size_t max_iterations = 0;   // 0: 50 * (rows + cols)
  std::size_t stall_limit = 50;     // degenerate pivots before switching to Bland's rule
};

// Largest violation of any constraint or bound by x.
inline double max_violation(const LinearProgram& lp, const std::vector<double>& x) {
  double worst = 0.0;
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    worst = std::max(worst, lp.lower[j] - x[j]);
    if (std::isfinite(lp.upper[j])) worst = std::max(worst, x[j] - lp.upper[j]);
  }
  for (const auto& c : lp.constraints) {
    double lhs = 0.0;
    for (const auto& t : c.terms) lhs += t.coeff * x[static_cast<std::size_t>(t.var)];
    double scale = 1.0 + std::abs(c.rhs);
    double v = 0.0;
    switch (c.relation) {
      case Relation::less_equal: v = lhs - c.rhs; break;
      case Relation::greater_equal: v = c.rhs - lhs; break;
      case Relation::equal: v = std::abs(lhs - c.rhs); break;
    }
    worst = std::max(worst, v / scale);
  }
  return worst;
}

namespace detail {

// Dense two-phase tableau. Columns: structural, slack/surplus, artificial.
class Tableau {
 public:
  Tableau(const LinearProgram& lp, const SolveOptions& opt) : opt_(opt), n_struct_(lp.num_vars()) {
    build(lp);
  }

  LpSolution run(const LinearProgram& lp) {
    LpSolution sol;
    const std::size_t cap =
        opt_.max_iterations ? opt_.max_iterations : 50 * (rows_ + cols_);

    // Phase 1: minimize the sum of artificials.
    if (num_artificial_ > 0) {
      std::vector<double> cost(cols_, 0.0);
      for (std::size_t j = first_artificial_; j < cols_; ++j) cost[j] = 1.0;
      price(cost);
      Status st = iterate(cap, sol.iterations, /*allow_artificial=*/true);
      if (st == Status::iteration_limit) {
        sol.status = st;
        return sol;
      }
      if (-obj_[cols_] > opt_.phase1_tol) {
        sol.status = Status::infeasible;
        return sol;
      }
      drive_out_artificials();
    }

    // Phase 2.
    std::vector<double> cost(cols_, 0.0);
    for (std::size_t j = 0; j < n_struct_; ++j) cost[j] = lp.objective[j];
    price(cost);
    Status st = iterate(cap, sol.iterations, /*allow_artificial=*/false);
    if (st != Status::optimal) {
      sol.status = st;
      return sol;
    }

    sol.x.assign(n_struct_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      if (basis_[i] < n_struct_) sol.x[basis_[i]] = std::max(0.0, at(i, cols_));
    }
    for (std::size_t j = 0; j < n_struct_; ++j) sol.x[j] += lp.lower[j];
    sol.objective = lp.objective_offset;
    for (std::size_t j = 0; j < n_struct_; ++j) sol.objective += lp.objective[j] * sol.x[j];
    sol.max_violation = max_violation(lp, sol.x);
    sol.status = sol.max_violation <= std::max(opt_.feas_tol, 1e-9) ? Status::optimal
                                                                    : Status::numerical_error;
    return sol;
  }

 private:
  double& at(std::size_t i, std::size_t j) { return t_[i * stride_ + j]; }
  double at(std::size_t i, std::size_t j) const { return t_[i * stride_ + j]; }

  void build(const LinearProgram& lp) {
    struct Row {
      std::vector<std::pair<std::size_t, double>> terms;
      Relation rel;
      double rhs;
    };
    std::vector<Row> rows;

    // Upper bounds already implied by an equality row with nonnegative
    // coefficients (sum a x = b, x >= lo) need no explicit row.
    std::vector<double> implied(n_struct_, kInf);
    for (const auto& c : lp.constraints) {
      if (c.relation != Relation::equal) continue;
      bool nonneg = true;
      double shifted = c.rhs;
      for (const auto& t : c.terms) {
        if (t.coeff < 0.0) nonneg = false;
        shifted -= t.coeff * lp.lower[static_cast<std::size_t>(t.var)];
      }
      if (!nonneg) continue;
      for (const auto& t : c.terms) {
        if (t.coeff > 0.0) {
          auto j = static_cast<std::size_t>(t.var);
          implied[j] = std::min(implied[j], shifted / t.coeff);
        }
      }
    }

    for (const auto& c : lp.constraints) {
      Row r{{}, c.relation, c.rhs};
      for (const auto& t : c.terms) {
        if (t.coeff == 0.0) continue;
        r.terms.emplace_back(static_cast<std::size_t>(t.var), t.coeff);
        r.rhs -= t.coeff * lp.lower[static_cast<std::size_t>(t.var)];
      }
      rows.push_back(std::move(r));
    }
    for (std::size_t j = 0; j < n_struct_; ++j) {
      double span = lp.upper[j] - lp.lower[j];
      if (std::isfinite(span) && implied[j] > span) {
        rows.push_back({{{j, 1.0}}, Relation::less_equal, span});
      }
    }
    for (auto& r : rows) {
      if (r.rhs < 0.0) {
        for (auto& t : r.terms) t.second = -t.second;
        r.rhs = -r.rhs;
        if (r.rel == Relation::less_equal) {
          r.rel = Relation::greater_equal;
        } else if (r.rel == Relation::greater_equal) {
          r.rel = Relation::less_equal;
        }
      }
    }

    rows_ = rows.size();
    std::size_t n_slack = 0;
    for (const auto& r : rows) {
      if (r.rel != Relation::equal) ++n_slack;
      if (r.rel != Relation::less_equal) ++num_artificial_;
    }
    first_artificial_ = n_struct_ + n_slack;
    cols_ = first_artificial_ + num_artificial_;
    stride_ = cols_ + 1;
    t_.assign(rows_ * stride_, 0.0);
    basis_.assign(rows_, 0);

    std::size_t slack = n_struct_;
    std::size_t art = first_artificial_;
    for (std::size_t i = 0; i < rows_; ++i) {
      const auto& r = rows[i];
      for (const auto& [j, a] : r.terms) at(i, j) += a;
      at(i, cols_) = r.rhs;
      if (r.rel == Relation::less_equal) {
        at(i, slack) = 1.0;
        basis_[i] = slack++;
      } else {
        if (r.rel == Relation::greater_equal) at(i, slack++) = -1.0;
        at(i, art) = 1.0;
        basis_[i] = art++;
      }
    }
  }

  // Reduced costs d_j = c_j - c_B B^-1 A_j; obj_[cols_] holds -z.
  void price(const std::vector<double>& cost) {
    obj_.assign(stride_, 0.0);
    for (std::size_t j = 0; j < cols_; ++j) obj_[j] = cost[j];
    for (std::size_t i = 0; i < rows_; ++i) {
      double cb = cost[basis_[i]];
      if (cb == 0.0) continue;
      const double* row = &t_[i * stride_];
      for (std::size_t j = 0; j <= cols_; ++j) obj_[j] -= cb * row[j];
    }
  }

  void pivot(std::size_t r, std::size_t e) {
    double* prow = &t_[r * stride_];
    const double inv = 1.0 / prow[e];
    nz_.clear();
    for (std::size_t j = 0; j <= cols_; ++j) {
      if (prow[j] != 0.0) {
        prow[j] *= inv;
        nz_.push_back(j);
      }
    }
    prow[e] = 1.0;
    auto eliminate = [&](double* row) {
      const double f = row[e];
      if (f == 0.0) return;
      for (std::size_t j : nz_) {
        double v = row[j] - f * prow[j];
        row[j] = std::abs(v) < 1e-14 ? 0.0 : v;
      }
      row[e] = 0.0;
    };
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i != r) eliminate(&t_[i * stride_]);
    }
    eliminate(obj_.data());
    basis_[r] = e;
  }

  Status iterate(std::size_t cap, std::size_t& iterations, bool allow_artificial) {
    const std::size_t limit_col = allow_artificial ? cols_ : first_artificial_;
    std::size_t stall = 0;
    bool bland = false;
    while (true) {
      // Entering column.
      std::size_t e = limit_col;
      double best = -opt_.opt_tol;
      for (std::size_t j = 0; j < limit_col; ++j) {
        if (obj_[j] < best) {
          e = j;
          if (bland) break;
          best = obj_[j];
        }
      }
      if (e == limit_col) return Status::optimal;
      if (iterations >= cap) return Status::iteration_limit;

      // Ratio test.
      std::size_t r = rows_;
      double best_ratio = kInf;
      double best_piv = 0.0;
      for (std::size_t i = 0; i < rows_; ++i) {
        double a = at(i, e);
        if (a <= opt_.pivot_tol) continue;
        double ratio = std::max(0.0, at(i, cols_)) / a;
        if (r == rows_ || ratio < best_ratio - 1e-12 * (1.0 + best_ratio)) {
          r = i;
          best_ratio = ratio;
          best_piv = a;
        } else if (ratio <= best_ratio + 1e-12 * (1.0 + best_ratio)) {
          bool take = bland ? basis_[i] < basis_[r] : a > best_piv;
          if (take) {
            r = i;
            best_piv = a;
            best_ratio = std::min(best_ratio, ratio);
          }
        }
      }
      if (r == rows_) return Status::unbounded;

      if (best_ratio <= 1e-12) {
        if (++stall > opt_.stall_limit) bland = true;
      } else {
        stall = 0;
        bland = false;
      }
      pivot(r, e);
      ++iterations;
    }
  }

  // After a feasible phase 1, pivot zero-level artificials out of the basis;
  // rows where that is impossible are redundant and get removed.
  void drive_out_artificials() {
    for (std::size_t i = 0; i < rows_;) {
      if (basis_[i] < first_artificial_) {
        ++i;
        continue;
      }
      std::size_t e = first_artificial_;
      double best = opt_.pivot_tol;
      for (std::size_t j = 0; j < first_artificial_; ++j) {
        if (std::abs(at(i, j)) > best) {
          best = std::abs(at(i, j));
          e = j;
        }
      }
      if (e < first_artificial_) {
        pivot(i, e);
        ++i;
      } else {
        t_.erase(t_.begin() + static_cast<std::ptrdiff_t>(i * stride_),
                 t_.begin() + static_cast<std::ptrdiff_t>((i + 1) * stride_));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(i));
        --rows_;
      }
    }
  }

  SolveOptions opt_;
  std::size_t n_struct_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t stride_ = 0;
  std::size_t first_artificial_ = 0;
  std::size_t num_artificial_ = 0;
  std::vector<double> t_;
  std::vector<double> obj_;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> nz_;
};

}  // namespace detail

// Two-phase primal simplex on a dense tableau. Dantzig pricing, switching to
// Bland's rule after a run of degenerate pivots. Deterministic.
inline LpSolution solve(const LinearProgram& lp, const SolveOptions& opt = {}) {
  lp.validate();
  detail::Tableau tab(lp, opt);
  return tab.run(lp);
}

inline LpSolution solve(const LinearProgram& lp, double feas_tol, double opt_tol) {
  SolveOptions opt;
  opt.feas_tol = feas_tol;
  opt.opt_tol = opt_tol;
  return solve(lp, opt);
}

// Plain-text "minimize / subject to / bounds" dump for external cross-checks.
inline void write_lp_text(const LinearProgram& lp, std::ostream& os) {
  auto name = [&](std::size_t j) {
    return j < lp.names.size() && !lp.names[j].empty() ? lp.names[j] : "x" + std::to_string(j);
  };
  auto write_terms = [&](const std::vector<Term>& terms) {
    bool first = true;
    for (const auto& t : terms) {
      if (t.coeff == 0.0) continue;
      os << (t.coeff < 0 ? " - " : (first ? " " : " + ")) << std::abs(t.coeff) << " "
         << name(static_cast<std::size_t>(t.var));
      first = false;
    }
    if (first) os << " 0";
  };
  os.precision(17);
  os << "minimize\n obj:";
  std::vector<Term> obj;
  for (std::size_t j = 0; j < lp.num_vars(); ++j) obj.push_back({static_cast<int>(j), lp.objective[j]});
  write_terms(obj);
  if (lp.objective_offset != 0.0) os << " + " << lp.objective_offset << " constant";
  os << "\nsubject to\n";
  for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
    const auto& c = lp.constraints[i];
    os << " " << (c.name.empty() ? "c" + std::to_string(i) : c.name) << ":";
    write_terms(c.terms);
    os << (c.relation == Relation::less_equal ? " <= "
           : c.relation == Relation::equal    ? " = "
                                              : " >= ")
       << c.rhs << "\n";
  }
  os << "bounds\n";
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    os << " " << lp.lower[j] << " <= " << name(j);
    if (std::isfinite(lp.upper[j])) os << " <= " << lp.upper[j];
    os << "\n";
  }
  os << "end\n";
}

}  // namespace cacheveil::lp
