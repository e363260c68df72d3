#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace lab {

// Small dense two-phase simplex:
//   minimize c.x  subject to  A x (<= | = | >=) b,  x >= 0.
// Every LP in this project has few rows (interpolation / moment constraints)
// and possibly many columns, which is the shape the dense tableau handles well.
class SimplexLP {
public:
    enum class Rel { LE, EQ, GE };

    struct Result {
        bool feasible = false;
        bool bounded = true;
        double objective = 0.0;
        std::vector<double> x;
        std::vector<double> duals;  // one multiplier per constraint row
    };

    explicit SimplexLP(std::size_t numVars) : n_(numVars), c_(numVars, 0.0) {}

    void set_objective(std::size_t j, double cj) { c_.at(j) = cj; }

    void add_constraint(const std::vector<double>& row, Rel rel, double rhs) {
        if (row.size() != n_) throw std::invalid_argument("SimplexLP: row size mismatch");
        rows_.push_back(row);
        rels_.push_back(rel);
        rhs_.push_back(rhs);
    }

    Result solve() const {
        const std::size_t m = rows_.size();
        // columns: n structural + one slack/surplus per inequality + artificials
        std::size_t nslack = 0;
        for (auto r : rels_)
            if (r != Rel::EQ) ++nslack;
        const std::size_t ntot = n_ + nslack + m;  // artificial for every row
        // tableau: m rows x (ntot + 1), last column = rhs
        std::vector<std::vector<double>> t(m, std::vector<double>(ntot + 1, 0.0));
        std::vector<std::size_t> basis(m);
        std::size_t slackAt = n_;
        for (std::size_t i = 0; i < m; ++i) {
            double sgn = rhs_[i] < 0.0 ? -1.0 : 1.0;
            for (std::size_t j = 0; j < n_; ++j) t[i][j] = sgn * rows_[i][j];
            t[i][ntot] = sgn * rhs_[i];
            if (rels_[i] != Rel::EQ) {
                double s = (rels_[i] == Rel::LE) ? 1.0 : -1.0;
                t[i][slackAt] = sgn * s;
                ++slackAt;
            }
            std::size_t art = n_ + nslack + i;
            t[i][art] = 1.0;
            basis[i] = art;
        }

        // phase 1: minimize sum of artificials
        std::vector<double> cost(ntot, 0.0);
        for (std::size_t i = 0; i < m; ++i) cost[n_ + nslack + i] = 1.0;
        if (!run(t, basis, cost, ntot)) return Result{};  // unbounded phase 1 cannot happen
        double p1 = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            if (basis[i] >= n_ + nslack) p1 += t[i][ntot];
        if (p1 > 1e-7) return Result{};  // infeasible

        // drive any artificial still basic (at zero level) out of the basis
        for (std::size_t i = 0; i < m; ++i) {
            if (basis[i] < n_ + nslack) continue;
            std::size_t piv = ntot;
            for (std::size_t j = 0; j < n_ + nslack; ++j)
                if (std::abs(t[i][j]) > 1e-9) { piv = j; break; }
            if (piv == ntot) continue;  // redundant row
            pivot(t, basis, i, piv, ntot);
        }

        // phase 2
        std::vector<double> cost2(ntot, 0.0);
        for (std::size_t j = 0; j < n_; ++j) cost2[j] = c_[j];
        // forbid artificials from re-entering
        for (std::size_t j = n_ + nslack; j < ntot; ++j) cost2[j] = 1e30;
        Result res;
        res.feasible = true;
        if (!run(t, basis, cost2, ntot)) {
            res.bounded = false;
            return res;
        }
        res.x.assign(n_, 0.0);
        for (std::size_t i = 0; i < m; ++i)
            if (basis[i] < n_) res.x[basis[i]] = t[i][ntot];
        res.objective = 0.0;
        for (std::size_t j = 0; j < n_; ++j) res.objective += c_[j] * res.x[j];
        res.duals = compute_duals(basis, nslack);
        return res;
    }

private:
    // y solves B^T y = c_B for the final basis B (columns taken from the
    // sign-scaled constraint system), then each y_i is unscaled back to the
    // original row orientation.
    std::vector<double> compute_duals(const std::vector<std::size_t>& basis,
                                      std::size_t nslack) const {
        const std::size_t m = rows_.size();
        std::vector<std::vector<double>> bt(m, std::vector<double>(m + 1, 0.0));
        std::vector<double> sgn(m);
        for (std::size_t i = 0; i < m; ++i) sgn[i] = rhs_[i] < 0.0 ? -1.0 : 1.0;
        std::vector<std::size_t> slackRow;
        for (std::size_t i = 0; i < m; ++i)
            if (rels_[i] != Rel::EQ) slackRow.push_back(i);
        for (std::size_t k = 0; k < m; ++k) {
            std::size_t j = basis[k];
            // column j of the scaled system, transposed into row k
            if (j < n_) {
                for (std::size_t i = 0; i < m; ++i) bt[k][i] = sgn[i] * rows_[i][j];
                bt[k][m] = c_[j];
            } else if (j < n_ + nslack) {
                std::size_t i = slackRow[j - n_];
                bt[k][i] = sgn[i] * (rels_[i] == Rel::LE ? 1.0 : -1.0);
            } else {
                bt[k][j - n_ - nslack] = 1.0;  // artificial at zero level, cost 0
            }
        }
        // gaussian elimination with partial pivoting
        for (std::size_t col = 0; col < m; ++col) {
            std::size_t p = col;
            for (std::size_t i = col + 1; i < m; ++i)
                if (std::abs(bt[i][col]) > std::abs(bt[p][col])) p = i;
            if (std::abs(bt[p][col]) < 1e-13) continue;  // redundant row
            std::swap(bt[p], bt[col]);
            for (std::size_t i = 0; i < m; ++i) {
                if (i == col) continue;
                double f = bt[i][col] / bt[col][col];
                if (f == 0.0) continue;
                for (std::size_t j = col; j <= m; ++j) bt[i][j] -= f * bt[col][j];
            }
        }
        std::vector<double> y(m, 0.0);
        for (std::size_t i = 0; i < m; ++i)
            if (std::abs(bt[i][i]) > 1e-13) y[i] = bt[i][m] / bt[i][i];
        for (std::size_t i = 0; i < m; ++i) y[i] *= sgn[i];
        return y;
    }

    static void pivot(std::vector<std::vector<double>>& t, std::vector<std::size_t>& basis,
                      std::size_t r, std::size_t c, std::size_t ntot) {
        const std::size_t m = t.size();
        double p = t[r][c];
        for (std::size_t j = 0; j <= ntot; ++j) t[r][j] /= p;
        t[r][c] = 1.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == r) continue;
            double f = t[i][c];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= ntot; ++j) t[i][j] -= f * t[r][j];
            t[i][c] = 0.0;
        }
        basis[r] = c;
    }

    // Dantzig pricing with a Bland fallback under degeneracy. Returns false
    // if unbounded.
    static bool run(std::vector<std::vector<double>>& t, std::vector<std::size_t>& basis,
                    const std::vector<double>& cost, std::size_t ntot) {
        const std::size_t m = t.size();
        std::size_t degenerate = 0;
        for (std::size_t iter = 0; iter < 100000; ++iter) {
            // reduced costs: rc_j = cost_j - cost_B . column_j
            std::vector<double> cb(m);
            for (std::size_t i = 0; i < m; ++i) cb[i] = cost[basis[i]];
            std::size_t enter = ntot;
            double best = -1e-9;
            bool bland = degenerate > 2 * m + 20;
            for (std::size_t j = 0; j < ntot; ++j) {
                double rc = cost[j];
                for (std::size_t i = 0; i < m; ++i)
                    if (t[i][j] != 0.0) rc -= cb[i] * t[i][j];
                if (rc < best - 0.0) {
                    if (bland) {
                        if (rc < -1e-9) { enter = j; break; }
                    } else {
                        best = rc;
                        enter = j;
                    }
                }
            }
            if (enter == ntot) return true;  // optimal
            std::size_t leave = m;
            double minRatio = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m; ++i) {
                if (t[i][enter] > 1e-11) {
                    double ratio = t[i][ntot] / t[i][enter];
                    if (ratio < minRatio - 1e-12 ||
                        (ratio < minRatio + 1e-12 && (leave == m || basis[i] < basis[leave]))) {
                        minRatio = ratio;
                        leave = i;
                    }
                }
            }
            if (leave == m) return false;  // unbounded
            degenerate = (minRatio < 1e-12) ? degenerate + 1 : 0;
            pivot(t, basis, leave, enter, ntot);
        }
        throw std::runtime_error("SimplexLP: iteration limit reached");
    }

    std::size_t n_;
    std::vector<double> c_;
    std::vector<std::vector<double>> rows_;
    std::vector<Rel> rels_;
    std::vector<double> rhs_;
};

}  // namespace lab
