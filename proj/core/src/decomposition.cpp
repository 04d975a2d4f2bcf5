#include "isaacs/decomposition.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "isaacs/errors.hpp"

namespace isaacs {

namespace {

// Rows of the equality system: one per unordered index pair (i <= j) of the
// symmetric matrix, entries l_i * l_j per stencil vector.
Eigen::MatrixXd equality_matrix(const Stencil& stencil) {
  const int d = stencil.dim;
  const int rows = d * (d + 1) / 2;
  Eigen::MatrixXd E(rows, static_cast<int>(stencil.size()));
  for (std::size_t k = 0; k < stencil.size(); ++k) {
    int r = 0;
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j)
        E(r++, static_cast<int>(k)) = static_cast<double>(stencil.vectors[k][i]) *
                                      static_cast<double>(stencil.vectors[k][j]);
  }
  return E;
}

Eigen::VectorXd pack_symmetric(const Eigen::MatrixXd& a) {
  const int d = static_cast<int>(a.rows());
  Eigen::VectorXd v(d * (d + 1) / 2);
  int r = 0;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) v[r++] = 0.5 * (a(i, j) + a(j, i));
  return v;
}

// Lexicographic enumeration of size-k subsets of {0, ..., n-1}.
bool next_combination(std::vector<int>& idx, int n) {
  const int k = static_cast<int>(idx.size());
  for (int i = k - 1; i >= 0; --i) {
    if (idx[i] < n - (k - i)) {
      ++idx[i];
      for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

MaxMinResult maxmin_decomposition(const Eigen::MatrixXd& a, const Stencil& stencil) {
  const int m = static_cast<int>(stencil.size());
  const Eigen::MatrixXd E = equality_matrix(stencil);
  const Eigen::VectorXd target = pack_symmetric(a);
  const double scale = std::max(1.0, target.cwiseAbs().maxCoeff());

  MaxMinResult result;

  // The equality system must be solvable at all for the cone to contain a.
  {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(E);
    const Eigen::VectorXd c0 = qr.solve(target);
    if ((E * c0 - target).cwiseAbs().maxCoeff() > 1e-9 * scale) return result;
  }

  const int rank = Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(E).rank();
  const int actives = m + 1 - rank;  // active c_k = t constraints at a vertex
  if (actives < 1 || actives > m) return result;

  double best_obj = -std::numeric_limits<double>::infinity();
  double best_norm = std::numeric_limits<double>::infinity();
  std::vector<double> best_c;

  std::vector<int> subset(actives);
  for (int i = 0; i < actives; ++i) subset[i] = i;
  do {
    std::vector<char> in_subset(m, 0);
    for (int k : subset) in_subset[k] = 1;
    std::vector<int> free;
    for (int k = 0; k < m; ++k)
      if (!in_subset[k]) free.push_back(k);

    // Unknowns: c_k for free slots, then t. Columns of the subset collapse
    // onto the t column because those c_k are pinned to t.
    Eigen::MatrixXd M(E.rows(), static_cast<int>(free.size()) + 1);
    for (std::size_t col = 0; col < free.size(); ++col) M.col(col) = E.col(free[col]);
    M.col(free.size()).setZero();
    for (int k : subset) M.col(free.size()) += E.col(k);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
    if (qr.rank() < M.cols()) continue;  // not a vertex: underdetermined
    const Eigen::VectorXd sol = qr.solve(target);
    if ((M * sol - target).cwiseAbs().maxCoeff() > 1e-9 * scale) continue;

    const double t = sol[static_cast<int>(free.size())];
    std::vector<double> c(m, t);
    for (std::size_t col = 0; col < free.size(); ++col) c[free[col]] = sol[col];
    bool ok = true;
    for (double v : c)
      if (v < t - 1e-11 * scale) {
        ok = false;
        break;
      }
    if (!ok) continue;

    double nrm = 0.0;
    for (double v : c) nrm += v * v;
    nrm = std::sqrt(nrm);
    const double tie = 1e-12 * std::max(1.0, std::abs(best_obj));
    if (t > best_obj + tie || (std::abs(t - best_obj) <= tie && nrm < best_norm)) {
      best_obj = t;
      best_norm = nrm;
      best_c = c;
    }
  } while (next_combination(subset, m));

  if (best_c.empty()) return result;
  result.feasible = true;
  result.objective = best_obj;
  result.coeffs = std::move(best_c);
  return result;
}

std::vector<double> decompose_matrix(const Eigen::MatrixXd& a, const Stencil& stencil,
                                     double floor_required) {
  if (floor_required < 0.0)
    throw std::invalid_argument("decomposition floor must be nonnegative");
  MaxMinResult r = maxmin_decomposition(a, stencil);
  const double needed = std::max(floor_required, 0.0);
  if (!r.feasible || r.objective < needed - 1e-12) {
    std::ostringstream os;
    os << "no nonnegative directional decomposition with floor " << floor_required;
    if (r.feasible) os << " (best attainable min coefficient " << r.objective << ")";
    throw DecompositionInfeasible(os.str(), a);
  }
  for (double& v : r.coeffs) v = std::max(v, 0.0);  // scrub roundoff negatives
  return r.coeffs;
}

std::vector<double> decompose_drift(const Eigen::VectorXd& b, const Stencil& stencil) {
  if (b.size() != stencil.dim)
    throw std::invalid_argument("drift dimension does not match stencil");
  std::vector<double> out(stencil.size(), 0.0);
  for (int i = 0; i < stencil.dim; ++i) out[stencil.basis_slot(i)] = b[i];
  return out;
}

double decomposition_floor(double delta, const Stencil& stencil, int probe_count) {
  if (stencil.dim != 2)
    throw std::invalid_argument("decomposition_floor probe set is two-dimensional");
  if (delta <= 0.0 || delta > 1.0)
    throw std::invalid_argument("delta must lie in (0, 1]");
  double floor_value = std::numeric_limits<double>::infinity();
  for (int j = 0; j < probe_count; ++j) {
    const double th = M_PI * j / probe_count;
    Eigen::Matrix2d R;
    R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    const Eigen::Matrix2d probe =
        R * Eigen::Vector2d(delta, 1.0 / delta).asDiagonal() * R.transpose();
    MaxMinResult r = maxmin_decomposition(probe, stencil);
    if (!r.feasible || r.objective < 0.0) return 0.0;
    floor_value = std::min(floor_value, r.objective);
  }
  return floor_value;
}

DecompositionAuditRow audit_decomposition(const Eigen::MatrixXd& a, const Stencil& stencil,
                                          std::int64_t point_id, std::size_t alpha,
                                          std::size_t beta) {
  DecompositionAuditRow row;
  row.point_id = point_id;
  row.alpha = alpha;
  row.beta = beta;
  MaxMinResult r = maxmin_decomposition(a, stencil);
  row.feasible = r.feasible && r.objective >= -1e-12;
  if (row.feasible) {
    row.coeffs = r.coeffs;
    row.min_coefficient = r.objective;
    Eigen::MatrixXd rec = Eigen::MatrixXd::Zero(a.rows(), a.cols());
    for (std::size_t k = 0; k < stencil.size(); ++k) {
      Eigen::VectorXd l(stencil.dim);
      for (int i = 0; i < stencil.dim; ++i) l[i] = static_cast<double>(stencil.vectors[k][i]);
      rec += r.coeffs[k] * l * l.transpose();
    }
    row.reconstruction_residual = (rec - a).cwiseAbs().maxCoeff();
  }
  return row;
}

}  // namespace isaacs
