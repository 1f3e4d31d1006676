#include "aiscv/control_variates.hpp"

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace aiscv {

namespace {

// All exponent rows of total degree exactly `grade`, first coordinate
// descending, recursing over the remaining coordinates.
void append_grade(Eigen::Index dimension, int grade, Eigen::Index coord, Eigen::VectorXi& row,
                  std::vector<Eigen::VectorXi>& out) {
  if (coord == dimension - 1) {
    row[coord] = grade;
    out.push_back(row);
    return;
  }
  for (int e = grade; e >= 0; --e) {
    row[coord] = e;
    append_grade(dimension, grade - e, coord + 1, row, out);
  }
}

}  // namespace

ControlBasis::ControlBasis(BasisKind kind, Eigen::MatrixXi degrees, int max_degree)
    : kind_(kind), degrees_(std::move(degrees)), max_degree_(max_degree) {}

ControlBasis legendre_pairs_basis(Eigen::Index dimension, int max_degree) {
  if (dimension <= 0) throw std::invalid_argument("legendre_pairs_basis: dimension must be positive");
  if (max_degree < 1) throw std::invalid_argument("legendre_pairs_basis: max_degree must be >= 1");
  const Eigen::Index d = dimension;
  const Eigen::Index k = max_degree;
  const Eigen::Index m = k * d + k * k * d * (d - 1) / 2;
  Eigen::MatrixXi degrees = Eigen::MatrixXi::Zero(m, d);
  Eigen::Index r = 0;
  for (Eigen::Index c = 0; c < d; ++c)
    for (int p = 1; p <= max_degree; ++p) degrees(r++, c) = p;
  for (Eigen::Index c1 = 0; c1 < d; ++c1)
    for (Eigen::Index c2 = c1 + 1; c2 < d; ++c2)
      for (int p1 = 1; p1 <= max_degree; ++p1)
        for (int p2 = 1; p2 <= max_degree; ++p2) {
          degrees(r, c1) = p1;
          degrees(r, c2) = p2;
          ++r;
        }
  return ControlBasis(BasisKind::LegendrePairs, std::move(degrees), max_degree);
}

ControlBasis stein_monomial_basis(Eigen::Index dimension, int max_total_degree) {
  if (dimension <= 0) throw std::invalid_argument("stein_monomial_basis: dimension must be positive");
  if (max_total_degree < 1)
    throw std::invalid_argument("stein_monomial_basis: max_total_degree must be >= 1");
  std::vector<Eigen::VectorXi> rows;
  Eigen::VectorXi row(dimension);
  for (int grade = 1; grade <= max_total_degree; ++grade)
    append_grade(dimension, grade, 0, row, rows);
  Eigen::MatrixXi degrees(static_cast<Eigen::Index>(rows.size()), dimension);
  for (Eigen::Index i = 0; i < degrees.rows(); ++i) degrees.row(i) = rows[i].transpose();
  return ControlBasis(BasisKind::SteinMonomials, std::move(degrees), max_total_degree);
}

VectorXd shifted_legendre_values(double x, int max_degree) {
  if (max_degree < 0) throw std::invalid_argument("shifted_legendre_values: negative degree");
  VectorXd p(max_degree + 1);
  p[0] = 1.0;
  if (max_degree == 0) return p;
  const double t = 2.0 * x - 1.0;
  p[1] = t;
  for (int j = 1; j < max_degree; ++j)
    p[j + 1] = ((2.0 * j + 1.0) * t * p[j] - j * p[j - 1]) / (j + 1.0);
  return p;
}

MatrixXd evaluate_basis(const ControlBasis& basis, const MatrixXd& points,
                        const ScoreFunction* score) {
  const Eigen::Index d = basis.dimension();
  const Eigen::Index m = basis.size();
  const Eigen::Index n = points.rows();
  if (points.cols() != d)
    throw DimensionMismatch("evaluate_basis: points have " + std::to_string(points.cols()) +
                            " columns, basis dimension is " + std::to_string(d));
  if (basis.kind() == BasisKind::SteinMonomials && score == nullptr)
    throw std::invalid_argument("evaluate_basis: Stein basis requires a score function");
  if (basis.kind() == BasisKind::LegendrePairs && score != nullptr)
    throw std::invalid_argument("evaluate_basis: Legendre basis takes no score function");

  const Eigen::MatrixXi& deg = basis.degree_table();
  MatrixXd h(n, m);

  if (basis.kind() == BasisKind::LegendrePairs) {
    // Active (coordinate, degree) factors per basis function; at most two.
    std::vector<std::vector<std::pair<Eigen::Index, int>>> factors(m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index c = 0; c < d; ++c)
        if (deg(i, c) > 0) factors[i].emplace_back(c, deg(i, c));

    MatrixXd table(d, basis.max_degree() + 1);
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < d; ++c)
        table.row(c) = shifted_legendre_values(points(r, c), basis.max_degree()).transpose();
      for (Eigen::Index i = 0; i < m; ++i) {
        double v = 1.0;
        for (const auto& [c, p] : factors[i]) v *= table(c, p);
        h(r, i) = v;
      }
    }
    return h;
  }

  // Stein images of monomials: for phi(x) = prod_j x_j^(a_j),
  //   h(x) = laplacian(phi)(x) + grad(phi)(x) . score(x)
  // with the partial derivatives taken directly on the monomial.
  const int q = basis.max_degree();
  MatrixXd powers(d, q + 1);
  for (Eigen::Index r = 0; r < n; ++r) {
    powers.col(0).setOnes();
    for (int p = 1; p <= q; ++p)
      powers.col(p) = powers.col(p - 1).cwiseProduct(points.row(r).transpose());
    const VectorXd s = score->gradient(points.row(r).transpose());
    if (s.size() != d)
      throw DimensionMismatch("evaluate_basis: score returned dimension " +
                              std::to_string(s.size()) + ", expected " + std::to_string(d));
    for (Eigen::Index i = 0; i < m; ++i) {
      // prefix[j] = prod_{l < j} x_l^(a_l), suffix likewise from the right,
      // so the product with coordinate j removed costs O(1) per term.
      double value = 0.0;
      double prefix = 1.0;
      VectorXd suffix(d + 1);
      suffix[d] = 1.0;
      for (Eigen::Index c = d - 1; c >= 0; --c)
        suffix[c] = suffix[c + 1] * powers(c, deg(i, c));
      for (Eigen::Index j = 0; j < d; ++j) {
        const int a = deg(i, j);
        const double rest = prefix * suffix[j + 1];
        if (a >= 2) value += a * (a - 1) * powers(j, a - 2) * rest;
        if (a >= 1) value += a * powers(j, a - 1) * rest * s[j];
        prefix *= powers(j, a);
      }
      h(r, i) = value;
    }
  }
  return h;
}

VectorXd zero_mean_zscores(const MatrixXd& h, const VectorXd& weights) {
  if (h.rows() != weights.size())
    throw DimensionMismatch("zero_mean_zscores: " + std::to_string(h.rows()) + " rows vs " +
                            std::to_string(weights.size()) + " weights");
  if ((weights.array() < 0.0).any())
    throw std::invalid_argument("zero_mean_zscores: negative weight");
  const double wsum = weights.sum();
  if (!(wsum > 0.0)) throw ZeroWeightSum("zero_mean_zscores: weight sum is not positive");

  VectorXd z(h.cols());
  for (Eigen::Index j = 0; j < h.cols(); ++j) {
    const double mu = weights.dot(h.col(j)) / wsum;
    // Delta-method standard error of the self-normalized estimator.
    const double var = (weights.array().square() * (h.col(j).array() - mu).square()).sum();
    const double se = std::sqrt(var) / wsum;
    if (se == 0.0)
      z[j] = mu == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    else
      z[j] = mu / se;
  }
  return z;
}

VectorXd weighted_zero_mean_check(const ControlBasis& basis, const ScoreFunction* score,
                                  const std::function<double(const VectorXd&)>& target_log_density,
                                  const StudentTPolicy& reference, Eigen::Index n_mc,
                                  RngStream& rng) {
  if (n_mc <= 0) throw std::invalid_argument("weighted_zero_mean_check: n_mc must be positive");
  if (reference.dimension() != basis.dimension())
    throw DimensionMismatch("weighted_zero_mean_check: reference policy dimension " +
                            std::to_string(reference.dimension()) + " vs basis dimension " +
                            std::to_string(basis.dimension()));
  const MatrixXd points = reference.sample(n_mc, rng);
  VectorXd logw(n_mc);
  for (Eigen::Index i = 0; i < n_mc; ++i)
    logw[i] = target_log_density(points.row(i).transpose()) -
              reference.log_density(points.row(i).transpose());
  // Shift before exponentiating; z-scores are invariant to the common factor.
  const double shift = logw.maxCoeff();
  if (shift == -std::numeric_limits<double>::infinity())
    throw ZeroWeightSum("weighted_zero_mean_check: every draw fell outside the target support");
  const VectorXd w = (logw.array() - shift).exp();
  const MatrixXd h = evaluate_basis(basis, points, score);
  return zero_mean_zscores(h, w);
}

}  // namespace aiscv
