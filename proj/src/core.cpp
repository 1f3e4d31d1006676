#include "aiscv/core.hpp"

#include <Eigen/SVD>

#include <charconv>
#include <cmath>
#include <system_error>

namespace aiscv {

namespace {

// SplitMix64 step, used to scramble (base_seed, stream_id) into an mt19937_64
// seed so that consecutive stream ids do not produce correlated engines.
std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t base_seed, std::uint64_t stream_id)
    : base_seed_(base_seed), stream_id_(stream_id) {
  std::uint64_t state = base_seed;
  std::uint64_t a = splitmix64(state);
  state ^= stream_id * 0xda942042e4dd58b5ull + 0x2545f4914f6cdd1dull;
  std::uint64_t b = splitmix64(state);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  engine_.seed(seq);
}

double RngStream::uniform() { return unif_(engine_); }

double RngStream::standard_normal() { return normal_(engine_); }

double RngStream::chi_square(double dof) {
  if (!(dof > 0.0)) throw std::invalid_argument("chi_square: dof must be positive");
  std::gamma_distribution<double> gamma(dof / 2.0, 2.0);
  return gamma(engine_);
}

VectorXd RngStream::normal_vector(Eigen::Index d) {
  VectorXd z(d);
  for (Eigen::Index i = 0; i < d; ++i) z[i] = normal_(engine_);
  return z;
}

ParticleStore::ParticleStore(Eigen::Index dimension) : dimension_(dimension) {
  if (dimension <= 0) throw std::invalid_argument("ParticleStore: dimension must be positive");
  points_.resize(0, dimension);
  weights_.resize(0);
  stage_of_.resize(0);
}

void ParticleStore::append_stage(const MatrixXd& points, const VectorXd& weights) {
  if (points.cols() != dimension_)
    throw DimensionMismatch("append_stage: points have " + std::to_string(points.cols()) +
                            " columns, store dimension is " + std::to_string(dimension_));
  if (points.rows() != weights.size())
    throw DimensionMismatch("append_stage: " + std::to_string(points.rows()) + " points vs " +
                            std::to_string(weights.size()) + " weights");
  if (points.rows() == 0) throw std::invalid_argument("append_stage: empty stage");
  if ((weights.array() < 0.0).any())
    throw std::invalid_argument("append_stage: negative importance weight");

  const Eigen::Index old_n = points_.rows();
  const Eigen::Index add = points.rows();
  points_.conservativeResize(old_n + add, Eigen::NoChange);
  points_.bottomRows(add) = points;
  weights_.conservativeResize(old_n + add);
  weights_.tail(add) = weights;
  stage_of_.conservativeResize(old_n + add);
  ++stage_count_;
  stage_of_.tail(add).setConstant(stage_count_);
}

ParticleStore ParticleStore::prefix(int stages) const {
  if (stages < 0 || stages > stage_count_)
    throw std::invalid_argument("prefix: stage count out of range");
  ParticleStore out(dimension_);
  Eigen::Index n = 0;
  while (n < stage_of_.size() && stage_of_[n] <= stages) ++n;
  out.points_ = points_.topRows(n);
  out.weights_ = weights_.head(n);
  out.stage_of_ = stage_of_.head(n);
  out.stage_count_ = stages;
  return out;
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  if (res.ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, res.ptr);
}

double weighted_mean(const VectorXd& values, const VectorXd& weights) {
  if (values.size() != weights.size())
    throw DimensionMismatch("weighted_mean: " + std::to_string(values.size()) + " values vs " +
                            std::to_string(weights.size()) + " weights");
  if ((weights.array() < 0.0).any())
    throw std::invalid_argument("weighted_mean: negative weight");
  const double s = weights.sum();
  if (!(s > 0.0)) throw ZeroWeightSum("weighted_mean: weight sum is not positive");
  return weights.dot(values) / s;
}

WlsSolution wls_fit(const VectorXd& response, const MatrixXd& design, const VectorXd& weights,
                    bool with_intercept, double rank_tolerance) {
  const Eigen::Index n = response.size();
  const Eigen::Index m = design.cols();
  if (design.rows() != n)
    throw DimensionMismatch("wls_fit: design has " + std::to_string(design.rows()) +
                            " rows, response has " + std::to_string(n));
  if (weights.size() != n)
    throw DimensionMismatch("wls_fit: " + std::to_string(weights.size()) + " weights for " +
                            std::to_string(n) + " rows");
  if (n == 0) throw std::invalid_argument("wls_fit: empty problem");
  if ((weights.array() < 0.0).any())
    throw std::invalid_argument("wls_fit: negative weight");
  const double wsum = weights.sum();
  if (!(wsum > 0.0)) throw ZeroWeightSum("wls_fit: weight sum is not positive");

  WlsSolution sol;
  sol.coefficients = VectorXd::Zero(m);

  if (m == 0) {
    sol.intercept = with_intercept ? weights.dot(response) / wsum : 0.0;
    sol.fitted = VectorXd::Constant(n, sol.intercept);
    sol.residuals = response - sol.fitted;
    sol.rank = 0;
    return sol;
  }

  const VectorXd sqrt_w = weights.cwiseSqrt();
  double ybar = 0.0;
  Eigen::RowVectorXd hbar = Eigen::RowVectorXd::Zero(m);
  MatrixXd scaled(n, m);
  VectorXd rhs(n);
  if (with_intercept) {
    ybar = weights.dot(response) / wsum;
    hbar = (weights.transpose() * design) / wsum;
    scaled = sqrt_w.asDiagonal() * (design.rowwise() - hbar);
    rhs = sqrt_w.cwiseProduct((response.array() - ybar).matrix());
  } else {
    scaled = sqrt_w.asDiagonal() * design;
    rhs = sqrt_w.cwiseProduct(response);
  }

  Eigen::BDCSVD<MatrixXd> svd(scaled, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(rank_tolerance);
  sol.coefficients = svd.solve(rhs);
  sol.rank = svd.rank();
  sol.intercept = with_intercept ? ybar - hbar.dot(sol.coefficients) : 0.0;
  sol.fitted = ((design * sol.coefficients).array() + sol.intercept).matrix();
  sol.residuals = response - sol.fitted;
  return sol;
}

}  // namespace aiscv
