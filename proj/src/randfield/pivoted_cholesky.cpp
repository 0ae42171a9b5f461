#include "roughscat/randfield/pivoted_cholesky.hpp"

#include <algorithm>
#include <cmath>

namespace roughscat::randfield {

namespace {

class FunctionOracle final : public SymmetricOracle {
 public:
  FunctionOracle(const std::function<double(int, int)>& entry, int dim) : entry_(entry), dim_(dim) {}
  [[nodiscard]] int dim() const override { return dim_; }
  [[nodiscard]] double diagonal(int i) const override { return entry_(i, i); }
  void column(int j, std::span<double> out) const override {
    for (int i = 0; i < dim_; ++i) out[i] = entry_(i, j);
  }

 private:
  const std::function<double(int, int)>& entry_;
  int dim_;
};

}  // namespace

PivotedCholeskyResult pivoted_cholesky(const SymmetricOracle& oracle, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("pivoted_cholesky: tolerance must be positive");
  const int dim = oracle.dim();
  if (dim < 1) throw InvalidArgument("pivoted_cholesky: empty matrix");

  Eigen::VectorXd d(dim);
  for (int i = 0; i < dim; ++i) {
    d[i] = oracle.diagonal(i);
    if (d[i] < -kNegativePivotSlack) throw NotPositiveSemidefinite("matrix not PSD: negative diagonal entry");
  }
  PivotedCholeskyResult res;
  res.tolerance = tol;
  res.residual_trace.push_back(d.sum());
  const double target = tol * res.initial_trace();
  const double floor = kPivotFloor * d.maxCoeff();

  Eigen::MatrixXd L(dim, std::min(dim, 64));
  Eigen::VectorXd col(dim);
  while (res.final_trace() > target) {
    const int k = res.rank();
    if (k == dim) break;
    Eigen::Index j = 0;
    const double pivot = d.maxCoeff(&j);
    if (pivot < -kNegativePivotSlack) throw NotPositiveSemidefinite("matrix not PSD: negative pivot");
    if (pivot < floor || pivot <= 0.0) break;

    if (k == L.cols()) L.conservativeResize(Eigen::NoChange, std::min<Eigen::Index>(dim, 2 * L.cols()));
    oracle.column(static_cast<int>(j), std::span<double>(col.data(), dim));
    if (k > 0) col.noalias() -= L.leftCols(k) * L.row(j).head(k).transpose();
    col /= std::sqrt(pivot);
    for (int p : res.pivots) col[p] = 0.0;
    col[j] = std::sqrt(pivot);
    L.col(k) = col;

    d -= col.cwiseAbs2();
    for (int p : res.pivots) d[p] = 0.0;
    d[j] = 0.0;
    res.pivots.push_back(static_cast<int>(j));
    const double minimum = d.minCoeff();
    if (minimum < -kNegativePivotSlack) throw NotPositiveSemidefinite("matrix not PSD: residual diagonal became negative");
    res.residual_trace.push_back(d.sum());
  }
  res.converged = res.final_trace() <= target;
  res.factor = L.leftCols(res.rank());
  return res;
}

PivotedCholeskyResult pivoted_cholesky(const std::function<double(int, int)>& entry, int dim, double tol) {
  return pivoted_cholesky(FunctionOracle(entry, dim), tol);
}

}  // namespace roughscat::randfield
