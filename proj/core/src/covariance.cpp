#include "epca/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "epca/errors.hpp"
#include "epca/rmt.hpp"

namespace epca {

namespace {

std::string format_columns(const std::vector<std::size_t>& cols) {
  std::ostringstream out;
  const std::size_t shown = std::min<std::size_t>(cols.size(), 20);
  for (std::size_t i = 0; i < shown; ++i) out << (i ? ", " : "") << cols[i];
  if (shown < cols.size()) out << ", ... (" << cols.size() << " total)";
  return out.str();
}

bool entry_in_support(const ExponentialFamily& f, double y) {
  switch (f.kind()) {
    case FamilyKind::gaussian:
      return true;
    case FamilyKind::binomial:
      return y >= 0.0 && y <= f.parameter();
    case FamilyKind::poisson:
    case FamilyKind::negative_binomial:
      return y >= 0.0;
  }
  return true;
}

bool all_equal(const Eigen::VectorXd& v) {
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v(i) != v(0)) return false;
  }
  return true;
}

}  // namespace

// --- DataBatch --------------------------------------------------------------

DataBatch::DataBatch(Eigen::MatrixXd values, ExponentialFamily family)
    : values_(std::move(values)), families_{family} {
  validate();
}

DataBatch::DataBatch(Eigen::MatrixXd values, std::vector<ExponentialFamily> families)
    : values_(std::move(values)), families_(std::move(families)) {
  validate();
}

const ExponentialFamily& DataBatch::family(Eigen::Index column) const {
  if (column < 0 || column >= p()) throw InvalidArgument("column index out of range");
  return families_.size() == 1 ? families_.front() : families_[static_cast<std::size_t>(column)];
}

void DataBatch::validate() const {
  if (values_.rows() < 2) throw InvalidArgument("a batch needs at least two samples");
  if (values_.cols() < 1) throw InvalidArgument("a batch needs at least one feature");
  if (families_.size() != 1 && families_.size() != static_cast<std::size_t>(values_.cols())) {
    throw InvalidArgument("family list must have one entry or one per column");
  }
  for (Eigen::Index j = 0; j < values_.cols(); ++j) {
    const ExponentialFamily& f = family(j);
    for (Eigen::Index i = 0; i < values_.rows(); ++i) {
      const double y = values_(i, j);
      if (!std::isfinite(y)) {
        std::ostringstream msg;
        msg << "non-finite entry at row " << i << ", column " << j;
        throw InvalidArgument(msg.str());
      }
      if (!entry_in_support(f, y)) {
        std::ostringstream msg;
        msg << "entry " << y << " at row " << i << ", column " << j
            << " is outside the support of " << f.to_string();
        throw InvalidArgument(msg.str());
      }
    }
  }
}

// --- moments ------------------------------------------------------------------

MomentSummary sample_moments(const DataBatch& batch, bool clamp_means) {
  const Eigen::Index n = batch.n();
  const Eigen::Index p = batch.p();
  const Eigen::MatrixXd& y = batch.values();

  MomentSummary ms;
  ms.n = n;
  ms.gamma = static_cast<double>(p) / static_cast<double>(n);
  ms.mean = y.colwise().sum().transpose() / static_cast<double>(n);

  Eigen::MatrixXd centered = y.rowwise() - ms.mean.transpose();
  ms.sample_cov = Eigen::MatrixXd::Zero(p, p);
  ms.sample_cov.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose(),
                                                           1.0 / static_cast<double>(n));
  symmetrize_from_lower(ms.sample_cov);

  ms.noise_diag.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    ms.noise_diag(j) = variance_map(batch.family(j), ms.mean(j), clamp_means);
  }
  return ms;
}

Eigen::MatrixXd debias(const MomentSummary& ms) {
  Eigen::MatrixXd sd = ms.sample_cov;
  sd.diagonal() -= ms.noise_diag;
  return sd;
}

std::vector<std::size_t> degenerate_columns(const MomentSummary& ms, double threshold) {
  std::vector<std::size_t> cols;
  for (Eigen::Index j = 0; j < ms.noise_diag.size(); ++j) {
    if (!(ms.noise_diag(j) > threshold)) cols.push_back(static_cast<std::size_t>(j));
  }
  return cols;
}

MomentSummary drop_columns(const MomentSummary& ms, const std::vector<std::size_t>& dropped) {
  if (dropped.empty()) return ms;
  std::vector<Eigen::Index> keep;
  keep.reserve(static_cast<std::size_t>(ms.p()));
  std::size_t next = 0;
  for (Eigen::Index j = 0; j < ms.p(); ++j) {
    if (next < dropped.size() && dropped[next] == static_cast<std::size_t>(j)) {
      ++next;
      continue;
    }
    keep.push_back(j);
  }
  if (next != dropped.size()) throw InvalidArgument("dropped columns must be sorted and in range");

  MomentSummary out;
  out.n = ms.n;
  out.mean = ms.mean(keep);
  out.noise_diag = ms.noise_diag(keep);
  out.sample_cov = ms.sample_cov(keep, keep);
  out.gamma = static_cast<double>(keep.size()) / static_cast<double>(ms.n);
  return out;
}

Eigen::MatrixXd homogenize(const MomentSummary& ms) {
  const auto bad = degenerate_columns(ms);
  if (!bad.empty()) {
    throw DegenerateFeatureError(
        "features with zero noise variance cannot be homogenized (columns " +
            format_columns(bad) + "); drop them first",
        bad);
  }
  const Eigen::VectorXd inv_sd = ms.noise_diag.array().rsqrt();
  Eigen::MatrixXd sh = inv_sd.asDiagonal() * ms.sample_cov * inv_sd.asDiagonal();
  sh.diagonal().array() -= 1.0;
  return sh;
}

Eigen::MatrixXd standardize(const MomentSummary& ms) {
  const Eigen::VectorXd diag = ms.sample_cov.diagonal();
  std::vector<std::size_t> bad;
  for (Eigen::Index j = 0; j < diag.size(); ++j) {
    if (!(diag(j) > kDegenerateNoiseThreshold)) bad.push_back(static_cast<std::size_t>(j));
  }
  if (!bad.empty()) {
    throw DegenerateFeatureError(
        "features with zero sample variance cannot be standardized (columns " +
            format_columns(bad) + ")",
        bad);
  }
  const Eigen::VectorXd inv_sd = diag.array().rsqrt();
  Eigen::MatrixXd corr = inv_sd.asDiagonal() * ms.sample_cov * inv_sd.asDiagonal();
  corr.diagonal().setOnes();
  return corr;
}

// --- shrinkage, heterogenization, scaling ----------------------------------------

ShrunkSpikes shrink_spikes(const Eigen::VectorXd& eigenvalues_desc, double gamma,
                           Eigen::Index rank) {
  if (rank < 0 || rank > eigenvalues_desc.size()) {
    throw InvalidArgument("rank exceeds the number of available eigenvalues");
  }
  const double edge = bulk_edge(gamma);
  ShrunkSpikes out;
  out.ell_hat = Eigen::VectorXd::Zero(rank);
  for (Eigen::Index i = 0; i < rank; ++i) {
    if (i > 0 && eigenvalues_desc(i) > eigenvalues_desc(i - 1)) {
      throw InvalidArgument("eigenvalues must be sorted in descending order");
    }
    const double shifted = eigenvalues_desc(i) + 1.0;
    if (shifted > edge) {
      out.ell_hat(i) = spike_inverse(shifted, gamma);
      ++out.kept;
    }
  }
  return out;
}

Eigen::MatrixXd heterogenize(const MomentSummary& ms, const SpikeFactors& shrunk) {
  const Eigen::VectorXd sd = ms.noise_diag.array().sqrt();
  const Eigen::MatrixXd factor =
      sd.asDiagonal() * shrunk.vectors * shrunk.spikes.array().sqrt().matrix().asDiagonal();
  return factor * factor.transpose();
}

EigenPairs heterogenized_eigenpairs(const MomentSummary& ms, const SpikeFactors& shrunk) {
  if (shrunk.vectors.cols() != shrunk.spikes.size() || shrunk.vectors.rows() != ms.p()) {
    throw InvalidArgument("spike factors do not match the moment summary");
  }
  if (all_equal(ms.noise_diag) && ms.p() > 0) {
    // D_n = c I: heterogenization is a scalar multiple, eigenvectors unchanged.
    EigenPairs out{ms.noise_diag(0) * shrunk.spikes, shrunk.vectors};
    canonicalize_signs(out.vectors);
    return out;
  }
  const Eigen::VectorXd sd = ms.noise_diag.array().sqrt();
  const Eigen::MatrixXd factor =
      sd.asDiagonal() * shrunk.vectors * shrunk.spikes.array().sqrt().matrix().asDiagonal();
  return factored_eigenpairs(factor);
}

Eigen::MatrixXd CovarianceModel::scaled_covariance() const {
  return het_eigvecs * scaled_eigvals().asDiagonal() * het_eigvecs.transpose();
}

Eigen::MatrixXd CovarianceModel::heterogenized_covariance() const {
  return het_eigvecs * het_eigvals.asDiagonal() * het_eigvecs.transpose();
}

std::vector<std::size_t> CovarianceModel::kept_columns() const {
  std::vector<std::size_t> keep;
  std::size_t next = 0;
  for (std::size_t j = 0; j < static_cast<std::size_t>(input_dim); ++j) {
    if (next < dropped_columns.size() && dropped_columns[next] == j) {
      ++next;
      continue;
    }
    keep.push_back(j);
  }
  return keep;
}

CovarianceModel scale(const MomentSummary& ms, const EigenPairs& het,
                      const Eigen::VectorXd& ell_hat) {
  const Eigen::Index k = het.values.size();
  if (k > ell_hat.size()) throw InvalidArgument("more eigenpairs than spike estimates");

  CovarianceModel model;
  model.requested_rank = ell_hat.size();
  model.homogenized_spikes = ell_hat;
  model.het_eigvecs = het.vectors;
  model.het_eigvals = het.values;
  model.alphas.resize(k);
  model.taus.resize(k);
  model.noise_diag = ms.noise_diag;
  model.mean = ms.mean;
  model.gamma = ms.gamma;
  model.n_samples = ms.n;
  model.input_dim = ms.p();

  const bool homoskedastic = all_equal(ms.noise_diag);
  const double mean_noise = ms.noise_diag.sum() / static_cast<double>(ms.p());
  for (Eigen::Index i = 0; i < k; ++i) {
    const double ell = ell_hat(i);
    const double lambda = het.values(i);
    if (!(lambda > 0.0)) {
      std::ostringstream msg;
      msg << "heterogenized eigenvalue " << i << " is " << lambda
          << " for a spike above the transition";
      throw ConsistencyError(msg.str());
    }
    const double tau = homoskedastic ? 1.0 : mean_noise * ell / lambda;
    const double c2 = cosine_sq(ell, ms.gamma);
    double alpha = 1.0;
    if (c2 > 0.0) {
      // (1 - s^2 tau) / c^2 written so that tau == 1 gives exactly 1.
      const double s2 = 1.0 - c2;
      alpha = 1.0 - s2 * (tau - 1.0) / c2;
    }
    if (!std::isfinite(alpha)) alpha = kMinScalingCoefficient;
    model.alphas(i) = std::clamp(alpha, kMinScalingCoefficient, 1.0);
    model.taus(i) = tau;
  }
  return model;
}

CovarianceModel fit_epca_from_moments(const MomentSummary& ms_in, Eigen::Index rank,
                                      const FitOptions& options) {
  std::vector<std::size_t> dropped;
  const MomentSummary* ms = &ms_in;
  MomentSummary reduced;
  if (options.drop_degenerate) {
    dropped = degenerate_columns(ms_in, options.degenerate_threshold);
    if (!dropped.empty()) {
      reduced = drop_columns(ms_in, dropped);
      ms = &reduced;
    }
  }
  if (rank < 0 || rank > std::min<Eigen::Index>(ms->n, ms->p())) {
    std::ostringstream msg;
    msg << "rank " << rank << " must lie in [0, min(n, p)] = [0, "
        << std::min<Eigen::Index>(ms->n, ms->p()) << "]";
    throw InvalidArgument(msg.str());
  }

  const Eigen::MatrixXd sh = homogenize(*ms);
  const EigenPairs top = top_eigenpairs(sh, rank);
  const ShrunkSpikes shrunk = shrink_spikes(top.values, ms->gamma, rank);
  const SpikeFactors factors{shrunk.ell_hat.head(shrunk.kept), top.vectors.leftCols(shrunk.kept)};
  const EigenPairs het = heterogenized_eigenpairs(*ms, factors);

  CovarianceModel model = scale(*ms, het, shrunk.ell_hat);
  model.input_dim = ms_in.p();
  model.dropped_columns = std::move(dropped);
  return model;
}

CovarianceModel fit_epca(const DataBatch& batch, Eigen::Index rank, const FitOptions& options) {
  const MomentSummary ms = sample_moments(batch, options.clamp_means);
  CovarianceModel model = fit_epca_from_moments(ms, rank, options);
  model.families = batch.families();
  return model;
}

// --- genotype weights and PC scores ------------------------------------------------

Eigen::VectorXd hwe_weights(const Eigen::VectorXd& genotype_mean) {
  Eigen::VectorXd w(genotype_mean.size());
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    const double q = genotype_mean(j) / 2.0;
    if (!(q > 0.0 && q < 1.0)) {
      std::ostringstream msg;
      msg << "allele frequency " << q << " at column " << j
          << " gives an infinite HWE weight; filter invariant columns first";
      throw DomainError(msg.str());
    }
    w(j) = 1.0 / std::sqrt(2.0 * q * (1.0 - q));
  }
  return w;
}

Eigen::MatrixXd pc_scores(const DataBatch& batch, Normalization normalization, Eigen::Index rank,
                          bool clamp_means) {
  const Eigen::Index n = batch.n();
  const Eigen::Index p = batch.p();
  if (rank < 0 || rank > std::min(n, p)) throw InvalidArgument("rank out of range for PC scores");

  const Eigen::VectorXd mean = batch.values().colwise().mean().transpose();
  Eigen::MatrixXd z = batch.values().rowwise() - mean.transpose();

  Eigen::VectorXd weights = Eigen::VectorXd::Ones(p);
  if (normalization == Normalization::homogenize) {
    std::vector<std::size_t> bad;
    for (Eigen::Index j = 0; j < p; ++j) {
      const double v = variance_map(batch.family(j), mean(j), clamp_means);
      if (!(v > kDegenerateNoiseThreshold)) bad.push_back(static_cast<std::size_t>(j));
      else weights(j) = 1.0 / std::sqrt(v);
    }
    if (!bad.empty()) {
      throw DegenerateFeatureError("zero noise variance in columns " + format_columns(bad), bad);
    }
  } else if (normalization == Normalization::standardize) {
    std::vector<std::size_t> bad;
    for (Eigen::Index j = 0; j < p; ++j) {
      const double v = z.col(j).squaredNorm() / static_cast<double>(n);
      if (!(v > kDegenerateNoiseThreshold)) bad.push_back(static_cast<std::size_t>(j));
      else weights(j) = 1.0 / std::sqrt(v);
    }
    if (!bad.empty()) {
      throw DegenerateFeatureError("zero sample variance in columns " + format_columns(bad), bad);
    }
  }
  z = z * weights.asDiagonal();

  // Eigenvectors of z^T z / n. For p > n go through the n x n Gram matrix.
  Eigen::MatrixXd loadings;
  if (p <= n) {
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(p, p);
    cov.selfadjointView<Eigen::Lower>().rankUpdate(z.transpose(), 1.0 / static_cast<double>(n));
    loadings = top_eigenpairs(cov, rank).vectors;
  } else {
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(z, 1.0 / static_cast<double>(n));
    const EigenPairs left = top_eigenpairs(gram, rank);
    loadings = z.transpose() * left.vectors;
    for (Eigen::Index k = 0; k < rank; ++k) {
      const double norm = loadings.col(k).norm();
      if (norm > 0.0) loadings.col(k) /= norm;
    }
    canonicalize_signs(loadings);
  }
  return z * loadings;
}

}  // namespace epca
