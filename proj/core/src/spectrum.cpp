#include "spectral_embed/spectrum.hpp"

#include "spectral_embed/error.hpp"
#include "spectral_embed/laplacian.hpp"

namespace spectral_embed {

Spectrum Spectrum::from_mesh(ManifoldHandle manifold, EigenResult eig) {
  if (!manifold.is_mesh()) throw InvalidArgument("Spectrum::from_mesh needs a mesh manifold");
  if (eig.vectors.rows() != manifold.sample_count()) {
    throw InvalidArgument("eigenvector length does not match the vertex count");
  }
  Spectrum s;
  s.manifold_ = std::move(manifold);
  s.eigenvalues_ = std::move(eig.values);
  s.vectors_ = std::make_shared<const Eigen::MatrixXd>(std::move(eig.vectors));
  return s;
}

Spectrum Spectrum::from_analytic(ManifoldHandle manifold, int count) {
  Spectrum s;
  s.modes_ = manifold.analytic().modes(count);
  s.eigenvalues_.resize(count);
  for (int k = 0; k < count; ++k) s.eigenvalues_[k] = s.modes_[static_cast<std::size_t>(k)].eigenvalue;
  s.manifold_ = std::move(manifold);
  return s;
}

Eigen::VectorXd Spectrum::values(const Point& p, int count) const {
  if (count > this->count()) throw InvalidArgument("requested more eigenfunctions than computed");
  if (manifold_.is_mesh()) {
    if (p.vertex < 0) throw InvalidArgument("mesh eigenfunctions are evaluated at vertices");
    return vectors_->row(p.vertex).head(count).transpose();
  }
  const auto head = std::span<const AnalyticMode>(modes_).first(static_cast<std::size_t>(count));
  return manifold_.analytic().evaluate(head, p.coords);
}

Eigen::MatrixXd Spectrum::gradients(const Point& p, int count) const {
  if (count > this->count()) throw InvalidArgument("requested more eigenfunctions than computed");
  if (manifold_.is_mesh()) {
    if (p.vertex < 0) throw InvalidArgument("mesh eigenfunctions are evaluated at vertices");
    return vertex_gradients(manifold_.mesh(), p.vertex, vectors_->leftCols(count));
  }
  const auto head = std::span<const AnalyticMode>(modes_).first(static_cast<std::size_t>(count));
  return manifold_.analytic().gradients(head, p.coords);
}

Eigen::MatrixXd Spectrum::sample_values(int count) const {
  if (count > this->count()) throw InvalidArgument("requested more eigenfunctions than computed");
  if (manifold_.is_mesh()) return vectors_->leftCols(count);
  Eigen::MatrixXd out(manifold_.sample_count(), count);
  const auto head = std::span<const AnalyticMode>(modes_).first(static_cast<std::size_t>(count));
  for (Index i = 0; i < manifold_.sample_count(); ++i) {
    out.row(i) = manifold_.analytic().evaluate(head, manifold_.sample(i).coords).transpose();
  }
  return out;
}

const Eigen::MatrixXd& Spectrum::vectors() const {
  if (!manifold_.is_mesh()) throw InvalidArgument("analytic spectra have no eigenvector matrix");
  return *vectors_;
}

Spectrum Spectrum::with_eigenvalue(int k, double value) const {
  Spectrum copy = *this;
  copy.eigenvalues_[k] = value;
  if (!copy.modes_.empty()) copy.modes_[static_cast<std::size_t>(k)].eigenvalue = value;
  return copy;
}

Spectrum compute_spectrum(const ManifoldHandle& manifold, int count, const EigensolverOptions& options) {
  if (count < 1) throw InvalidArgument("spectrum count must be >= 1");
  if (!manifold.is_mesh()) return Spectrum::from_analytic(manifold, count);
  const OperatorPair ops = assemble_laplacian(manifold.mesh());
  EigensolverOptions opts = options;
  opts.dimension = manifold.dimension();
  return Spectrum::from_mesh(manifold, solve_generalized(ops.stiffness, ops.mass, count, opts));
}

std::string eigenvalues_csv(const Spectrum& spectrum) {
  CsvTable table({"k", "lambda"});
  for (int k = 0; k < spectrum.count(); ++k) {
    table.add_row({std::to_string(k), format_double(spectrum.eigenvalue(k))});
  }
  return table.str();
}

std::string eigenfunction_csv(const Spectrum& spectrum, int k) {
  if (k < 0 || k >= spectrum.count()) throw InvalidArgument("eigenfunction index out of range");
  const Eigen::MatrixXd values = spectrum.sample_values(k + 1);
  CsvTable table({"vertex", "value"});
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    table.add_row({std::to_string(i), format_double(values(i, k))});
  }
  return table.str();
}

}  // namespace spectral_embed
