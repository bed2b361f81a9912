#include "bippt/multipartite.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include "bippt/errors.hpp"

namespace bippt {

SubsystemDims::SubsystemDims(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw DomainError("subsystem dims must be nonempty");
  for (int d : dims_) {
    if (d < 2) throw DomainError("subsystem dimension must be >= 2, got " + std::to_string(d));
  }
  strides_.assign(dims_.size(), 1);
  for (int k = static_cast<int>(dims_.size()) - 2; k >= 0; --k) {
    strides_[k] = strides_[k + 1] * dims_[k + 1];
  }
  total_ = strides_[0] * dims_[0];
}

std::string SubsystemDims::to_string() const {
  std::ostringstream os;
  for (std::size_t k = 0; k < dims_.size(); ++k) os << (k ? " " : "") << dims_[k];
  return os.str();
}

DensityMatrix::DensityMatrix(Matrix data, SubsystemDims dims)
    : data_(std::move(data)), dims_(std::move(dims)) {
  if (data_.rows() != dims_.total() || data_.cols() != dims_.total()) {
    throw ShapeError("matrix is " + std::to_string(data_.rows()) + "x" +
                     std::to_string(data_.cols()) + " but dims (" + dims_.to_string() +
                     ") require side " + std::to_string(dims_.total()));
  }
  const double asym = (data_ - data_.transpose()).norm();
  if (asym > 1e-12 * std::max(1.0, data_.norm())) {
    throw DomainError("density matrix is not symmetric (||M - M^T|| = " +
                      std::to_string(asym) + ")");
  }
}

std::string Bipartition::to_string() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t k = 0; k < left.size(); ++k) os << (k ? "," : "") << left[k];
  os << '}';
  return os.str();
}

std::vector<Bipartition> enumerate_bipartitions(int n_subsystems) {
  if (n_subsystems < 2) {
    throw DomainError("bipartitions need at least 2 subsystems, got " +
                      std::to_string(n_subsystems));
  }
  const int n = n_subsystems;
  std::vector<Bipartition> out;
  // Subsets by increasing size; std::prev_permutation over a selector yields
  // lexicographic order of the chosen indices.
  for (int size = 1; size <= n / 2; ++size) {
    std::vector<bool> pick(static_cast<std::size_t>(n), false);
    std::fill(pick.begin(), pick.begin() + size, true);
    do {
      Bipartition b;
      for (int k = 0; k < n; ++k) {
        if (pick[static_cast<std::size_t>(k)]) b.left.push_back(k + 1);
      }
      if (2 * size == n && b.left.front() != 1) continue;
      out.push_back(std::move(b));
    } while (std::prev_permutation(pick.begin(), pick.end()));
  }
  return out;
}

PartialTranspose::PartialTranspose(const SubsystemDims& dims, const Bipartition& part) {
  const int n = dims.count();
  std::vector<bool> in_part(static_cast<std::size_t>(n), false);
  for (int k : part.left) {
    if (k < 1 || k > n) {
      throw DomainError("bipartition " + part.to_string() + " out of range for " +
                        std::to_string(n) + " subsystems");
    }
    in_part[static_cast<std::size_t>(k - 1)] = true;
  }
  const int d = dims.total();
  offset_.assign(static_cast<std::size_t>(d), 0);
  for (int a = 0; a < d; ++a) {
    int s = 0;
    for (int k = 0; k < n; ++k) {
      if (!in_part[static_cast<std::size_t>(k)]) continue;
      const int digit = (a / dims.stride(k)) % dims[k];
      s += digit * dims.stride(k);
    }
    offset_[static_cast<std::size_t>(a)] = s;
  }
}

void PartialTranspose::apply_into(const Matrix& m, Matrix& out) const {
  const int d = side();
  if (m.rows() != d || m.cols() != d || out.rows() != d || out.cols() != d) {
    throw ShapeError("partial transpose expects " + std::to_string(d) + "x" +
                     std::to_string(d) + " matrices");
  }
  // The map is an involution, so gather: sequential writes, scattered reads.
  for (int j = 0; j < d; ++j) {
    const int sj = offset_[static_cast<std::size_t>(j)];
    double* col = out.col(j).data();
    for (int i = 0; i < d; ++i) {
      const int si = offset_[static_cast<std::size_t>(i)];
      col[i] = m(i - si + sj, j - sj + si);
    }
  }
}

Matrix PartialTranspose::apply(const Matrix& m) const {
  Matrix out(m.rows(), m.cols());
  apply_into(m, out);
  return out;
}

Matrix partial_transpose(const Matrix& m, const SubsystemDims& dims, const Bipartition& part) {
  if (m.rows() != dims.total() || m.cols() != dims.total()) {
    throw ShapeError("matrix side " + std::to_string(m.rows()) + " does not match dims (" +
                     dims.to_string() + ")");
  }
  return PartialTranspose(dims, part).apply(m);
}

DensityMatrix partial_transpose(const DensityMatrix& m, const Bipartition& part) {
  return DensityMatrix(partial_transpose(m.data(), m.dims(), part), m.dims());
}

StateKind parse_state_kind(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "w3") return StateKind::W3;
  if (s == "ghz3") return StateKind::GHZ3;
  if (s == "ghz5") return StateKind::GHZ5;
  if (s == "mghz5") return StateKind::MultiGHZ5;
  if (s == "custom") return StateKind::Custom;
  throw DomainError("unknown state kind '" + name + "'");
}

std::string state_kind_name(StateKind kind) {
  switch (kind) {
    case StateKind::W3: return "w3";
    case StateKind::GHZ3: return "ghz3";
    case StateKind::GHZ5: return "ghz5";
    case StateKind::MultiGHZ5: return "mghz5";
    case StateKind::Custom: return "custom";
  }
  return "custom";
}

SubsystemDims default_dims(StateKind kind) {
  switch (kind) {
    case StateKind::W3:
    case StateKind::GHZ3: return SubsystemDims({2, 2, 2});
    case StateKind::GHZ5:
    case StateKind::MultiGHZ5: return SubsystemDims({3, 3, 3, 3, 3});
    case StateKind::Custom: break;
  }
  throw DomainError("custom states have no default dims");
}

namespace {

// Linear index of the product basis vector with every subsystem at `level`.
int uniform_index(const SubsystemDims& dims, int level) {
  int idx = 0;
  for (int k = 0; k < dims.count(); ++k) idx += level * dims.stride(k);
  return idx;
}

}  // namespace

DensityMatrix make_state(StateKind kind, const SubsystemDims& dims, double noise,
                         const MultiGhzCoeffs& coeffs, std::span<const double> custom_vector) {
  if (!(noise >= 0.0) || !std::isfinite(noise)) {
    throw DomainError("noise level must be a finite nonnegative number");
  }
  if (kind != StateKind::Custom && !(dims == default_dims(kind))) {
    throw ShapeError("state " + state_kind_name(kind) + " requires dims (" +
                     default_dims(kind).to_string() + "), got (" + dims.to_string() + ")");
  }
  const int d = dims.total();
  Vector v = Vector::Zero(d);
  switch (kind) {
    case StateKind::W3:
      v(1) = v(2) = v(4) = 1.0;  // |001> + |010> + |100>
      break;
    case StateKind::GHZ3:
      v(0) = v(7) = 1.0;
      break;
    case StateKind::GHZ5:
      v(uniform_index(dims, 0)) = 1.0;
      v(uniform_index(dims, 2)) = 1.0;
      break;
    case StateKind::MultiGHZ5:
      v(uniform_index(dims, 0)) = coeffs.m;
      v(uniform_index(dims, 1)) = coeffs.n;
      v(uniform_index(dims, 2)) = coeffs.s;
      break;
    case StateKind::Custom:
      if (static_cast<int>(custom_vector.size()) != d) {
        throw ShapeError("custom state vector has length " + std::to_string(custom_vector.size()) +
                         ", expected " + std::to_string(d));
      }
      for (int i = 0; i < d; ++i) v(i) = custom_vector[static_cast<std::size_t>(i)];
      break;
  }
  Matrix omega = v * v.transpose();
  omega.diagonal().array() += noise;
  const double tr = omega.trace();
  if (!(tr > 0.0)) throw DomainError("state has zero trace (zero vector and zero noise)");
  return DensityMatrix(omega / tr, dims);
}

DensityReport check_density(const Matrix& m, double tol) {
  DensityReport r;
  if (m.rows() != m.cols() || m.rows() == 0 || !m.allFinite()) {
    r.asymmetry = std::numeric_limits<double>::infinity();
    r.min_eigenvalue = -std::numeric_limits<double>::infinity();
    return r;
  }
  r.asymmetry = (m - m.transpose()).norm();
  r.symmetric = r.asymmetry <= 1e-12 * std::max(1.0, m.norm());
  r.trace = m.trace();
  const Matrix s = symmetrize(m);
  Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    r.min_eigenvalue = -std::numeric_limits<double>::infinity();
    return r;
  }
  r.min_eigenvalue = es.eigenvalues().minCoeff();
  r.psd = r.min_eigenvalue >= -tol;
  r.valid_state = r.symmetric && std::abs(r.trace - 1.0) <= 1e-12 && r.min_eigenvalue >= -1e-10;
  return r;
}

DensityReport check_density(const DensityMatrix& m, double tol) {
  return check_density(m.data(), tol);
}

Matrix symmetrize(const Matrix& m) {
  return 0.5 * (m + m.transpose());
}

DensityMatrix symmetrize(const DensityMatrix& m) {
  return DensityMatrix(symmetrize(m.data()), m.dims());
}

}  // namespace bippt
