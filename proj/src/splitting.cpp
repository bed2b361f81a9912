#include "bippt/splitting.hpp"

#include <cmath>
#include <random>
#include <string>

#include "bippt/errors.hpp"

namespace bippt {

namespace {

void require_same_shape(const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
  if (a.size() != b.size()) {
    throw ShapeError("stack sizes differ: " + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()));
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].rows() != b[i].rows() || a[i].cols() != b[i].cols()) {
      throw ShapeError("stack block " + std::to_string(i) + " shapes differ");
    }
  }
}

template <typename Op>
std::vector<Matrix> zip(const std::vector<Matrix>& a, const std::vector<Matrix>& b, Op op) {
  require_same_shape(a, b);
  std::vector<Matrix> out;
  out.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(op(a[i], b[i]));
  return out;
}

std::vector<Matrix> scaled(double s, const std::vector<Matrix>& a) {
  std::vector<Matrix> out;
  out.reserve(a.size());
  for (const auto& m : a) out.push_back(s * m);
  return out;
}

double block_dot(const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
  require_same_shape(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i].cwiseProduct(b[i]).sum();
  return s;
}

double block_sqdist(const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
  require_same_shape(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]).squaredNorm();
  return s;
}

double block_sqnorm(const std::vector<Matrix>& a) {
  double s = 0.0;
  for (const auto& m : a) s += m.squaredNorm();
  return s;
}

const auto plus = [](const Matrix& x, const Matrix& y) -> Matrix { return x + y; };
const auto minus = [](const Matrix& x, const Matrix& y) -> Matrix { return x - y; };

}  // namespace

ComponentStack ComponentStack::zeros(int m, int d) {
  return ComponentStack{std::vector<Matrix>(static_cast<std::size_t>(m), Matrix::Zero(d, d))};
}

AuxStack AuxStack::zeros(int m, int d) {
  return AuxStack{std::vector<Matrix>(static_cast<std::size_t>(m), Matrix::Zero(d, d)),
                  std::vector<Matrix>(static_cast<std::size_t>(m), Matrix::Zero(d, d))};
}

ComponentStack operator+(const ComponentStack& a, const ComponentStack& b) {
  return {zip(a.blocks, b.blocks, plus)};
}
ComponentStack operator-(const ComponentStack& a, const ComponentStack& b) {
  return {zip(a.blocks, b.blocks, minus)};
}
ComponentStack operator*(double s, const ComponentStack& a) { return {scaled(s, a.blocks)}; }
double dot(const ComponentStack& a, const ComponentStack& b) { return block_dot(a.blocks, b.blocks); }
double squared_norm(const ComponentStack& a) { return block_sqnorm(a.blocks); }
double norm(const ComponentStack& a) { return std::sqrt(squared_norm(a)); }
double squared_distance(const ComponentStack& a, const ComponentStack& b) {
  return block_sqdist(a.blocks, b.blocks);
}

AuxStack operator+(const AuxStack& a, const AuxStack& b) {
  return {zip(a.transformed, b.transformed, plus), zip(a.copies, b.copies, plus)};
}
AuxStack operator-(const AuxStack& a, const AuxStack& b) {
  return {zip(a.transformed, b.transformed, minus), zip(a.copies, b.copies, minus)};
}
AuxStack operator*(double s, const AuxStack& a) {
  return {scaled(s, a.transformed), scaled(s, a.copies)};
}
double dot(const AuxStack& a, const AuxStack& b) {
  return block_dot(a.transformed, b.transformed) + block_dot(a.copies, b.copies);
}
double squared_norm(const AuxStack& a) {
  return block_sqnorm(a.transformed) + block_sqnorm(a.copies);
}
double norm(const AuxStack& a) { return std::sqrt(squared_norm(a)); }
double squared_distance(const AuxStack& a, const AuxStack& b) {
  return block_sqdist(a.transformed, b.transformed) + block_sqdist(a.copies, b.copies);
}

Vector vec(const Matrix& m) {
  // Eigen storage is column-major, so the raw buffer is already column-stacked.
  return Eigen::Map<const Vector>(m.data(), m.size());
}

Matrix mat(const Vector& v, int d) {
  if (d < 0 || v.size() != static_cast<Eigen::Index>(d) * d) {
    throw ShapeError("mat: vector of length " + std::to_string(v.size()) +
                     " cannot form a " + std::to_string(d) + "x" + std::to_string(d) + " matrix");
  }
  return Eigen::Map<const Matrix>(v.data(), d, d);
}

namespace {

Vector concat(const std::vector<const std::vector<Matrix>*>& groups) {
  Eigen::Index n = 0;
  for (const auto* g : groups) {
    for (const auto& m : *g) n += m.size();
  }
  Vector out(n);
  Eigen::Index pos = 0;
  for (const auto* g : groups) {
    for (const auto& m : *g) {
      out.segment(pos, m.size()) = vec(m);
      pos += m.size();
    }
  }
  return out;
}

std::vector<Matrix> split(const Vector& v, Eigen::Index offset, int m, int d) {
  std::vector<Matrix> out;
  const Eigen::Index dd = static_cast<Eigen::Index>(d) * d;
  for (int i = 0; i < m; ++i) out.push_back(mat(v.segment(offset + i * dd, dd), d));
  return out;
}

}  // namespace

Vector vec(const ComponentStack& x) { return concat({&x.blocks}); }
Vector vec(const AuxStack& v) { return concat({&v.transformed, &v.copies}); }

ComponentStack component_stack_from_vec(const Vector& v, int m, int d) {
  if (v.size() != static_cast<Eigen::Index>(m) * d * d) {
    throw ShapeError("component stack vector has wrong length");
  }
  return {split(v, 0, m, d)};
}

AuxStack aux_stack_from_vec(const Vector& v, int m, int d) {
  const Eigen::Index half = static_cast<Eigen::Index>(m) * d * d;
  if (v.size() != 2 * half) throw ShapeError("aux stack vector has wrong length");
  return {split(v, 0, m, d), split(v, half, m, d)};
}

SplittingOperator::SplittingOperator(SubsystemDims dims, std::vector<Bipartition> parts)
    : dims_(std::move(dims)), parts_(std::move(parts)) {
  if (parts_.empty()) throw DomainError("splitting operator needs at least one bipartition");
  maps_.reserve(parts_.size());
  for (const auto& p : parts_) maps_.emplace_back(dims_, p);
}

void SplittingOperator::check(int m, int d) const {
  if (m != blocks() || d != side()) {
    throw ShapeError("stack of " + std::to_string(m) + " blocks of side " + std::to_string(d) +
                     " does not match operator (" + std::to_string(blocks()) + " blocks, side " +
                     std::to_string(side()) + ")");
  }
}

AuxStack SplittingOperator::apply(const ComponentStack& x) const {
  check(x.size(), x.side());
  AuxStack out;
  out.transformed.reserve(x.blocks.size());
  for (int i = 0; i < blocks(); ++i) {
    const Matrix& xi = x.blocks[static_cast<std::size_t>(i)];
    if (xi.rows() != side() || xi.cols() != side()) throw ShapeError("ragged component stack");
    out.transformed.push_back(maps_[static_cast<std::size_t>(i)].apply(xi));
  }
  out.copies = x.blocks;
  return out;
}

ComponentStack SplittingOperator::adjoint(const AuxStack& v) const {
  check(v.size(), v.side());
  if (v.copies.size() != v.transformed.size()) throw ShapeError("aux stack halves differ in size");
  ComponentStack out;
  out.blocks.reserve(v.transformed.size());
  for (int i = 0; i < blocks(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (v.copies[k].rows() != side() || v.transformed[k].rows() != side()) {
      throw ShapeError("ragged aux stack");
    }
    Matrix b = maps_[k].apply(v.transformed[k]);
    b += v.copies[k];
    out.blocks.push_back(std::move(b));
  }
  return out;
}

Matrix SplittingOperator::materialize() const {
  const Eigen::Index d = side();
  const Eigen::Index dd = d * d;
  const Eigen::Index m = blocks();
  Matrix a = Matrix::Zero(2 * m * dd, m * dd);
  for (Eigen::Index b = 0; b < m; ++b) {
    const auto& pt = maps_[static_cast<std::size_t>(b)];
    for (int j = 0; j < d; ++j) {
      for (int i = 0; i < d; ++i) {
        const Eigen::Index col = b * dd + j * d + i;
        const auto [ti, tj] = pt.map(i, j);
        a(b * dd + static_cast<Eigen::Index>(tj) * d + ti, col) = 1.0;
        a(m * dd + col, col) = 1.0;
      }
    }
  }
  return a;
}

OperatorIdentityCheck verify_operator_identity(const SubsystemDims& dims,
                                               const std::vector<Bipartition>& parts, int probes,
                                               std::uint64_t seed) {
  const SplittingOperator op(dims, parts);
  OperatorIdentityCheck r;
  if (dims.total() <= 16) {
    const Matrix a = op.materialize();
    const Matrix ata = a.transpose() * a;
    r.max_deviation = (ata - 2.0 * Matrix::Identity(ata.rows(), ata.cols())).cwiseAbs().maxCoeff();
    r.materialized = true;
  } else {
    std::mt19937_64 rng(seed);
    // Uniform on [-1, 1) from the top 53 bits of each draw.
    const auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0; };
    const int d = dims.total();
    for (int t = 0; t < probes; ++t) {
      ComponentStack x;
      for (int i = 0; i < op.blocks(); ++i) {
        Matrix b(d, d);
        for (Eigen::Index k = 0; k < b.size(); ++k) b.data()[k] = uniform();
        x.blocks.push_back(std::move(b));
      }
      const ComponentStack back = op.adjoint(op.apply(x));
      for (int i = 0; i < op.blocks(); ++i) {
        const auto k = static_cast<std::size_t>(i);
        r.max_deviation =
            std::max(r.max_deviation, (back.blocks[k] - 2.0 * x.blocks[k]).cwiseAbs().maxCoeff());
      }
    }
  }
  r.holds = r.max_deviation <= 1e-12;
  return r;
}

}  // namespace bippt
