#include "cpspectra/algebra.hpp"

#include <charconv>
#include <numeric>
#include <sstream>

#include "cpspectra/cpmap.hpp"
#include "cpspectra/error.hpp"

namespace cpspectra {

AlgebraShape::AlgebraShape(std::vector<Index> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) {
    throw PreconditionError("AlgebraShape: at least one block is required");
  }
  for (Index n : blocks_) {
    if (n < 1) {
      throw PreconditionError("AlgebraShape: block sizes must be positive");
    }
  }
  m_ = std::accumulate(blocks_.begin(), blocks_.end(), Index{0});
}

AlgebraShape AlgebraShape::full(Index m) { return AlgebraShape({m}); }

AlgebraShape AlgebraShape::parse(std::string_view text) {
  std::vector<Index> blocks;
  while (!text.empty()) {
    const auto comma = text.find(',');
    std::string_view item = text.substr(0, comma);
    while (!item.empty() && item.front() == ' ') {
      item.remove_prefix(1);
    }
    while (!item.empty() && item.back() == ' ') {
      item.remove_suffix(1);
    }
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (ec != std::errc() || ptr != item.data() + item.size() || item.empty()) {
      throw ParseError("shape: cannot parse block size '" + std::string(item) + "'");
    }
    blocks.push_back(static_cast<Index>(value));
    if (comma == std::string_view::npos) {
      break;
    }
    text.remove_prefix(comma + 1);
  }
  return AlgebraShape(std::move(blocks));
}

Index AlgebraShape::dimension() const {
  Index d = 0;
  for (Index n : blocks_) {
    d += n * n;
  }
  return d;
}

Index AlgebraShape::offset(Index k) const {
  return std::accumulate(blocks_.begin(), blocks_.begin() + k, Index{0});
}

std::string AlgebraShape::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    os << (i ? "," : "") << blocks_[i];
  }
  return os.str();
}

namespace {

Matrix block_diagonal_part(const Matrix &x, const AlgebraShape &shape) {
  Matrix out = Matrix::Zero(x.rows(), x.cols());
  Index o = 0;
  for (Index n : shape.blocks()) {
    out.block(o, o, n, n) = x.block(o, o, n, n);
    o += n;
  }
  return out;
}

void require_side(const Matrix &x, const AlgebraShape &shape, const char *what) {
  if (x.rows() != shape.size() || x.cols() != shape.size()) {
    std::ostringstream os;
    os << what << ": expected a " << shape.size() << "x" << shape.size() << " matrix for shape ["
       << shape.to_string() << "], got " << x.rows() << "x" << x.cols();
    throw PreconditionError(os.str());
  }
}

} // namespace

AlgebraElement::AlgebraElement(AlgebraShape shape, const Matrix &x, const Tolerance &tol)
    : shape_(std::move(shape)) {
  require_side(x, shape_, "AlgebraElement");
  require_finite(x, "AlgebraElement");
  if (!is_member(x, shape_, tol)) {
    throw PreconditionError("AlgebraElement: matrix is not block diagonal for shape [" +
                            shape_.to_string() + "]");
  }
  matrix_ = block_diagonal_part(x, shape_);
}

AlgebraElement AlgebraElement::identity(const AlgebraShape &shape) {
  return AlgebraElement(shape, Matrix::Identity(shape.size(), shape.size()));
}

Matrix AlgebraElement::block(Index k) const {
  const Index o = shape_.offset(k);
  const Index n = shape_.blocks().at(static_cast<std::size_t>(k));
  return matrix_.block(o, o, n, n);
}

AlgebraElement embed(std::span<const Matrix> blocks, const AlgebraShape &shape) {
  if (static_cast<Index>(blocks.size()) != shape.block_count()) {
    throw PreconditionError("embed: number of blocks does not match the shape");
  }
  Matrix x = Matrix::Zero(shape.size(), shape.size());
  Index o = 0;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const Index n = shape.blocks()[k];
    if (blocks[k].rows() != n || blocks[k].cols() != n) {
      std::ostringstream os;
      os << "embed: block " << k << " must be " << n << "x" << n;
      throw PreconditionError(os.str());
    }
    x.block(o, o, n, n) = blocks[k];
    o += n;
  }
  return AlgebraElement(shape, x);
}

AlgebraElement compress(const Matrix &x, const AlgebraShape &shape) {
  require_side(x, shape, "compress");
  return AlgebraElement(shape, block_diagonal_part(x, shape));
}

bool is_member(const Matrix &x, const AlgebraShape &shape, const Tolerance &tol) {
  require_side(x, shape, "is_member");
  const double defect = op_norm(x - block_diagonal_part(x, shape));
  return defect <= tol.psd * std::max(1.0, op_norm(x));
}

Matrix compression_superop(const AlgebraShape &shape) {
  const Index m = shape.size();
  Matrix phi = Matrix::Zero(m * m, m * m);
  Index o = 0;
  for (Index n : shape.blocks()) {
    for (Index j = o; j < o + n; ++j) {
      for (Index i = o; i < o + n; ++i) {
        phi(i + j * m, i + j * m) = 1.0;
      }
    }
    o += n;
  }
  return phi;
}

Matrix algebra_coordinates(const AlgebraShape &shape) {
  const Index m = shape.size();
  Matrix j_mat = Matrix::Zero(m * m, shape.dimension());
  Index col = 0;
  Index o = 0;
  for (Index n : shape.blocks()) {
    for (Index j = o; j < o + n; ++j) {
      for (Index i = o; i < o + n; ++i) {
        j_mat(i + j * m, col++) = 1.0;
      }
    }
    o += n;
  }
  return j_mat;
}

Matrix restrict_to_algebra(const Matrix &superop, const AlgebraShape &shape) {
  const Matrix j_mat = algebra_coordinates(shape);
  if (superop.rows() != j_mat.rows() || superop.cols() != j_mat.rows()) {
    throw PreconditionError("restrict_to_algebra: superoperator side does not match the shape");
  }
  return j_mat.adjoint() * superop * j_mat;
}

CpMap canonical_extension(const CpMap &tau, const Tolerance &tol) {
  const AlgebraShape &shape = tau.shape();
  const Matrix phi = compression_superop(shape);
  const SuperOperator extended(phi * superop_of(tau).matrix * phi);
  std::vector<Matrix> kraus = kraus_of_choi(choi_of(extended), tol);
  if (kraus.empty()) {
    kraus.push_back(Matrix::Zero(shape.size(), shape.size()));
  }
  return CpMap(std::move(kraus), AlgebraShape::full(shape.size()), tol);
}

} // namespace cpspectra
