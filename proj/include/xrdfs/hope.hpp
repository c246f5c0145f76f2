#pragma once

// HOPE layer embeddings: Katz proximity S = (I - beta A)^-1 beta A, then the
// top d/2 singular triplets of S split into source (u sqrt(sigma)) and target
// (v sqrt(sigma)) halves.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "xrdfs/encoding.hpp"
#include "xrdfs/errors.hpp"

namespace xrdfs {

struct EmbeddingConfig {
  /// Total width; first d/2 columns are source, last d/2 target.
  std::size_t d = 4;
  /// Fixed Katz decay; when empty each layer uses 0.5 / (1 + max row sum).
  std::optional<double> beta;
  /// Singular values at or below this are treated as zero.
  double tolerance = 1e-12;
};

struct LayerEmbedding {
  Eigen::MatrixXd values;
  /// Number of non-zero singular triplets used (< d/2 means zero-filled columns).
  std::size_t rank = 0;
  double beta = 0.0;
};

inline double max_row_sum(const Eigen::MatrixXd& a) {
  return a.rows() == 0 ? 0.0 : a.cwiseAbs().rowwise().sum().maxCoeff();
}

inline double default_beta(const Eigen::MatrixXd& a) { return 0.5 / (1.0 + max_row_sum(a)); }

inline Eigen::MatrixXd to_matrix(const LayerMatrix& layer) {
  const auto n = static_cast<Eigen::Index>(layer.n());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (layer.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j))) a(i, j) = 1.0;
    }
  }
  return a;
}

/// Requires 0 < beta and beta * max_row_sum(a) < 1, which bounds the spectral
/// radius of beta A below one.
inline Eigen::MatrixXd katz_proximity(const Eigen::MatrixXd& a, double beta) {
  if (a.rows() != a.cols()) throw Error("adjacency matrix must be square");
  if (!(beta > 0.0) || !(beta * max_row_sum(a) < 1.0))
    throw DivergentBeta("beta=" + std::to_string(beta) + " with max row sum " + std::to_string(max_row_sum(a)) +
                        " does not converge");
  const auto n = a.rows();
  if (n == 0 || a.isZero(0.0)) return Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) - beta * a;
  return m.partialPivLu().solve(beta * a);
}

inline LayerEmbedding embed_layer(const Eigen::MatrixXd& a, const EmbeddingConfig& cfg) {
  if (cfg.d < 2 || cfg.d % 2 != 0) throw Error("embedding dimension must be even and >= 2");
  const auto n = a.rows();
  const auto half = static_cast<Eigen::Index>(cfg.d / 2);
  LayerEmbedding out;
  out.values = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(cfg.d));
  out.beta = cfg.beta.value_or(default_beta(a));
  Eigen::MatrixXd s = katz_proximity(a, out.beta);
  if (n == 0 || s.isZero(0.0)) return out;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(s, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sigma = svd.singularValues();
  for (Eigen::Index i = 0; i < std::min(half, sigma.size()); ++i) {
    if (!(sigma(i) > cfg.tolerance)) break;
    Eigen::VectorXd u = svd.matrixU().col(i);
    Eigen::VectorXd v = svd.matrixV().col(i);
    Eigen::Index arg = 0;
    u.cwiseAbs().maxCoeff(&arg);
    if (u(arg) < 0) {
      u = -u;
      v = -v;
    }
    const double scale = std::sqrt(sigma(i));
    out.values.col(i) = u * scale;
    out.values.col(half + i) = v * scale;
    ++out.rank;
  }
  return out;
}

inline LayerEmbedding embed_layer(const LayerMatrix& layer, const EmbeddingConfig& cfg) {
  return embed_layer(to_matrix(layer), cfg);
}

/// Frobenius norm of S - U_source U_target^T.
inline double reconstruction_error(const Eigen::MatrixXd& s, const LayerEmbedding& e) {
  const auto half = e.values.cols() / 2;
  Eigen::MatrixXd approx = e.values.leftCols(half) * e.values.rightCols(half).transpose();
  return (s - approx).norm();
}

// Embeddings file: u32 N, u32 d, then one N x d float32 record per word ID,
// row-major, all little-endian.

namespace detail {

inline void put_u32(std::ostream& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw FormatError("truncated embeddings file");
  return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 | std::uint32_t(b[3]) << 24;
}

}  // namespace detail

class EmbeddingWriter {
 public:
  EmbeddingWriter(const std::string& path, std::size_t n, std::size_t d) : out_(path, std::ios::binary), n_(n), d_(d) {
    if (!out_) throw Error("cannot write " + path);
    detail::put_u32(out_, static_cast<std::uint32_t>(n));
    detail::put_u32(out_, static_cast<std::uint32_t>(d));
  }

  void write(const Eigen::MatrixXd& m) {
    if (static_cast<std::size_t>(m.rows()) != n_ || static_cast<std::size_t>(m.cols()) != d_)
      throw FormatError("embedding record has the wrong shape");
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        auto f = static_cast<float>(m(i, j));
        std::uint32_t bits;
        std::memcpy(&bits, &f, sizeof bits);
        detail::put_u32(out_, bits);
      }
    }
    ++records_;
  }

  std::size_t records() const { return records_; }

 private:
  std::ofstream out_;
  std::size_t n_;
  std::size_t d_;
  std::size_t records_ = 0;
};

struct EmbeddingTable {
  std::size_t n = 0;
  std::size_t d = 0;
  /// Record k holds word k, N * d values row-major.
  std::vector<std::vector<float>> records;

  Eigen::MatrixXd matrix(std::size_t word) const {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    const auto& r = records.at(word);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r[i * d + j];
    }
    return m;
  }

  static EmbeddingTable load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    EmbeddingTable t;
    t.n = detail::get_u32(in);
    t.d = detail::get_u32(in);
    const std::size_t width = t.n * t.d;
    while (in.peek() != std::char_traits<char>::eof()) {
      std::vector<float> rec(width);
      for (auto& v : rec) {
        std::uint32_t bits = detail::get_u32(in);
        std::memcpy(&v, &bits, sizeof v);
      }
      t.records.push_back(std::move(rec));
    }
    return t;
  }

  /// Reads only the 8-byte header and derives the record count from the file size.
  static std::pair<std::size_t, std::size_t> header(const std::string& path, std::size_t* count = nullptr) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw Error("cannot open " + path);
    auto size = static_cast<std::size_t>(in.tellg());
    in.seekg(0);
    std::size_t n = detail::get_u32(in);
    std::size_t d = detail::get_u32(in);
    std::size_t rec = n * d * 4;
    if (rec == 0 || (size - 8) % rec != 0) throw FormatError("embeddings file size is not a whole number of records");
    if (count) *count = (size - 8) / rec;
    return {n, d};
  }
};

}  // namespace xrdfs
