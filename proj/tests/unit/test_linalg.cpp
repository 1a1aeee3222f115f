#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include "ifsm/errors.hpp"
#include "ifsm/linalg.hpp"

using namespace ifsm;
using namespace ifsm::linalg;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> dist;
  Matrix a(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) a(i, j) = dist(gen);
  return a;
}

Matrix random_symmetric(std::size_t n, unsigned seed) {
  Matrix a = random_matrix(n, n, seed);
  a.symmetrize();
  return a;
}

Matrix naive_product(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j)
      for (std::size_t k = 0; k < a.cols(); ++k) c(i, j) += a(i, k) * b(k, j);
  return c;
}

Matrix diag_of(const std::vector<double>& v) { return Matrix::from_diagonal(DiagonalMatrix(v)); }

double orthonormality_defect(const Matrix& q) {
  return (naive_product(q.transpose(), q) - Matrix::identity(q.cols())).frobenius_norm();
}

Eigen::MatrixXd to_eigen(const Matrix& a) {
  Eigen::MatrixXd e(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) e(i, j) = a(i, j);
  return e;
}

// Sort complex values by (real, imag) so two unordered spectra can be paired.
std::vector<std::complex<double>> sorted(std::vector<std::complex<double>> v) {
  std::sort(v.begin(), v.end(), [](auto a, auto b) {
    if (std::abs(a.real() - b.real()) > 1e-9) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return v;
}

}  // namespace

TEST(SymEig, Identity) {
  const SymEig e = sym_eig(Matrix::identity(3));
  for (double v : e.values) EXPECT_DOUBLE_EQ(v, 1.0);
  EXPECT_LT(orthonormality_defect(e.vectors), 1e-14);
}

TEST(SymEig, DiagonalGivesCoordinateVectors) {
  const SymEig e = sym_eig(Matrix::from_diagonal(DiagonalMatrix{1.0, 3.0, 2.0}));
  EXPECT_EQ(e.values, (std::vector<double>{3.0, 2.0, 1.0}));
  const std::size_t axis[] = {1, 2, 0};
  for (std::size_t c = 0; c < 3; ++c) EXPECT_DOUBLE_EQ(std::abs(e.vectors(axis[c], c)), 1.0);
}

TEST(SymEig, ReconstructsRandom8x8) {
  const Matrix a = random_symmetric(8, 11);
  const SymEig e = sym_eig(a);
  const Matrix rec = naive_product(naive_product(e.vectors, diag_of(e.values)), e.vectors.transpose());
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) EXPECT_NEAR(rec(i, j), a(i, j), 1e-10);
  EXPECT_LT(orthonormality_defect(e.vectors), 1e-12);
  EXPECT_TRUE(std::is_sorted(e.values.rbegin(), e.values.rend()));
}

TEST(SymEig, EigenpairResidual) {
  const Matrix a = random_symmetric(20, 12);
  const SymEig e = sym_eig(a);
  for (std::size_t c = 0; c < 20; ++c) {
    const Vector v = e.vectors.column(c);
    Vector r = a * v;
    r -= e.values[c] * v;
    EXPECT_LT(r.norm(), 10 * 1e-12 * a.frobenius_norm());
  }
}

TEST(SymEig, MatchesEigenSolverValues) {
  const Matrix a = random_symmetric(15, 13);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(to_eigen(a));
  const SymEig e = sym_eig(a);
  for (std::size_t i = 0; i < 15; ++i) EXPECT_NEAR(e.values[i], ref.eigenvalues()(14 - static_cast<int>(i)), 1e-12);
}

TEST(SymEig, RejectsAsymmetric) {
  EXPECT_THROW(sym_eig(Matrix{{1, 2}, {0, 1}}), NotSymmetric);
  EXPECT_THROW(sym_eig(Matrix(2, 3)), ShapeMismatch);
}

TEST(SymEig, PropertyReconstructionAcrossSizes) {
  for (unsigned seed = 0; seed < 40; ++seed) {
    const std::size_t n = 1 + seed % 12;
    Matrix a = random_symmetric(n, 100 + seed);
    a *= 10.0 / std::max(1.0, a.frobenius_norm());
    const SymEig e = sym_eig(a);
    const Matrix rec = naive_product(naive_product(e.vectors, diag_of(e.values)), e.vectors.transpose());
    EXPECT_LE((rec - a).frobenius_norm(), 1e-9);
  }
}

TEST(Svd, ZeroMatrix) {
  const Svd d = svd_small(Matrix(3, 2));
  for (double s : d.s) EXPECT_EQ(s, 0.0);
  EXPECT_LT(orthonormality_defect(d.u), 1e-12);
  EXPECT_LT(orthonormality_defect(d.v), 1e-12);
}

TEST(Svd, Diagonal) {
  const Svd d = svd_small(Matrix{{2, 0}, {0, 1}});
  EXPECT_DOUBLE_EQ(d.s[0], 2.0);
  EXPECT_DOUBLE_EQ(d.s[1], 1.0);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_DOUBLE_EQ(std::abs(d.u(i, i)), 1.0);
    EXPECT_DOUBLE_EQ(std::abs(d.v(i, i)), 1.0);
  }
}

TEST(Svd, Random4x3Reconstruction) {
  const Matrix a = random_matrix(4, 3, 21);
  const Svd d = svd_small(a);
  const Matrix rec = naive_product(naive_product(d.u, diag_of(d.s)), d.v.transpose());
  EXPECT_LT((rec - a).frobenius_norm(), 1e-10 * a.frobenius_norm());
  EXPECT_LT(orthonormality_defect(d.u), 1e-12);
  EXPECT_LT(orthonormality_defect(d.v), 1e-12);
}

TEST(Svd, MatchesEigenSingularValues) {
  for (unsigned seed = 0; seed < 10; ++seed) {
    const Matrix a = random_matrix(3 + seed % 5, 2 + seed % 4, 30 + seed);
    Eigen::JacobiSVD<Eigen::MatrixXd> ref(to_eigen(a));
    const Svd d = svd_small(a);
    ASSERT_EQ(d.s.size(), static_cast<std::size_t>(ref.singularValues().size()));
    for (std::size_t i = 0; i < d.s.size(); ++i) EXPECT_NEAR(d.s[i], ref.singularValues()(static_cast<int>(i)), 1e-12);
  }
}

TEST(Svd, RankDeficientAndWide) {
  Matrix a = random_matrix(5, 3, 40);
  a.set_column(2, a.column(0));
  const Svd d = svd_small(a);
  EXPECT_NEAR(d.s[2], 0.0, 1e-12);
  EXPECT_LT(orthonormality_defect(d.u), 1e-12);
  EXPECT_LT((naive_product(naive_product(d.u, diag_of(d.s)), d.v.transpose()) - a).frobenius_norm(), 1e-10);

  const Matrix wide = random_matrix(2, 6, 41);
  const Svd w = svd_small(wide);
  EXPECT_EQ(w.u.rows(), 2u);
  EXPECT_EQ(w.v.rows(), 6u);
  EXPECT_LT((naive_product(naive_product(w.u, diag_of(w.s)), w.v.transpose()) - wide).frobenius_norm(), 1e-10);
}

TEST(Svd, RejectsOversize) { EXPECT_THROW(svd_small(Matrix(65, 2)), ShapeMismatch); }

TEST(Svd, NuclearNorm) {
  EXPECT_DOUBLE_EQ(nuclear_norm(Matrix{{3, 0}, {0, -4}}), 7.0);
  const Matrix a = random_matrix(4, 4, 42);
  Eigen::JacobiSVD<Eigen::MatrixXd> ref(to_eigen(a));
  EXPECT_NEAR(nuclear_norm(a), ref.singularValues().sum(), 1e-12);
}

TEST(Qr, Identity) {
  const Qr d = qr(Matrix::identity(4));
  EXPECT_EQ(d.q, Matrix::identity(4));
  EXPECT_EQ(d.r, Matrix::identity(4));
}

TEST(Qr, SingleColumn) {
  const Qr d = qr(Matrix{{3}, {4}});
  EXPECT_NEAR(d.q(0, 0), 0.6, 1e-15);
  EXPECT_NEAR(d.q(1, 0), 0.8, 1e-15);
  EXPECT_NEAR(d.r(0, 0), 5.0, 1e-15);
}

TEST(Qr, RandomGaussian) {
  const Matrix a = random_matrix(10, 10, 50);
  const Qr d = qr(a);
  EXPECT_LT(orthonormality_defect(d.q), 1e-12);
  EXPECT_LT((naive_product(d.q, d.r) - a).frobenius_norm(), 1e-12 * a.frobenius_norm());
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_GE(d.r(i, i), 0.0);
    for (std::size_t j = 0; j < i; ++j) EXPECT_EQ(d.r(i, j), 0.0);
  }
}

TEST(Qr, DeterministicAndTall) {
  const Matrix a = random_matrix(9, 4, 51);
  const Qr first = qr(a);
  const Qr second = qr(a);
  EXPECT_EQ(first.q, second.q);
  EXPECT_EQ(first.q.rows(), 9u);
  EXPECT_EQ(first.q.cols(), 4u);
  EXPECT_LT((naive_product(first.q, first.r) - a).frobenius_norm(), 1e-12 * a.frobenius_norm());
}

TEST(Qr, RankDeficient) {
  Matrix a = random_matrix(5, 3, 52);
  a.set_column(1, a.column(0));
  EXPECT_THROW(qr(a), RankDeficient);
  EXPECT_THROW(qr(Matrix(3, 2)), RankDeficient);
  EXPECT_THROW(qr(Matrix(2, 3, 1.0)), ShapeMismatch);
}

TEST(SolveSymmetric, Identity) {
  const Vector b{1.5, -2.0, 0.25};
  EXPECT_EQ(solve_symmetric(Matrix::identity(3), b), b);
}

TEST(SolveSymmetric, Diagonal) {
  const Vector x = solve_symmetric(Matrix{{2, 0}, {0, 4}}, Vector{2.0, 4.0});
  EXPECT_DOUBLE_EQ(x[0], 1.0);
  EXPECT_DOUBLE_EQ(x[1], 1.0);
}

TEST(SolveSymmetric, RandomSpdResidual) {
  const Matrix r = random_matrix(5, 5, 60);
  Matrix m = naive_product(r, r.transpose()) + Matrix::identity(5);
  m.symmetrize();
  const Vector b{1.0, -1.0, 2.0, 0.5, 3.0};
  const Vector x = solve_symmetric(m, b);
  Vector res = m * x;
  res -= b;
  EXPECT_LT(res.norm(), 1e-10);
}

TEST(SolveSymmetric, IndefiniteNeedsPivoting) {
  const Vector x = solve_symmetric(Matrix{{0, 1}, {1, 0}}, Vector{2.0, 3.0});
  EXPECT_DOUBLE_EQ(x[0], 3.0);
  EXPECT_DOUBLE_EQ(x[1], 2.0);
}

TEST(SolveSymmetric, MultipleRightHandSides) {
  const Matrix m{{4, 1}, {1, 3}};
  const Matrix b{{1, 0, 2}, {0, 1, 1}};
  const Matrix x = solve_symmetric(m, b);
  EXPECT_LT((naive_product(m, x) - b).frobenius_norm(), 1e-14);
}

TEST(SolveSymmetric, Errors) {
  EXPECT_THROW(solve_symmetric(Matrix{{1, 1}, {1, 1}}, Vector{1.0, 1.0}), SingularMatrix);
  EXPECT_THROW(solve_symmetric(Matrix{{1, 2}, {0, 1}}, Vector{1.0, 1.0}), NotSymmetric);
  EXPECT_THROW(solve_symmetric(Matrix::identity(2), Vector{1.0}), ShapeMismatch);
}

TEST(SolveSymmetric, AgreesWithEigenInverse) {
  for (unsigned seed = 0; seed < 10; ++seed) {
    Matrix m = random_symmetric(10, 70 + seed);
    m += 10.0 * Matrix::identity(10);
    m.symmetrize();
    const Vector b = random_matrix(10, 1, 80 + seed).column(0);
    const SymEig e = sym_eig(m);
    std::vector<double> inv(e.values.size());
    for (std::size_t i = 0; i < inv.size(); ++i) inv[i] = 1.0 / e.values[i];
    const Matrix m_inv = naive_product(naive_product(e.vectors, diag_of(inv)), e.vectors.transpose());
    EXPECT_LT((solve_symmetric(m, b) - m_inv * b).norm(), 1e-9);
  }
}

TEST(GeneralEigenvalues, KnownSmallCases) {
  auto ev = sorted(eigenvalues(Matrix{{0, -1}, {1, 0}}));
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_NEAR(ev[0].real(), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(ev[0].imag()), 1.0, 1e-14);
  ev = sorted(eigenvalues(Matrix{{2, 1}, {0, 3}}));
  EXPECT_NEAR(ev[0].real(), 2.0, 1e-14);
  EXPECT_NEAR(ev[1].real(), 3.0, 1e-14);
  EXPECT_EQ(eigenvalues(Matrix{{-5}})[0], std::complex<double>(-5.0, 0.0));
}

TEST(GeneralEigenvalues, MatchEigenOnRandomNonsymmetric) {
  for (unsigned seed = 0; seed < 20; ++seed) {
    const std::size_t n = 3 + seed * 2;
    const Matrix a = random_matrix(n, n, 90 + seed);
    Eigen::EigenSolver<Eigen::MatrixXd> ref(to_eigen(a), false);
    std::vector<std::complex<double>> expected(ref.eigenvalues().data(), ref.eigenvalues().data() + n);
    const auto got = sorted(eigenvalues(a));
    expected = sorted(expected);
    ASSERT_EQ(got.size(), n);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(got[i].real(), expected[i].real(), 1e-9) << "n=" << n;
      EXPECT_NEAR(got[i].imag(), expected[i].imag(), 1e-9) << "n=" << n;
    }
  }
}

TEST(GeneralEigenvalues, SymmetricAgreesWithJacobi) {
  const Matrix a = random_symmetric(30, 120);
  std::vector<double> re;
  for (auto z : eigenvalues(a)) {
    EXPECT_NEAR(z.imag(), 0.0, 1e-10);
    re.push_back(z.real());
  }
  std::sort(re.rbegin(), re.rend());
  const SymEig e = sym_eig(a);
  for (std::size_t i = 0; i < re.size(); ++i) EXPECT_NEAR(re[i], e.values[i], 1e-10);
}

// Diagonalizable but heavily clustered, the shape of a flow Jacobian whose
// complement directions share a handful of rates.
TEST(GeneralEigenvalues, ClusteredSpectrumConverges) {
  for (unsigned seed = 0; seed < 10; ++seed) {
    const std::vector<double> rates = {-0.6, -0.7333333333333333, -0.8, -2.5, 0.1};
    std::vector<double> d;
    for (double r : rates)
      for (int rep = 0; rep < 7; ++rep) d.push_back(r);
    const std::size_t n = d.size();
    Eigen::MatrixXd s = Eigen::MatrixXd::Identity(n, n) + 0.3 * to_eigen(random_matrix(n, n, 300 + seed)) / std::sqrt(n);
    const Eigen::MatrixXd e = s * Eigen::Map<Eigen::VectorXd>(d.data(), n).asDiagonal() * s.inverse();
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) a(i, j) = e(i, j);
    std::vector<std::complex<double>> got;
    ASSERT_NO_THROW(got = eigenvalues(a)) << "seed=" << seed;
    std::vector<double> re;
    for (auto z : got) {
      EXPECT_NEAR(z.imag(), 0.0, 1e-6);
      re.push_back(z.real());
    }
    std::sort(re.begin(), re.end());
    std::sort(d.begin(), d.end());
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(re[i], d[i], 1e-6) << "seed=" << seed;
  }
}
