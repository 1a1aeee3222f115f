#include "ifsm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ifsm/errors.hpp"

namespace ifsm::linalg {

namespace {

constexpr int kJacobiSweepCap = 100;

void require_square(const Matrix& a, const char* op) {
  if (!a.is_square()) {
    throw ShapeMismatch(std::string(op) + ": expected a square matrix, got " +
                        std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
}

void require_finite(const Matrix& a, const char* op) {
  if (!a.all_finite()) throw NonFinite(std::string(op) + ": non-finite input");
}

// Applies the plane rotation [c -s; s c] to columns p and q of v.
void rotate_columns(Matrix& v, std::size_t p, std::size_t q, double c, double s) {
  for (std::size_t k = 0; k < v.rows(); ++k) {
    const double vkp = v(k, p);
    const double vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

std::vector<std::size_t> descending_order(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return values[i] > values[j]; });
  return order;
}

// Orthogonalizes `u` against the first `count` columns of `basis` (twice, for
// stability) and returns the residual norm.
double orthogonalize_against(Vector& u, const Matrix& basis, std::size_t count) {
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t j = 0; j < count; ++j) {
      double proj = 0.0;
      for (std::size_t i = 0; i < u.dim(); ++i) proj += basis(i, j) * u[i];
      for (std::size_t i = 0; i < u.dim(); ++i) u[i] -= proj * basis(i, j);
    }
  }
  return u.norm();
}

}  // namespace

// ---------------------------------------------------------------- sym_eig

SymEig sym_eig(const Matrix& a, double tol) {
  require_square(a, "sym_eig");
  require_finite(a, "sym_eig");
  if (!(tol > 0.0)) throw std::invalid_argument("sym_eig: tol must be positive");

  const std::size_t n = a.rows();
  const double norm = a.frobenius_norm();
  if (a.asymmetry() > tol * norm) {
    throw NotSymmetric("sym_eig: ‖a − aᵀ‖ = " + std::to_string(a.asymmetry()) +
                       " exceeds tol·‖a‖");
  }

  Matrix w = a;
  w.symmetrize();
  Matrix v = Matrix::identity(n);

  bool converged = n <= 1 || norm == 0.0;
  for (int sweep = 0; sweep < kJacobiSweepCap && !converged; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += w(p, q) * w(p, q);
    if (off == 0.0 || std::sqrt(2.0 * off) <= 1e-17 * norm) {
      converged = true;
      break;
    }

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = w(p, q);
        if (apq == 0.0) continue;
        const double app = w(p, p);
        const double aqq = w(q, q);
        // Past the first few sweeps an entry that cannot change either
        // diagonal value in floating point is dropped.
        const double g = 100.0 * std::abs(apq);
        if (sweep > 3 && std::abs(app) + g == std::abs(app) && std::abs(aqq) + g == std::abs(aqq)) {
          w(p, q) = 0.0;
          w(q, p) = 0.0;
          continue;
        }

        const double h = aqq - app;
        double t;
        if (std::abs(h) + g == std::abs(h)) {
          t = apq / h;
        } else {
          const double theta = 0.5 * h / apq;
          t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = w(k, p);
          const double akq = w(k, q);
          const double new_kp = c * akp - s * akq;
          const double new_kq = s * akp + c * akq;
          w(k, p) = new_kp;
          w(p, k) = new_kp;
          w(k, q) = new_kq;
          w(q, k) = new_kq;
        }
        w(p, p) = app - t * apq;
        w(q, q) = aqq + t * apq;
        w(p, q) = 0.0;
        w(q, p) = 0.0;
        rotate_columns(v, p, q, c, s);
      }
    }
  }
  if (!converged) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += w(p, q) * w(p, q);
    if (off != 0.0 && std::sqrt(2.0 * off) > 1e-17 * norm) {
      throw NoConvergence("sym_eig: Jacobi sweep cap reached");
    }
  }

  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = w(i, i);
  const auto order = descending_order(diag);

  SymEig out{std::vector<double>(n), Matrix(n, n)};
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = diag[order[j]];
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
  }
  return out;
}

// ---------------------------------------------------------------- svd

Svd svd_small(const Matrix& a) {
  require_finite(a, "svd_small");
  if (a.rows() > kSvdMaxDim || a.cols() > kSvdMaxDim) {
    throw ShapeMismatch("svd_small: at most 64 rows and columns supported");
  }
  if (a.rows() < a.cols()) {
    Svd t = svd_small(a.transpose());
    return Svd{std::move(t.v), std::move(t.s), std::move(t.u)};
  }

  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  const double norm = a.frobenius_norm();

  // Right singular vectors from the Gram matrix; singular values from ‖a·v‖,
  // which keeps small values accurate to eps·‖a‖ rather than sqrt(eps)·‖a‖.
  const SymEig gram = sym_eig(transposed_multiply(a, a), 1e-10);
  const Matrix av = a * gram.vectors;
  std::vector<double> s(n);
  for (std::size_t j = 0; j < n; ++j) {
    double ss = 0.0;
    for (std::size_t i = 0; i < m; ++i) ss += av(i, j) * av(i, j);
    s[j] = std::sqrt(ss);
  }
  const auto order = descending_order(s);

  Svd out{Matrix(m, n), std::vector<double>(n), Matrix(n, n)};
  const double zero_floor = 1e-14 * norm;
  std::size_t built = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = order[j];
    for (std::size_t i = 0; i < n; ++i) out.v(i, j) = gram.vectors(i, src);
    double sj = s[src];
    if (norm == 0.0 || sj <= zero_floor) sj = 0.0;
    out.s[j] = sj;
    if (sj > 0.0) {
      Vector u(m);
      for (std::size_t i = 0; i < m; ++i) u[i] = av(i, src) / sj;
      const double r = orthogonalize_against(u, out.u, built);
      u *= 1.0 / r;
      out.u.set_column(j, u);
      ++built;
    }
  }

  // Complete u for zero singular values with the coordinate vector that
  // retains the most weight after orthogonalization.
  for (std::size_t j = built; j < n; ++j) {
    Vector best;
    double best_norm = -1.0;
    for (std::size_t e = 0; e < m; ++e) {
      Vector cand(m);
      cand[e] = 1.0;
      const double r = orthogonalize_against(cand, out.u, j);
      if (r > best_norm + 1e-12) {
        best_norm = r;
        best = std::move(cand);
      }
    }
    best *= 1.0 / best_norm;
    out.u.set_column(j, best);
  }
  return out;
}

double nuclear_norm(const Matrix& a) {
  const Svd d = svd_small(a);
  return std::accumulate(d.s.begin(), d.s.end(), 0.0);
}

// ---------------------------------------------------------------- qr

Qr qr(const Matrix& a) {
  require_finite(a, "qr");
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (m < n) throw ShapeMismatch("qr: requires rows >= cols");

  const double norm = a.frobenius_norm();
  Matrix r = a;
  std::vector<Vector> reflectors;
  reflectors.reserve(n);

  for (std::size_t k = 0; k < n; ++k) {
    Vector v(m - k);
    for (std::size_t i = k; i < m; ++i) v[i - k] = r(i, k);
    const double alpha = v.norm();
    if (alpha == 0.0) {
      reflectors.emplace_back(m - k);
      continue;
    }
    v[0] += (v[0] >= 0.0 ? alpha : -alpha);
    v *= 1.0 / v.norm();
    for (std::size_t j = k; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t i = k; i < m; ++i) dot += v[i - k] * r(i, j);
      for (std::size_t i = k; i < m; ++i) r(i, j) -= 2.0 * dot * v[i - k];
    }
    for (std::size_t i = k + 1; i < m; ++i) r(i, k) = 0.0;
    reflectors.push_back(std::move(v));
  }

  // Q = H_0 H_1 ... H_{n-1} applied to the first n columns of the identity.
  Matrix q(m, n);
  for (std::size_t j = 0; j < n; ++j) q(j, j) = 1.0;
  for (std::size_t kk = n; kk-- > 0;) {
    const Vector& v = reflectors[kk];
    for (std::size_t j = 0; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t i = kk; i < m; ++i) dot += v[i - kk] * q(i, j);
      if (dot == 0.0) continue;
      for (std::size_t i = kk; i < m; ++i) q(i, j) -= 2.0 * dot * v[i - kk];
    }
  }

  Qr out{std::move(q), Matrix(n, n)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) out.r(i, j) = r(i, j);

  for (std::size_t i = 0; i < n; ++i) {
    if (!(std::abs(out.r(i, i)) >= 1e-14 * norm) || norm == 0.0) {
      throw RankDeficient("qr: |r_" + std::to_string(i) + std::to_string(i) +
                          "| below 1e-14·‖a‖");
    }
    if (out.r(i, i) < 0.0) {
      for (std::size_t j = i; j < n; ++j) out.r(i, j) = -out.r(i, j);
      for (std::size_t k = 0; k < m; ++k) out.q(k, i) = -out.q(k, i);
    }
  }
  return out;
}

// ---------------------------------------------------------------- solve

Matrix solve_symmetric(const Matrix& m, const Matrix& b) {
  require_square(m, "solve_symmetric");
  require_finite(m, "solve_symmetric");
  require_finite(b, "solve_symmetric");
  if (b.rows() != m.rows()) throw ShapeMismatch("solve_symmetric: rhs row count mismatch");

  const std::size_t n = m.rows();
  const double norm = m.frobenius_norm();
  if (m.asymmetry() > 1e-10 * norm) throw NotSymmetric("solve_symmetric: matrix not symmetric");

  Matrix lu = m;
  Matrix x = b;
  const double pivot_floor = 1e-14 * norm;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(lu(i, k)) > std::abs(lu(piv, k))) piv = i;
    if (!(std::abs(lu(piv, k)) >= pivot_floor) || norm == 0.0) {
      throw SingularMatrix("solve_symmetric: pivot below 1e-14·‖m‖ at column " +
                           std::to_string(k));
    }
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
      for (std::size_t j = 0; j < x.cols(); ++j) std::swap(x(k, j), x(piv, j));
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = lu(i, k) / lu(k, k);
      if (f == 0.0) continue;
      for (std::size_t j = k; j < n; ++j) lu(i, j) -= f * lu(k, j);
      for (std::size_t j = 0; j < x.cols(); ++j) x(i, j) -= f * x(k, j);
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      double s = x(k, j);
      for (std::size_t i = k + 1; i < n; ++i) s -= lu(k, i) * x(i, j);
      x(k, j) = s / lu(k, k);
    }
  }
  return x;
}

Vector solve_symmetric(const Matrix& m, const Vector& b) {
  Matrix rhs(b.dim(), 1);
  for (std::size_t i = 0; i < b.dim(); ++i) rhs(i, 0) = b[i];
  return solve_symmetric(m, rhs).column(0);
}

// ---------------------------------------------------------------- eigenvalues

namespace {

void reduce_to_hessenberg(Matrix& a) {
  const std::size_t n = a.rows();
  if (n < 3) return;
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t len = n - k - 1;
    Vector v(len);
    for (std::size_t i = 0; i < len; ++i) v[i] = a(k + 1 + i, k);
    const double alpha = v.norm();
    if (alpha == 0.0) continue;
    v[0] += (v[0] >= 0.0 ? alpha : -alpha);
    const double vn = v.norm();
    if (vn == 0.0) continue;
    v *= 1.0 / vn;
    // Left: rows k+1.. of all columns k..
    for (std::size_t j = k; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t i = 0; i < len; ++i) dot += v[i] * a(k + 1 + i, j);
      for (std::size_t i = 0; i < len; ++i) a(k + 1 + i, j) -= 2.0 * dot * v[i];
    }
    // Right: columns k+1.. of all rows.
    for (std::size_t i = 0; i < n; ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < len; ++j) dot += a(i, k + 1 + j) * v[j];
      for (std::size_t j = 0; j < len; ++j) a(i, k + 1 + j) -= 2.0 * dot * v[j];
    }
    for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
  }
}

double sign_of(double magnitude, double sign_source) {
  return sign_source >= 0.0 ? std::abs(magnitude) : -std::abs(magnitude);
}

// Francis double-shift QR on an upper Hessenberg matrix (eigenvalues only).
std::vector<std::complex<double>> hessenberg_qr(Matrix& a) {
  const int n = static_cast<int>(a.rows());
  std::vector<std::complex<double>> out(static_cast<std::size_t>(n));
  constexpr double eps = std::numeric_limits<double>::epsilon();

  double anorm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));

  const int max_its = 30 * std::max(n, 10);
  int nn = n - 1;
  double t = 0.0;  // accumulated exceptional shifts
  while (nn >= 0) {
    int its = 0;
    int l;
    do {
      for (l = nn; l > 0; --l) {
        double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(a(l, l - 1)) <= eps * s) {
          a(l, l - 1) = 0.0;
          break;
        }
      }
      double x = a(nn, nn);
      if (l == nn) {
        out[nn] = {x + t, 0.0};
        --nn;
      } else {
        double y = a(nn - 1, nn - 1);
        double w = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {
          const double p = 0.5 * (y - x);
          const double q = p * p + w;
          double z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + sign_of(z, p);
            const double hi = x + z;
            const double lo = z != 0.0 ? x - w / z : hi;
            out[nn - 1] = {hi, 0.0};
            out[nn] = {lo, 0.0};
          } else {
            out[nn - 1] = {x + p, z};
            out[nn] = {x + p, -z};
          }
          nn -= 2;
        } else {
          // Clustered spectra (common in flow Jacobians) can stall the
          // standard shift, so kick it every ten sweeps.
          if (its == max_its) throw NoConvergence("eigenvalues: QR iteration cap reached");
          if (its > 0 && its % 10 == 0) {
            t += x;
            for (int i = 0; i <= nn; ++i) a(i, i) -= x;
            const double s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
            x = 0.75 * s;
            y = x;
            w = -0.4375 * s * s;
          }
          ++its;
          int m;
          double p = 0.0, q = 0.0, r = 0.0, z;
          for (m = nn - 2; m >= l; --m) {
            z = a(m, m);
            r = x - z;
            const double s0 = y - z;
            p = (r * s0 - w) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - r - s0;
            r = a(m + 2, m + 1);
            const double s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v =
                std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
            if (u <= eps * v) break;
          }
          for (int i = m; i < nn - 1; ++i) {
            a(i + 2, i) = 0.0;
            if (i != m) a(i + 2, i - 1) = 0.0;
          }
          for (int k = m; k < nn; ++k) {
            if (k != m) {
              p = a(k, k - 1);
              q = a(k + 1, k - 1);
              r = 0.0;
              if (k + 1 != nn) r = a(k + 2, k - 1);
              x = std::abs(p) + std::abs(q) + std::abs(r);
              if (x != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            const double s = sign_of(std::sqrt(p * p + q * q + r * r), p);
            if (s != 0.0) {
              if (k == m) {
                if (l != m) a(k, k - 1) = -a(k, k - 1);
              } else {
                a(k, k - 1) = -s * x;
              }
              p += s;
              x = p / s;
              y = q / s;
              z = r / s;
              q /= p;
              r /= p;
              for (int j = k; j <= nn; ++j) {
                p = a(k, j) + q * a(k + 1, j);
                if (k + 1 != nn) {
                  p += r * a(k + 2, j);
                  a(k + 2, j) -= p * z;
                }
                a(k + 1, j) -= p * y;
                a(k, j) -= p * x;
              }
              const int mmin = nn < k + 3 ? nn : k + 3;
              for (int i = l; i <= mmin; ++i) {
                p = x * a(i, k) + y * a(i, k + 1);
                if (k + 1 != nn) {
                  p += z * a(i, k + 2);
                  a(i, k + 2) -= p * r;
                }
                a(i, k + 1) -= p * q;
                a(i, k) -= p;
              }
            }
          }
        }
      }
    } while (l + 1 < nn);
  }
  return out;
}

}  // namespace

std::vector<std::complex<double>> eigenvalues(const Matrix& a) {
  require_square(a, "eigenvalues");
  require_finite(a, "eigenvalues");
  if (a.rows() == 0) return {};
  Matrix h = a;
  reduce_to_hessenberg(h);
  return hessenberg_qr(h);
}

}  // namespace ifsm::linalg
