#include "tiltcert/random.hpp"

namespace tiltcert {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer over the combined value
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Vec random_normal(Rng& rng, int n) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = nd(rng);
  return v;
}

Vec random_unit(Rng& rng, int n) {
  Vec v = random_normal(rng, n);
  const double s = v.norm();
  return s > 0 ? Vec(v / s) : v;
}

Mat random_orthogonal(Rng& rng, int n) {
  Mat g(n, n);
  for (int j = 0; j < n; ++j) g.col(j) = random_normal(rng, n);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ() * Mat::Identity(n, n);
  const Mat r = qr.matrixQR();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

SymMatrix random_symmetric(Rng& rng, int n) {
  Mat g(n, n);
  for (int j = 0; j < n; ++j) g.col(j) = random_normal(rng, n);
  return SymMatrix(Mat(0.5 * (g + g.transpose())));
}

double uniform(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  return u(rng);
}

}  // namespace tiltcert
