#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <vector>

#if defined(__AVX2__)
#include <immintrin.h>
#endif

#include "posegate/descriptors.hpp"
#include "posegate/error.hpp"

namespace posegate {

namespace {

constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

#if defined(__AVX2__) && defined(__FMA__)
#define POSEGATE_AVX2 1
#endif

// Without hardware FMA std::fma is a libm call; every path in a build uses
// the same form, so results stay identical within that build.
inline float MulAdd(float d, float acc) {
#if defined(__FMA__)
  return std::fma(d, d, acc);
#else
  return d * d + acc;
#endif
}

// Lane l accumulates elements k = l (mod 8); lanes are then summed as a fixed
// tree. The blocked kernel below follows the same order so both give
// identical floats.
inline float ReduceLanes(const float* acc) {
  return ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7]));
}

inline void Tail(const float* a, const float* b, std::size_t k, std::size_t dim, float* acc) {
  for (; k < dim; ++k) {
    const float d = a[k] - b[k];
    acc[0] = MulAdd(d, acc[0]);
  }
}

float SquaredL2(const float* a, const float* b, std::size_t dim) {
  alignas(32) float acc[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  std::size_t k = 0;
#ifdef POSEGATE_AVX2
  __m256 v = _mm256_setzero_ps();
  for (; k + 8 <= dim; k += 8) {
    const __m256 d = _mm256_sub_ps(_mm256_loadu_ps(a + k), _mm256_loadu_ps(b + k));
    v = _mm256_fmadd_ps(d, d, v);
  }
  _mm256_store_ps(acc, v);
#else
  for (; k + 8 <= dim; k += 8) {
    for (int l = 0; l < 8; ++l) {
      const float d = a[k + l] - b[k + l];
      acc[l] = MulAdd(d, acc[l]);
    }
  }
#endif
  Tail(a, b, k, dim, acc);
  return ReduceLanes(acc);
}

#ifdef POSEGATE_AVX2
// Squared distances from query rows a0, a1 to train rows b[0..3].
void SquaredL2Block(const float* a0, const float* a1, const float* const* b, std::size_t dim,
                    float* out0, float* out1) {
  __m256 s[2][4];
  for (auto& row : s) {
    for (auto& x : row) x = _mm256_setzero_ps();
  }
  std::size_t k = 0;
  for (; k + 8 <= dim; k += 8) {
    const __m256 q0 = _mm256_loadu_ps(a0 + k);
    const __m256 q1 = _mm256_loadu_ps(a1 + k);
    for (int c = 0; c < 4; ++c) {
      const __m256 t = _mm256_loadu_ps(b[c] + k);
      const __m256 d0 = _mm256_sub_ps(q0, t);
      const __m256 d1 = _mm256_sub_ps(q1, t);
      s[0][c] = _mm256_fmadd_ps(d0, d0, s[0][c]);
      s[1][c] = _mm256_fmadd_ps(d1, d1, s[1][c]);
    }
  }
  alignas(32) float acc[8];
  for (int c = 0; c < 4; ++c) {
    _mm256_store_ps(acc, s[0][c]);
    Tail(a0, b[c], k, dim, acc);
    out0[c] = ReduceLanes(acc);
    _mm256_store_ps(acc, s[1][c]);
    Tail(a1, b[c], k, dim, acc);
    out1[c] = ReduceLanes(acc);
  }
}
#endif

std::uint32_t Hamming(const std::uint8_t* a, const std::uint8_t* b, std::size_t dim) {
  std::uint32_t bits = 0;
  std::size_t k = 0;
  for (; k + 8 <= dim; k += 8) {
    std::uint64_t x;
    std::uint64_t y;
    std::memcpy(&x, a + k, 8);
    std::memcpy(&y, b + k, 8);
    bits += static_cast<std::uint32_t>(std::popcount(x ^ y));
  }
  for (; k < dim; ++k) {
    bits += static_cast<std::uint32_t>(std::popcount(static_cast<unsigned>(a[k] ^ b[k])));
  }
  return bits;
}

// Nearest and second-nearest train rows for one query row. Equal distances
// keep the lower train index as nearest.
struct RowBest {
  std::uint32_t nearest = kNone;
  float d1 = std::numeric_limits<float>::infinity();
  float d2 = std::numeric_limits<float>::infinity();
};

inline void Offer(RowBest& best, std::uint32_t j, float d) {
  if (d < best.d1) {
    best.d2 = best.d1;
    best.d1 = d;
    best.nearest = j;
  } else if (d < best.d2) {
    best.d2 = d;
  }
}

// Distance between query row i and train row j, in the kind's metric.
// Real rows return the squared distance; FinishRow converts.
inline float RawDistance(const DescriptorSet& q, const DescriptorSet& t, std::size_t i,
                         std::size_t j) {
  const std::size_t dim = q.dim();
  if (q.kind() == DescriptorKind::kRealL2) {
    return SquaredL2(q.real_data().data() + i * dim, t.real_data().data() + j * dim, dim);
  }
  return static_cast<float>(
      Hamming(q.binary_data().data() + i * dim, t.binary_data().data() + j * dim, dim));
}

inline RowBest FinishRow(RowBest best, DescriptorKind kind) {
  if (kind == DescriptorKind::kRealL2) {
    best.d1 = std::sqrt(best.d1);
    best.d2 = std::sqrt(best.d2);
  }
  return best;
}

RowBest ScanRow(const DescriptorSet& q, const DescriptorSet& t, std::size_t i) {
  RowBest best;
  for (std::size_t j = 0; j < t.size(); ++j) {
    Offer(best, static_cast<std::uint32_t>(j), RawDistance(q, t, i, j));
  }
  return FinishRow(best, q.kind());
}

// Two query rows at once; same distances and offer order as ScanRow.
void ScanRowPair(const DescriptorSet& q, const DescriptorSet& t, std::size_t i, RowBest* out) {
#ifdef POSEGATE_AVX2
  const std::size_t dim = q.dim();
  const std::size_t m = t.size();
  const float* a0 = q.real_data().data() + i * dim;
  const float* a1 = a0 + dim;
  const float* tb = t.real_data().data();
  RowBest b0;
  RowBest b1;
  std::size_t j = 0;
  for (; j + 4 <= m; j += 4) {
    const float* rows[4] = {tb + j * dim, tb + (j + 1) * dim, tb + (j + 2) * dim, tb + (j + 3) * dim};
    float d0[4];
    float d1[4];
    SquaredL2Block(a0, a1, rows, dim, d0, d1);
    for (int c = 0; c < 4; ++c) {
      Offer(b0, static_cast<std::uint32_t>(j + c), d0[c]);
      Offer(b1, static_cast<std::uint32_t>(j + c), d1[c]);
    }
  }
  for (; j < m; ++j) {
    Offer(b0, static_cast<std::uint32_t>(j), SquaredL2(a0, tb + j * dim, dim));
    Offer(b1, static_cast<std::uint32_t>(j), SquaredL2(a1, tb + j * dim, dim));
  }
  out[0] = FinishRow(b0, DescriptorKind::kRealL2);
  out[1] = FinishRow(b1, DescriptorKind::kRealL2);
#else
  out[0] = ScanRow(q, t, i);
  out[1] = ScanRow(q, t, i + 1);
#endif
}

void CheckInputs(const DescriptorSet& q, const DescriptorSet& t, const MatcherConfig& cfg) {
  ValidateMatcherConfig(cfg);
  if (q.kind() != t.kind()) {
    throw Error(ErrorCode::kKindMismatch, "descriptor kinds differ: " + q.image_id() +
                                              " vs " + t.image_id());
  }
  if (!q.empty() && !t.empty() && q.dim() != t.dim()) {
    throw Error(ErrorCode::kKindMismatch, "descriptor dimensions differ: " + q.image_id() +
                                              " vs " + t.image_id());
  }
}

// Index of the nearest query row for every train row (lowest index on ties).
std::vector<std::uint32_t> ColumnNearest(const std::vector<float>& matrix, std::size_t rows,
                                         std::size_t cols) {
  std::vector<std::uint32_t> nearest(cols, kNone);
  std::vector<float> best(cols, std::numeric_limits<float>::infinity());
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const float d = matrix[i * cols + j];
      if (d < best[j]) {
        best[j] = d;
        nearest[j] = static_cast<std::uint32_t>(i);
      }
    }
  }
  return nearest;
}

MatchReport Collect(const std::vector<RowBest>& rows, std::size_t train_size,
                    const MatcherConfig& cfg, const std::vector<std::uint32_t>* column_nearest) {
  MatchReport report;
  if (train_size < 2) return report;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const RowBest& b = rows[i];
    if (b.nearest == kNone) continue;
    if (!(static_cast<double>(b.d1) < cfg.ratio * static_cast<double>(b.d2))) continue;
    if (column_nearest != nullptr && (*column_nearest)[b.nearest] != i) continue;
    report.pairs.push_back({static_cast<std::uint32_t>(i), b.nearest, b.d1});
  }
  report.good_match_count = report.pairs.size();
  return report;
}

MatchReport Match(const DescriptorSet& q, const DescriptorSet& t, const MatcherConfig& cfg,
                  bool parallel) {
  CheckInputs(q, t, cfg);
  const std::size_t n = q.size();
  const std::size_t m = t.size();
  std::vector<RowBest> rows(n);
  if (n == 0 || m < 2) return {};

  if (!cfg.cross_check) {
    if (!parallel) {
      for (std::size_t i = 0; i < n; ++i) rows[i] = ScanRow(q, t, i);
      return Collect(rows, m, cfg, nullptr);
    }
    const bool blocked = q.kind() == DescriptorKind::kRealL2;
    const long long count = static_cast<long long>(blocked ? n / 2 : n);
#ifdef POSEGATE_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long ii = 0; ii < count; ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      if (blocked) {
        ScanRowPair(q, t, 2 * i, &rows[2 * i]);
      } else {
        rows[i] = ScanRow(q, t, i);
      }
    }
    if (blocked && n % 2 == 1) rows[n - 1] = ScanRow(q, t, n - 1);
    return Collect(rows, m, cfg, nullptr);
  }

  std::vector<float> matrix(n * m);
  const long long count = static_cast<long long>(n);
#ifdef POSEGATE_HAVE_OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
  for (long long ii = 0; ii < count; ++ii) {
    const std::size_t i = static_cast<std::size_t>(ii);
    RowBest best;
    for (std::size_t j = 0; j < m; ++j) {
      const float d = RawDistance(q, t, i, j);
      matrix[i * m + j] = d;
      Offer(best, static_cast<std::uint32_t>(j), d);
    }
    rows[i] = FinishRow(best, q.kind());
  }
  const std::vector<std::uint32_t> column_nearest = ColumnNearest(matrix, n, m);
  return Collect(rows, m, cfg, &column_nearest);
}

}  // namespace

float L2Distance(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::kKindMismatch, "L2 dimension mismatch");
  return std::sqrt(SquaredL2(a.data(), b.data(), a.size()));
}

std::uint32_t HammingDistance(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::kKindMismatch, "Hamming dimension mismatch");
  return Hamming(a.data(), b.data(), a.size());
}

MatchReport MatchFeatures(const DescriptorSet& query, const DescriptorSet& train,
                          const MatcherConfig& cfg) {
  return Match(query, train, cfg, true);
}

namespace reference {

MatchReport MatchFeatures(const DescriptorSet& query, const DescriptorSet& train,
                          const MatcherConfig& cfg) {
  return Match(query, train, cfg, false);
}

}  // namespace reference

}  // namespace posegate
