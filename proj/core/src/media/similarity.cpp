#include "natalia/media/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "natalia/common/error.hpp"

namespace natalia::media {
namespace {

void require_same_size(const GrayFrame& a, const GrayFrame& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                    " vs " + std::to_string(b.width()) + "x" +
                    std::to_string(b.height()));
  }
}

std::vector<double> gaussian_kernel(int size, double sigma) {
  std::vector<double> k(static_cast<std::size_t>(size));
  const double centre = (size - 1) / 2.0;
  double sum = 0.0;
  for (int i = 0; i < size; ++i) {
    const double d = i - centre;
    k[static_cast<std::size_t>(i)] = std::exp(-(d * d) / (2.0 * sigma * sigma));
    sum += k[static_cast<std::size_t>(i)];
  }
  for (double& v : k) v /= sum;
  return k;
}

// Separable "valid" correlation of `src` (w x h) with `kernel`.
// Output is (w - n + 1) x (h - n + 1).
std::vector<double> filter_valid(const std::vector<double>& src, int w, int h,
                                 const std::vector<double>& kernel) {
  const int n = static_cast<int>(kernel.size());
  const int ow = w - n + 1;
  const int oh = h - n + 1;
  std::vector<double> rows(static_cast<std::size_t>(ow) * h);
  for (int y = 0; y < h; ++y) {
    const double* in = &src[static_cast<std::size_t>(y) * w];
    double* out = &rows[static_cast<std::size_t>(y) * ow];
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += kernel[static_cast<std::size_t>(k)] * in[x + k];
      out[x] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh, 0.0);
  for (int y = 0; y < oh; ++y) {
    double* o = &out[static_cast<std::size_t>(y) * ow];
    for (int k = 0; k < n; ++k) {
      const double wk = kernel[static_cast<std::size_t>(k)];
      const double* r = &rows[static_cast<std::size_t>(y + k) * ow];
      for (int x = 0; x < ow; ++x) o[x] += wk * r[x];
    }
  }
  return out;
}

}  // namespace

double ssim(const GrayFrame& a, const GrayFrame& b, const SsimParams& params) {
  require_same_size(a, b);
  const int w = a.width();
  const int h = a.height();
  if (w < params.window || h < params.window) {
    throw Error(ErrorCode::InvalidArgument, "frame smaller than SSIM window");
  }
  const std::size_t n = static_cast<std::size_t>(w) * h;
  std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
  const auto pa = a.pixels();
  const auto pb = b.pixels();
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = pa[i];
    y[i] = pb[i];
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto kernel = gaussian_kernel(params.window, params.sigma);
  const auto mu_x = filter_valid(x, w, h, kernel);
  const auto mu_y = filter_valid(y, w, h, kernel);
  const auto e_xx = filter_valid(xx, w, h, kernel);
  const auto e_yy = filter_valid(yy, w, h, kernel);
  const auto e_xy = filter_valid(xy, w, h, kernel);

  const double c1 = std::pow(params.k1 * params.dynamic_range, 2);
  const double c2 = std::pow(params.k2 * params.dynamic_range, 2);
  double total = 0.0;
  for (std::size_t i = 0; i < mu_x.size(); ++i) {
    const double mx = mu_x[i];
    const double my = mu_y[i];
    const double var_x = e_xx[i] - mx * mx;
    const double var_y = e_yy[i] - my * my;
    const double cov = e_xy[i] - mx * my;
    total += ((2.0 * mx * my + c1) * (2.0 * cov + c2)) /
             ((mx * mx + my * my + c1) * (var_x + var_y + c2));
  }
  return total / static_cast<double>(mu_x.size());
}

__extension__ typedef __int128 i128;

double ncc(const GrayFrame& a, const GrayFrame& b) {
  require_same_size(a, b);
  const auto pa = a.pixels();
  const auto pb = b.pixels();
  // Exact integer moments: n*Sxy - Sx*Sy etc. are the centred sums scaled by
  // n, so identical or offset inputs give exactly +-1.
  std::int64_t sx = 0, sy = 0;
  i128 sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const std::int64_t u = pa[i];
    const std::int64_t v = pb[i];
    sx += u;
    sy += v;
    sxx += u * u;
    syy += v * v;
    sxy += u * v;
  }
  const auto n = static_cast<i128>(pa.size());
  const i128 var_a = n * sxx - static_cast<i128>(sx) * sx;
  const i128 var_b = n * syy - static_cast<i128>(sy) * sy;
  const i128 cov = n * sxy - static_cast<i128>(sx) * sy;

  if (var_a == 0 || var_b == 0) {
    if (var_a == 0 && var_b == 0 && std::equal(pa.begin(), pa.end(), pb.begin())) {
      return 1.0;
    }
    throw Error(ErrorCode::DegenerateVariance,
                "normalised cross-correlation undefined for a constant frame");
  }
  long double denom;
  if (var_a == var_b) {
    denom = static_cast<long double>(var_a);
  } else {
    denom = std::sqrt(static_cast<long double>(var_a)) *
            std::sqrt(static_cast<long double>(var_b));
  }
  const long double r = static_cast<long double>(cov) / denom;
  return static_cast<double>(std::clamp(r, -1.0L, 1.0L));
}

SimilarityScore similarity(const GrayFrame& a, const GrayFrame& b) {
  return {ssim(a, b), ncc(a, b)};
}

}  // namespace natalia::media
