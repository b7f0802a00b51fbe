#pragma once

// Independent reference implementations used only by tests. These are written
// as plain scalar loops over flat vectors, on purpose: they share no code with
// the library under test.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace oracles {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// y_i = act(sum_j W[i][j] x_j + b_i), W given row-major [n_out x n_in].
template <typename Act>
std::vector<double> dense(const std::vector<double>& x, const std::vector<double>& w,
                          const std::vector<double>& b, int n_out, int n_in, Act act) {
  std::vector<double> y(n_out);
  for (int i = 0; i < n_out; ++i) {
    double s = b[static_cast<std::size_t>(i)];
    for (int j = 0; j < n_in; ++j) {
      s += w[static_cast<std::size_t>(i) * n_in + j] * x[static_cast<std::size_t>(j)];
    }
    y[static_cast<std::size_t>(i)] = act(s);
  }
  return y;
}

// Same-padded cross-correlation. Input [h x w x c_in] row-major, kernels
// [k x k x c_in x c_out], output [ceil(h/s) x ceil(w/s) x c_out].
template <typename Act>
std::vector<double> conv2d(const std::vector<double>& x, int h, int w, int c_in,
                           const std::vector<double>& kern, int k, int c_out,
                           const std::vector<double>& bias, int stride, Act act) {
  const int oh = (h + stride - 1) / stride;
  const int ow = (w + stride - 1) / stride;
  const int pad_h = (oh - 1) * stride + k - h;
  const int pad_w = (ow - 1) * stride + k - w;
  const int top = (pad_h > 0 ? pad_h : 0) / 2;
  const int left = (pad_w > 0 ? pad_w : 0) / 2;
  std::vector<double> y(static_cast<std::size_t>(oh) * ow * c_out);
  for (int oy = 0; oy < oh; ++oy) {
    for (int ox = 0; ox < ow; ++ox) {
      for (int co = 0; co < c_out; ++co) {
        double s = bias[static_cast<std::size_t>(co)];
        for (int ky = 0; ky < k; ++ky) {
          for (int kx = 0; kx < k; ++kx) {
            const int iy = oy * stride + ky - top;
            const int ix = ox * stride + kx - left;
            if (iy < 0 || iy >= h || ix < 0 || ix >= w) continue;
            for (int ci = 0; ci < c_in; ++ci) {
              const double xv = x[(static_cast<std::size_t>(iy) * w + ix) * c_in + ci];
              const double kv =
                  kern[((static_cast<std::size_t>(ky) * k + kx) * c_in + ci) * c_out + co];
              s += xv * kv;
            }
          }
        }
        y[(static_cast<std::size_t>(oy) * ow + ox) * c_out + co] = act(s);
      }
    }
  }
  return y;
}

struct GruWeights {
  // all matrices row-major: W* are [dh x dx], U* are [dh x dh], b* are [dh]
  std::vector<double> wz, uz, bz, wr, ur, br, wh, uh, bh;
};

// z = sig(Wz x + Uz h + bz); r = sig(Wr x + Ur h + br);
// hc = tanh(Wh x + Uh (r.h) + bh); h' = (1-z).h + z.hc
inline std::vector<double> gru(const std::vector<double>& x, const std::vector<double>& h,
                               const GruWeights& p, int dx, int dh) {
  auto mat = [](const std::vector<double>& m, const std::vector<double>& v, int rows, int cols) {
    std::vector<double> y(rows, 0.0);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) {
        y[static_cast<std::size_t>(i)] +=
            m[static_cast<std::size_t>(i) * cols + j] * v[static_cast<std::size_t>(j)];
      }
    }
    return y;
  };
  auto az = mat(p.wz, x, dh, dx), bz2 = mat(p.uz, h, dh, dh);
  auto ar = mat(p.wr, x, dh, dx), br2 = mat(p.ur, h, dh, dh);
  std::vector<double> z(dh), r(dh), out(dh);
  for (int i = 0; i < dh; ++i) {
    z[static_cast<std::size_t>(i)] = sigmoid(az[static_cast<std::size_t>(i)] +
                                             bz2[static_cast<std::size_t>(i)] +
                                             p.bz[static_cast<std::size_t>(i)]);
    r[static_cast<std::size_t>(i)] = sigmoid(ar[static_cast<std::size_t>(i)] +
                                             br2[static_cast<std::size_t>(i)] +
                                             p.br[static_cast<std::size_t>(i)]);
  }
  std::vector<double> rh(dh);
  for (int i = 0; i < dh; ++i) {
    rh[static_cast<std::size_t>(i)] =
        r[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(i)];
  }
  auto ah = mat(p.wh, x, dh, dx), bh2 = mat(p.uh, rh, dh, dh);
  for (int i = 0; i < dh; ++i) {
    const double hc = std::tanh(ah[static_cast<std::size_t>(i)] +
                                bh2[static_cast<std::size_t>(i)] +
                                p.bh[static_cast<std::size_t>(i)]);
    out[static_cast<std::size_t>(i)] =
        (1.0 - z[static_cast<std::size_t>(i)]) * h[static_cast<std::size_t>(i)] +
        z[static_cast<std::size_t>(i)] * hc;
  }
  return out;
}

struct RayResult {
  double t = 0.0;
  int cls = -1;
};

// Independent ray walker: collects every grid-line crossing parameter along
// the ray, sorts them, and identifies each traversed cell from the midpoint of
// the segment between consecutive crossings. No incremental stepping state, so
// it cross-checks a DDA implementation. `blocked(x,y)` marks non-floor cells,
// `cls(x,y)` gives their class.
template <typename BlockedFn, typename ClassFn>
RayResult raycast_sorted_crossings(double ox, double oy, double angle, int width, int height,
                                   BlockedFn blocked, ClassFn cls) {
  const double dx = std::cos(angle);
  const double dy = std::sin(angle);
  std::vector<double> ts;
  if (std::fabs(dx) > 1e-15) {
    for (int m = 0; m <= width; ++m) {
      const double t = (m - ox) / dx;
      if (t > 1e-12) ts.push_back(t);
    }
  }
  if (std::fabs(dy) > 1e-15) {
    for (int m = 0; m <= height; ++m) {
      const double t = (m - oy) / dy;
      if (t > 1e-12) ts.push_back(t);
    }
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end(),
                       [](double a, double b) { return std::fabs(a - b) < 1e-12; }),
           ts.end());
  double prev = 0.0;
  for (double t : ts) {
    const double mid = (prev + t) / 2.0;
    const int cx = static_cast<int>(std::floor(ox + dx * mid));
    const int cy = static_cast<int>(std::floor(oy + dy * mid));
    if (cx >= 0 && cx < width && cy >= 0 && cy < height && blocked(cx, cy)) {
      return {prev, cls(cx, cy)};
    }
    prev = t;
  }
  return {prev, -1};
}

inline std::vector<double> softmax(const std::vector<double>& x) {
  double mx = x[0];
  for (double v : x) {
    if (v > mx) mx = v;
  }
  double sum = 0.0;
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = std::exp(x[i] - mx);
    sum += y[i];
  }
  for (auto& v : y) v /= sum;
  return y;
}

}  // namespace oracles
