#pragma once

// Slow reference implementations shared by the unit tests and the acceptance run.

#include <algorithm>
#include <complex>
#include <limits>
#include <vector>

#include "lisense/grid.hpp"

namespace lisense::oracle {

/// Flood fill from every unvisited black (0) pixel in row-major order.
inline std::vector<std::vector<Pixel>> flood_components(const ByteGrid& bits, bool eight) {
  const int w = static_cast<int>(bits.width());
  const int h = static_cast<int>(bits.height());
  Grid<int> seen(w, h, 0);
  std::vector<std::vector<Pixel>> out;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (bits(c, r) != 0 || seen(c, r)) continue;
      std::vector<Pixel> comp;
      std::vector<Pixel> stack{{c, r}};
      seen(c, r) = 1;
      while (!stack.empty()) {
        const Pixel p = stack.back();
        stack.pop_back();
        comp.push_back(p);
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            if (dr == 0 && dc == 0) continue;
            if (!eight && dr != 0 && dc != 0) continue;
            const int nc = p.col + dc;
            const int nr = p.row + dr;
            if (nc < 0 || nr < 0 || nc >= w || nr >= h) continue;
            if (bits(nc, nr) != 0 || seen(nc, nr)) continue;
            seen(nc, nr) = 1;
            stack.push_back({nc, nr});
          }
        }
      }
      out.push_back(comp);
    }
  }
  return out;
}

/// Lower edge of the upper class of the SSE-optimal two-cluster split. In 1-D the
/// optimal partition is a threshold, so trying every cut of the sorted values
/// finds the global minimum.
inline double optimal_split_threshold(const RealGrid& g) {
  std::vector<double> v(g.begin(), g.end());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  std::vector<double> prefix(n + 1, 0.0);
  std::vector<double> prefix_sq(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    prefix[i + 1] = prefix[i] + v[i];
    prefix_sq[i + 1] = prefix_sq[i] + v[i] * v[i];
  }
  const auto sse = [&](std::size_t b, std::size_t e) {
    const double s = prefix[e] - prefix[b];
    return prefix_sq[e] - prefix_sq[b] - s * s / static_cast<double>(e - b);
  };
  double best = std::numeric_limits<double>::infinity();
  double cut = v.back();
  for (std::size_t k = 1; k < n; ++k) {
    if (v[k] == v[k - 1]) continue;
    const double total = sse(0, k) + sse(k, n);
    if (total < best) {
      best = total;
      cut = v[k];
    }
  }
  return cut;
}

/// Textbook "same" correlation with the conjugated kernel, zero outside the grid.
inline ComplexGrid direct_correlation(const ComplexGrid& y, const ComplexGrid& h) {
  const int w = static_cast<int>(y.width());
  const int ht = static_cast<int>(y.height());
  const int kw = static_cast<int>(h.width());
  const int kh = static_cast<int>(h.height());
  ComplexGrid out(w, ht);
  for (int r = 0; r < ht; ++r) {
    for (int c = 0; c < w; ++c) {
      std::complex<double> acc = 0.0;
      for (int b = 0; b < kh; ++b) {
        for (int a = 0; a < kw; ++a) {
          const int yc = c + a - kw / 2;
          const int yr = r + b - kh / 2;
          if (yc < 0 || yr < 0 || yc >= w || yr >= ht) continue;
          acc += std::conj(h(a, b)) * y(yc, yr);
        }
      }
      out(c, r) = acc;
    }
  }
  return out;
}

}  // namespace lisense::oracle
