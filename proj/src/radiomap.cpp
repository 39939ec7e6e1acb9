#include "lisense/radiomap.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

namespace lisense {

FilterKernel design_filter(double frequency, double depth, int n, double spacing) {
  if (!(frequency > 0.0) || !(depth > 0.0) || !(spacing > 0.0) || n < 1) {
    throw std::invalid_argument("design_filter: frequency, depth, spacing must be > 0 and n >= 1");
  }
  FilterKernel kernel;
  kernel.design_frequency = frequency;
  kernel.design_depth = depth;
  kernel.spacing = spacing;
  kernel.grid = ComplexGrid(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
  const double wavelength = kSpeedOfLight / frequency;
  const int c = n / 2;
  for (int row = 0; row < n; ++row) {
    for (int col = 0; col < n; ++col) {
      const double px = (col - c) * spacing;
      const double py = (row - c) * spacing;
      const double d = std::sqrt(depth * depth + px * px + py * py);
      kernel.grid(col, row) = std::polar(1.0 / d, -2.0 * kPi * d / wavelength);
    }
  }
  return kernel;
}

int default_kernel_size(int elements_x, int elements_y) {
  const int side = std::min(elements_x, elements_y);
  int n = static_cast<int>(std::lround(side * 100.0 / 259.0));
  if (n % 2 == 0) ++n;
  return std::clamp(n, 1, side % 2 == 1 ? side : std::max(1, side - 1));
}

std::size_t fft_friendly_size(std::size_t minimum) {
  for (std::size_t n = std::max<std::size_t>(minimum, 1);; ++n) {
    std::size_t r = n;
    for (std::size_t p : {2, 3, 5, 7}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return n;
  }
}

namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : ptr(fftw_alloc_complex(n)), size(n) {
    if (ptr == nullptr) throw std::bad_alloc();
    std::fill_n(reinterpret_cast<double*>(ptr), 2 * n, 0.0);
  }
  ~FftwBuffer() { fftw_free(ptr); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;

  cplx* data() { return reinterpret_cast<cplx*>(ptr); }
  fftw_complex* ptr;
  std::size_t size;
};

void check_fits(const ComplexGrid& received, const FilterKernel& kernel) {
  if (kernel.grid.width() > received.width() || kernel.grid.height() > received.height()) {
    throw std::domain_error("apply_filter: kernel larger than received grid");
  }
}

}  // namespace

struct MatchedFilter::Impl {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t pad_w = 0;
  std::size_t pad_h = 0;
  std::size_t shift_col = 0;
  std::size_t shift_row = 0;
  std::size_t kernel_w = 0;
  std::size_t kernel_h = 0;
  std::vector<cplx> spectrum;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (forward != nullptr) fftw_destroy_plan(forward);
    if (backward != nullptr) fftw_destroy_plan(backward);
  }
};

MatchedFilter::MatchedFilter(const FilterKernel& kernel, std::size_t width, std::size_t height)
    : impl_(std::make_unique<Impl>()) {
  const std::size_t kw = kernel.grid.width();
  const std::size_t kh = kernel.grid.height();
  if (kw == 0 || kh == 0) throw std::invalid_argument("MatchedFilter: empty kernel");
  if (kw > width || kh > height) {
    throw std::domain_error("apply_filter: kernel larger than received grid");
  }
  Impl& s = *impl_;
  s.width = width;
  s.height = height;
  s.kernel_w = kw;
  s.kernel_h = kh;
  s.pad_w = fft_friendly_size(width + kw - 1);
  s.pad_h = fft_friendly_size(height + kh - 1);
  s.shift_col = kw - 1 - kernel.center_col();
  s.shift_row = kh - 1 - kernel.center_row();

  FftwBuffer scratch(s.pad_w * s.pad_h);
  {
    std::lock_guard lock(planner_mutex());
    const int n0 = static_cast<int>(s.pad_h);
    const int n1 = static_cast<int>(s.pad_w);
    s.forward = fftw_plan_dft_2d(n0, n1, scratch.ptr, scratch.ptr, FFTW_FORWARD, FFTW_ESTIMATE);
    s.backward = fftw_plan_dft_2d(n0, n1, scratch.ptr, scratch.ptr, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  if (s.forward == nullptr || s.backward == nullptr) {
    throw std::runtime_error("MatchedFilter: FFTW planning failed");
  }

  // Correlation with h == convolution with the flipped conjugate.
  cplx* buf = scratch.data();
  std::fill_n(buf, scratch.size, cplx{0.0, 0.0});
  for (std::size_t r = 0; r < kh; ++r) {
    for (std::size_t c = 0; c < kw; ++c) {
      buf[r * s.pad_w + c] = std::conj(kernel.grid(kw - 1 - c, kh - 1 - r));
    }
  }
  fftw_execute_dft(s.forward, scratch.ptr, scratch.ptr);
  const double norm = 1.0 / static_cast<double>(s.pad_w * s.pad_h);
  s.spectrum.assign(buf, buf + scratch.size);
  for (auto& v : s.spectrum) v *= norm;
}

MatchedFilter::~MatchedFilter() = default;
MatchedFilter::MatchedFilter(MatchedFilter&&) noexcept = default;
MatchedFilter& MatchedFilter::operator=(MatchedFilter&&) noexcept = default;

std::size_t MatchedFilter::width() const { return impl_->width; }
std::size_t MatchedFilter::height() const { return impl_->height; }

ComplexGrid MatchedFilter::apply(const ComplexGrid& received) const {
  const Impl& s = *impl_;
  if (received.width() != s.width || received.height() != s.height) {
    throw std::invalid_argument("MatchedFilter: grid shape differs from the planned shape");
  }
  FftwBuffer work(s.pad_w * s.pad_h);
  cplx* buf = work.data();
  for (std::size_t r = 0; r < s.height; ++r) {
    std::copy_n(&received(0, r), s.width, buf + r * s.pad_w);
  }
  fftw_execute_dft(s.forward, work.ptr, work.ptr);
  for (std::size_t i = 0; i < work.size; ++i) buf[i] *= s.spectrum[i];
  fftw_execute_dft(s.backward, work.ptr, work.ptr);

  ComplexGrid out(s.width, s.height);
  for (std::size_t r = 0; r < s.height; ++r) {
    std::copy_n(buf + (r + s.shift_row) * s.pad_w + s.shift_col, s.width, &out(0, r));
  }
  return out;
}

ComplexGrid correlate_direct(const ComplexGrid& received, const FilterKernel& kernel) {
  check_fits(received, kernel);
  const auto w = static_cast<long>(received.width());
  const auto h = static_cast<long>(received.height());
  const auto kw = static_cast<long>(kernel.grid.width());
  const auto kh = static_cast<long>(kernel.grid.height());
  const auto cx = static_cast<long>(kernel.center_col());
  const auto cy = static_cast<long>(kernel.center_row());
  ComplexGrid out(received.width(), received.height());
  for (long r = 0; r < h; ++r) {
    for (long c = 0; c < w; ++c) {
      cplx acc{0.0, 0.0};
      for (long b = 0; b < kh; ++b) {
        const long rr = r + b - cy;
        if (rr < 0 || rr >= h) continue;
        for (long a = 0; a < kw; ++a) {
          const long cc = c + a - cx;
          if (cc < 0 || cc >= w) continue;
          acc += std::conj(kernel.grid(a, b)) * received(cc, rr);
        }
      }
      out(c, r) = acc;
    }
  }
  return out;
}

ComplexGrid correlate_fft(const ComplexGrid& received, const FilterKernel& kernel) {
  check_fits(received, kernel);
  return MatchedFilter(kernel, received.width(), received.height()).apply(received);
}

RadioMap make_radio_map(ComplexGrid filtered, const LisArrayConfig& lis) {
  RadioMap map;
  map.magnitudes = RealGrid(filtered.width(), filtered.height());
  for (std::size_t i = 0; i < filtered.size(); ++i) map.magnitudes[i] = std::abs(filtered[i]);
  map.complex_map = std::move(filtered);
  map.lis = lis;
  return map;
}

RadioMap apply_filter(const ComplexGrid& received, const FilterKernel& kernel,
                      const LisArrayConfig& lis) {
  return make_radio_map(correlate_fft(received, kernel), lis);
}

RadioMap apply_filter(const ComplexGrid& received, const FilterKernel& kernel) {
  LisArrayConfig lis;
  lis.elements_x = static_cast<int>(received.width());
  lis.elements_y = static_cast<int>(received.height());
  lis.spacing = kernel.spacing;
  lis.carrier_frequency = kernel.design_frequency;
  return apply_filter(received, kernel, lis);
}

RadioMap apply_filter(const ComplexGrid& received, const MatchedFilter& filter,
                      const LisArrayConfig& lis) {
  return make_radio_map(filter.apply(received), lis);
}

ByteGrid map_to_image(const RealGrid& magnitudes) {
  ByteGrid img(magnitudes.width(), magnitudes.height(), 0);
  if (magnitudes.empty()) return img;
  const auto [lo_it, hi_it] = std::minmax_element(magnitudes.begin(), magnitudes.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(hi > lo)) return img;
  const double scale = 255.0 / (hi - lo);
  for (std::size_t i = 0; i < magnitudes.size(); ++i) {
    const double v = std::round((magnitudes[i] - lo) * scale);
    img[i] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
  }
  return img;
}

ByteGrid map_to_image(const RadioMap& map) { return map_to_image(map.magnitudes); }

}  // namespace lisense
