#include "hotel/dynamics/grid.hpp"

#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>
#include <sstream>

#include <fftw3.h>

#include "../detail/fftw_lock.hpp"
#include "hotel/error.hpp"

namespace hotel::dynamics {

namespace {

std::mutex& planner_mutex() { return detail::fftw_planner_mutex(); }

}  // namespace

GridState::GridState(double w, std::vector<cplx> s) : width(w), samples(std::move(s)) {
  if (!(width > 0.0)) throw DomainError("grid width must be positive");
  if (samples.empty()) throw DomainError("grid needs at least one interior point");
}

double GridState::norm_squared() const noexcept {
  double acc = 0.0;
  for (const cplx& v : samples) acc += std::norm(v);
  return acc * dx();
}

SineTransform::SineTransform(std::size_t m) : m_(m) {
  if (m == 0) throw DomainError("sine transform needs at least one point");
  buf_ = fftw_alloc_real(2 * m);
  if (buf_ == nullptr) throw std::bad_alloc();
  std::memset(buf_, 0, 2 * m * sizeof(double));
  scale_ = 1.0 / std::sqrt(2.0 * static_cast<double>(m + 1));
  const int n = static_cast<int>(m);
  const fftw_r2r_kind kind = FFTW_RODFT00;
  std::lock_guard lock(planner_mutex());
  // two interleaved real sequences (re, im) with stride 2
  plan_ = fftw_plan_many_r2r(1, &n, 2, buf_, nullptr, 2, 1, buf_, nullptr, 2, 1, &kind,
                             FFTW_ESTIMATE);
  if (plan_ == nullptr) {
    fftw_free(buf_);
    throw Error("FFTW failed to create a DST-I plan");
  }
}

SineTransform::~SineTransform() { release(); }

SineTransform::SineTransform(SineTransform&& other) noexcept
    : m_(other.m_), buf_(other.buf_), plan_(other.plan_), scale_(other.scale_) {
  other.buf_ = nullptr;
  other.plan_ = nullptr;
}

SineTransform& SineTransform::operator=(SineTransform&& other) noexcept {
  if (this != &other) {
    release();
    m_ = other.m_;
    buf_ = other.buf_;
    plan_ = other.plan_;
    scale_ = other.scale_;
    other.buf_ = nullptr;
    other.plan_ = nullptr;
  }
  return *this;
}

void SineTransform::release() noexcept {
  if (plan_ != nullptr) {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  }
  if (buf_ != nullptr) fftw_free(buf_);
  plan_ = nullptr;
  buf_ = nullptr;
}

void SineTransform::execute() noexcept {
  fftw_execute(static_cast<fftw_plan>(plan_));
  const std::size_t n = 2 * m_;
  for (std::size_t k = 0; k < n; ++k) buf_[k] *= scale_;
}

void SineTransform::execute_raw() noexcept { fftw_execute(static_cast<fftw_plan>(plan_)); }

void SineTransform::apply(std::span<cplx> inout) {
  if (inout.size() != m_) throw DomainError("sine transform length mismatch");
  std::memcpy(buf_, inout.data(), m_ * sizeof(cplx));
  execute();
  std::memcpy(static_cast<void*>(inout.data()), buf_, m_ * sizeof(cplx));
}

OddExtensionFft::OddExtensionFft(std::size_t m) : m_(m) {
  if (m == 0) throw DomainError("odd extension needs at least one point");
  const int n = static_cast<int>(length());
  auto* b = fftw_alloc_complex(length());
  if (b == nullptr) throw std::bad_alloc();
  std::memset(static_cast<void*>(b), 0, length() * sizeof(fftw_complex));
  buf_ = b;
  std::lock_guard lock(planner_mutex());
  // FFTW_ESTIMATE keeps the plan, and so the rounding, identical run to run
  fwd_ = fftw_plan_dft_1d(n, b, b, FFTW_FORWARD, FFTW_ESTIMATE);
  bwd_ = fftw_plan_dft_1d(n, b, b, FFTW_BACKWARD, FFTW_ESTIMATE);
  if (fwd_ == nullptr || bwd_ == nullptr) {
    if (fwd_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    if (bwd_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
    fftw_free(b);
    throw Error("FFTW failed to create an FFT plan");
  }
}

OddExtensionFft::~OddExtensionFft() {
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
  }
  fftw_free(buf_);
}

void OddExtensionFft::load(std::span<const cplx> interior) {
  if (interior.size() != m_) throw DomainError("odd extension length mismatch");
  cplx* d = data();
  d[0] = 0.0;
  d[m_ + 1] = 0.0;
  std::memcpy(static_cast<void*>(d + 1), interior.data(), m_ * sizeof(cplx));
  mirror();
}

void OddExtensionFft::store(std::span<cplx> interior) const {
  if (interior.size() != m_) throw DomainError("odd extension length mismatch");
  std::memcpy(static_cast<void*>(interior.data()), static_cast<const cplx*>(buf_) + 1,
              m_ * sizeof(cplx));
}

void OddExtensionFft::mirror() noexcept {
  cplx* d = data();
  const std::size_t n = length();
  for (std::size_t j = 1; j <= m_; ++j) d[n - j] = -d[j];
}

void OddExtensionFft::forward() noexcept { fftw_execute(static_cast<fftw_plan>(fwd_)); }
void OddExtensionFft::backward() noexcept { fftw_execute(static_cast<fftw_plan>(bwd_)); }

GridState to_grid(const well::SpectralState& s, std::size_t m) {
  if (s.geometry.origin != 0.0) throw DomainError("to_grid: the grid well starts at 0");
  if (s.modes() > m) {
    std::ostringstream msg;
    msg << "to_grid: " << s.modes() << " modes cannot be represented on " << m << " points";
    throw AliasingError(msg.str());
  }
  std::vector<cplx> v(m, cplx{0.0, 0.0});
  for (std::size_t k = 0; k < s.modes(); ++k) v[k] = s.amps[static_cast<Eigen::Index>(k)];
  SineTransform st(m);
  st.apply(v);
  GridState g(s.geometry.width, std::move(v));
  const double inv = 1.0 / std::sqrt(g.dx());
  for (auto& z : g.samples) z *= inv;
  return g;
}

well::SpectralState to_spectral(const GridState& g, std::size_t modes) {
  if (modes == 0) throw DomainError("to_spectral: need at least one mode");
  if (modes > g.size()) {
    std::ostringstream msg;
    msg << "to_spectral: " << modes << " modes requested from " << g.size() << " grid points";
    throw AliasingError(msg.str());
  }
  std::vector<cplx> v = g.samples;
  const double root = std::sqrt(g.dx());
  for (auto& z : v) z *= root;
  SineTransform st(v.size());
  st.apply(v);
  well::Amplitudes a(static_cast<Eigen::Index>(modes));
  for (std::size_t k = 0; k < modes; ++k) a[static_cast<Eigen::Index>(k)] = v[k];
  return {{g.width, 0.0}, std::move(a)};
}

std::vector<double> kinetic_energies(double width, std::size_t m,
                                     const well::PhysicalConstants& c) {
  std::vector<double> e(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double kk = std::numbers::pi * static_cast<double>(k + 1) / width;
    e[k] = c.hbar * c.hbar * kk * kk / (2.0 * c.mass);
  }
  return e;
}

std::vector<double> fd_kinetic_energies(double width, std::size_t m,
                                        const well::PhysicalConstants& c) {
  const double dx = width / static_cast<double>(m + 1);
  std::vector<double> e(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double theta = std::numbers::pi * static_cast<double>(k + 1) / static_cast<double>(m + 1);
    e[k] = c.hbar * c.hbar * (2.0 - 2.0 * std::cos(theta)) / (2.0 * c.mass * dx * dx);
  }
  return e;
}

}  // namespace hotel::dynamics
