#include "convwave/kernel_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <type_traits>

#include "convwave/parallel.hpp"
#include "convwave/quadrature.hpp"
#include "convwave/special_functions.hpp"

namespace convwave {

namespace {

// One grid panel with its local interpolation basis: two-node linear for
// uniform cells, barycentric Lagrange for Gauss panels, constant for
// one-node (midpoint) panels.
struct Cell {
  double lo = 0.0, hi = 0.0;
  std::size_t first = 0;
  std::vector<double> xs;
  std::vector<double> bary;
  std::vector<double> nodal_w;  // per-cell plain quadrature weights
};

std::vector<Cell> make_cells(const RadialGrid& g) {
  std::vector<Cell> cells(g.panel_count());
  const auto& nodes = g.nodes();
  const auto& plain = g.plain_weights();
  for (std::size_t p = 0; p < g.panel_count(); ++p) {
    Cell& c = cells[p];
    c.lo = g.panel_lo(p);
    c.hi = g.panel_hi(p);
    c.first = g.panel_begin(p);
    std::size_t end = g.panel_end(p);
    for (std::size_t k = c.first; k < end; ++k) c.xs.push_back(nodes[k]);
    if (g.kind() == GridKind::Uniform) {
      double h = c.hi - c.lo;
      c.nodal_w = {0.5 * h, 0.5 * h};
    } else {
      for (std::size_t k = c.first; k < end; ++k) c.nodal_w.push_back(plain[k]);
    }
    if (c.xs.size() >= 2) {
      double scale = c.hi - c.lo;
      c.bary.resize(c.xs.size());
      for (std::size_t j = 0; j < c.xs.size(); ++j) {
        double w = 1.0;
        for (std::size_t k = 0; k < c.xs.size(); ++k)
          if (k != j) w *= scale / (c.xs[j] - c.xs[k]);
        c.bary[j] = w;
      }
    }
  }
  return cells;
}

void basis_at(const Cell& c, double x, std::vector<double>& out) {
  std::size_t q = c.xs.size();
  out.assign(q, 0.0);
  if (q == 1) {
    out[0] = 1.0;
    return;
  }
  double den = 0.0;
  for (std::size_t j = 0; j < q; ++j) {
    double diff = x - c.xs[j];
    if (diff == 0.0) {
      std::fill(out.begin(), out.end(), 0.0);
      out[j] = 1.0;
      return;
    }
    out[j] = c.bary[j] / diff;
    den += out[j];
  }
  for (double& v : out) v /= den;
}

// Full row integrand against plain d(rho) measure, plus the factored form
// value(rho)/|rho - r_sing|^alpha used on the slice touching the
// singularity (only meaningful when factored_ok).
struct RowKernel {
  std::function<double(double)> value;
  std::function<double(double)> factored;
  double r_sing = 0.0;
  double alpha = 0.0;
  bool factored_ok = false;
};

RowKernel radial_row(int n, double gamma, double r, int eta_points) {
  RowKernel K;
  K.r_sing = r;
  if (r == 0.0) {
    // Direct formula at the origin: the kernel is exactly a power.
    double area = unit_sphere_area(n);
    double a = static_cast<double>(n) - 1.0 - gamma;
    K.alpha = a;
    K.factored_ok = true;
    K.value = [area, a](double rho) { return area * std::pow(rho, a); };
    K.factored = [area](double) { return area; };
    return K;
  }

  double pref = std::ldexp(1.0, 3 - n) * unit_sphere_area(n - 1) *
                std::pow(r, -(static_cast<double>(n) - 2.0));
  std::function<double(double)> Q;
  if (n == 3) {
    if (gamma == 2.0) {
      Q = [r](double rho) { return std::log((rho + r) / std::abs(rho - r)); };
    } else {
      // Exponents near (but not equal to) 2 lose digits in the difference;
      // the exact gamma = 2 case takes the log branch above.
      double e = 2.0 - gamma;
      Q = [r, e](double rho) {
        return (std::pow(rho + r, e) - std::pow(std::abs(rho - r), e)) / e;
      };
    }
  } else {
    double s = 0.5 * (static_cast<double>(n) - 3.0);
    double e = 1.0 - gamma;
    Q = [r, s, e, eta_points](double rho) {
      return eta_weighted_integral(std::abs(rho - r), rho + r, s, e,
                                   [](double) { return 1.0; }, eta_points);
    };
  }
  K.alpha = static_cast<double>(n) - 1.0 - gamma;
  K.factored_ok = K.alpha < 0.0;
  K.value = [pref, Q](double rho) {
    if (rho == 0.0) return 0.0;
    return pref * rho * Q(rho);
  };
  double neg_alpha = -K.alpha;
  K.factored = [pref, Q, neg_alpha, r](double rho) {
    return pref * rho * Q(rho) * std::pow(std::abs(rho - r), neg_alpha);
  };
  return K;
}

RowKernel line_row(double gamma, double r) {
  RowKernel K;
  K.r_sing = r;
  K.alpha = -gamma;
  K.factored_ok = true;
  K.value = [gamma, r](double z) {
    double d = std::abs(r - z), c = r + z;
    double v = std::pow(d, -gamma);
    if (c > 0.0) v += std::pow(c, -gamma);
    return v;
  };
  K.factored = [gamma, r](double z) {
    // (|r-z|^-g + (r+z)^-g) * |r-z|^g, written without the blowing factor.
    double d = std::abs(r - z), c = r + z;
    return 1.0 + std::pow(d / c, gamma);
  };
  return K;
}

// Integrates the row kernel over [a, b] with geometric grading toward one
// end, emitting (node, weight*kernel) pairs. at_sing: the graded end is
// the singular radius itself (innermost slice may switch to a Jacobi rule
// matched to |rho - r|^alpha). standoff > 0: the singularity lies outside
// at that distance, so grading stops once slices resolve it.
template <class Emit>
void graded_panel(const RowKernel& K, double a, double b, bool toward_lo,
                  bool at_sing, double standoff, int points, int levels,
                  Emit&& emit) {
  double len = b - a;
  if (!(len > 0.0)) return;
  int L = levels;
  if (!at_sing) {
    L = 1;
    if (standoff > 0.0 && standoff < len)
      L = std::clamp(static_cast<int>(std::ceil(std::log2(len / standoff))), 1,
                     levels);
  }
  const GaussRule& gl = gauss_legendre(points);
  auto gauss_slice = [&](double s_lo, double s_hi) {
    double mid = 0.5 * (s_lo + s_hi), half = 0.5 * (s_hi - s_lo);
    if (!(half > 0.0)) return;
    for (int q = 0; q < points; ++q) {
      double x = mid + half * gl.nodes[q];
      if (x == K.r_sing) continue;
      emit(x, half * gl.weights[q] * K.value(x));
    }
  };
  for (int k = 1; k <= L; ++k) {
    double w_out = std::ldexp(len, -(k - 1));
    double w_in = std::ldexp(len, -k);
    if (toward_lo)
      gauss_slice(a + w_in, a + w_out);
    else
      gauss_slice(b - w_out, b - w_in);
  }
  double w_in = std::ldexp(len, -L);
  double s_lo = toward_lo ? a : b - w_in;
  double s_hi = toward_lo ? a + w_in : b;
  double mid = 0.5 * (s_lo + s_hi), half = 0.5 * (s_hi - s_lo);
  if (!(half > 0.0)) return;
  if (at_sing && K.factored_ok) {
    const GaussRule& gj = toward_lo ? gauss_jacobi(points, 0.0, K.alpha)
                                    : gauss_jacobi(points, K.alpha, 0.0);
    double scale = std::pow(half, K.alpha + 1.0);
    for (int q = 0; q < points; ++q) {
      double x = mid + half * gj.nodes[q];
      if (x == K.r_sing) continue;
      emit(x, scale * gj.weights[q] * K.factored(x));
    }
  } else {
    gauss_slice(s_lo, s_hi);
  }
}

// Product integration of the row kernel against the cell's basis.
// acc == nullptr computes only the scalar cell integral (error probe).
double product_cell(const RowKernel& K, const Cell& c, double r, int points,
                    int levels, std::vector<double>* acc,
                    std::vector<double>& basis_buf) {
  double scalar = 0.0;
  auto emit = [&](double x, double wv) {
    scalar += wv;
    if (acc) {
      basis_at(c, x, basis_buf);
      for (std::size_t j = 0; j < basis_buf.size(); ++j)
        (*acc)[j] += wv * basis_buf[j];
    }
  };
  if (r > c.lo && r < c.hi) {
    graded_panel(K, c.lo, r, false, true, 0.0, points, levels, emit);
    graded_panel(K, r, c.hi, true, true, 0.0, points, levels, emit);
  } else if (r == c.lo) {
    graded_panel(K, c.lo, c.hi, true, true, 0.0, points, levels, emit);
  } else if (r == c.hi) {
    graded_panel(K, c.lo, c.hi, false, true, 0.0, points, levels, emit);
  } else if (r < c.lo) {
    graded_panel(K, c.lo, c.hi, true, false, c.lo - r, points, levels, emit);
  } else {
    graded_panel(K, c.lo, c.hi, false, false, r - c.hi, points, levels, emit);
  }
  return scalar;
}

void assemble_row(const RowKernel& K, double r, const std::vector<Cell>& cells,
                  const KernelSettings& st, double* row, std::size_t size,
                  KernelDiagnostics& diag) {
  std::vector<double> acc, basis_buf;
  for (const Cell& c : cells) {
    double w = c.hi - c.lo;
    double rho_star = std::clamp(r, c.lo, c.hi);
    double dist = std::abs(rho_star - r);
    if (dist > w) {
      for (std::size_t j = 0; j < c.xs.size(); ++j)
        row[c.first + j] += c.nodal_w[j] * K.value(c.xs[j]);
      continue;
    }
    acc.assign(c.xs.size(), 0.0);
    double fine = product_cell(K, c, r, st.near_points, st.graded_levels,
                               &acc, basis_buf);
    int coarse_points = std::max(4, (2 * st.near_points) / 3);
    double coarse = product_cell(K, c, r, coarse_points, st.graded_levels,
                                 nullptr, basis_buf);
    if (std::abs(fine - coarse) >
        st.panel_error_tol * std::max(std::abs(fine), 1e-300))
      ++diag.flagged_panels;
    for (std::size_t j = 0; j < c.xs.size(); ++j) row[c.first + j] += acc[j];
  }
  for (std::size_t j = 0; j < size; ++j) {
    if (row[j] < 0.0) {
      ++diag.clamped_entries;
      diag.max_clamped = std::max(diag.max_clamped, -row[j]);
      row[j] = 0.0;
    }
  }
}

void check_settings(const KernelSettings& st) {
  if (st.eta_points < 4)
    throw std::invalid_argument("KernelSettings.eta_points must be >= 4");
  if (st.near_points < 4)
    throw std::invalid_argument("KernelSettings.near_points must be >= 4");
  if (st.graded_levels < 2)
    throw std::invalid_argument("KernelSettings.graded_levels must be >= 2");
  if (!(st.panel_error_tol > 0.0))
    throw std::invalid_argument("KernelSettings.panel_error_tol must be > 0");
}

void fnv_bytes(std::uint64_t& h, const void* p, std::size_t len) {
  const auto* b = static_cast<const unsigned char*>(p);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= b[i];
    h *= 0x100000001b3ull;
  }
}

template <class T>
void fnv_pod(std::uint64_t& h, const T& v) {
  static_assert(std::is_trivially_copyable_v<T>);
  fnv_bytes(h, &v, sizeof v);
}

std::uint64_t content_key_for(const RadialGrid& g, int n, double gamma,
                              const KernelSettings& st) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  fnv_bytes(h, "cwkm1", 5);
  fnv_pod(h, static_cast<std::int32_t>(g.kind()));
  fnv_pod(h, static_cast<std::uint64_t>(g.size()));
  fnv_bytes(h, g.nodes().data(), g.size() * sizeof(double));
  fnv_bytes(h, g.plain_weights().data(), g.size() * sizeof(double));
  for (std::size_t p = 0; p < g.panel_count(); ++p) fnv_pod(h, g.panel_lo(p));
  fnv_pod(h, g.r_max());
  fnv_pod(h, static_cast<std::int32_t>(n));
  fnv_pod(h, gamma);
  fnv_pod(h, static_cast<std::int32_t>(st.eta_points));
  fnv_pod(h, static_cast<std::int32_t>(st.near_points));
  fnv_pod(h, static_cast<std::int32_t>(st.graded_levels));
  fnv_pod(h, st.panel_error_tol);
  return h;
}

constexpr std::uint32_t kCacheMagic = 0x4D4B5743;  // "CWKM"
constexpr std::uint32_t kCacheVersion = 1;

template <class T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
bool read_pod(std::istream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return bool(is);
}

}  // namespace

KernelMatrix KernelMatrix::build(GridPtr grid, int n, double gamma,
                                 const KernelSettings& settings) {
  if (!grid || grid->size() < 2)
    throw std::invalid_argument("build: grid with at least 2 nodes required");
  if (n < 2)
    throw std::invalid_argument("build: n >= 2 (build_line covers n = 1)");
  if (!(gamma > 0.0 && gamma < static_cast<double>(n)))
    throw std::invalid_argument("build: need 0 < gamma < n");
  check_settings(settings);

  KernelMatrix K;
  K.grid_ = std::move(grid);
  K.n_ = n;
  K.gamma_ = gamma;
  K.settings_ = settings;
  K.size_ = K.grid_->size();
  K.entries_.assign(K.size_ * K.size_, 0.0);

  const auto cells = make_cells(*K.grid_);
  const auto& nodes = K.grid_->nodes();
  std::vector<KernelDiagnostics> row_diags(K.size_);
  parallel_for(K.size_, [&](std::size_t i) {
    RowKernel rk = radial_row(n, gamma, nodes[i], settings.eta_points);
    assemble_row(rk, nodes[i], cells, settings, &K.entries_[i * K.size_],
                 K.size_, row_diags[i]);
  });
  for (const auto& d : row_diags) {
    K.diag_.clamped_entries += d.clamped_entries;
    K.diag_.max_clamped = std::max(K.diag_.max_clamped, d.max_clamped);
    K.diag_.flagged_panels += d.flagged_panels;
  }
  return K;
}

KernelMatrix KernelMatrix::build_line(GridPtr grid, double gamma,
                                      const KernelSettings& settings) {
  if (!grid || grid->size() < 2)
    throw std::invalid_argument("build_line: grid with at least 2 nodes required");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("build_line: need 0 < gamma < 1");
  check_settings(settings);

  KernelMatrix K;
  K.grid_ = std::move(grid);
  K.n_ = 1;
  K.gamma_ = gamma;
  K.settings_ = settings;
  K.size_ = K.grid_->size();
  K.entries_.assign(K.size_ * K.size_, 0.0);

  const auto cells = make_cells(*K.grid_);
  const auto& nodes = K.grid_->nodes();
  std::vector<KernelDiagnostics> row_diags(K.size_);
  parallel_for(K.size_, [&](std::size_t i) {
    RowKernel rk = line_row(gamma, nodes[i]);
    assemble_row(rk, nodes[i], cells, settings, &K.entries_[i * K.size_],
                 K.size_, row_diags[i]);
  });
  for (const auto& d : row_diags) {
    K.diag_.clamped_entries += d.clamped_entries;
    K.diag_.max_clamped = std::max(K.diag_.max_clamped, d.max_clamped);
    K.diag_.flagged_panels += d.flagged_panels;
  }
  return K;
}

RadialField KernelMatrix::apply(const RadialField& U) const {
  if (!U.grid || !U.grid->same_layout(*grid_))
    throw std::invalid_argument("apply: field grid does not match kernel grid");
  RadialField out;
  out.grid = U.grid;
  out.time = U.time;
  out.values.assign(size_, 0.0);
  for (std::size_t i = 0; i < size_; ++i) {
    const double* row = &entries_[i * size_];
    double s = 0.0;
    for (std::size_t j = 0; j < size_; ++j) s += row[j] * U.values[j];
    out.values[i] = s;
  }
  return out;
}

std::uint64_t KernelMatrix::content_key() const {
  return content_key_for(*grid_, n_, gamma_, settings_);
}

void KernelMatrix::save(const std::filesystem::path& file) const {
  std::ofstream os(file, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("save: cannot open " + file.string());
  write_pod(os, kCacheMagic);
  write_pod(os, kCacheVersion);
  write_pod(os, content_key());
  write_pod(os, static_cast<std::int32_t>(n_));
  write_pod(os, std::int32_t{0});
  write_pod(os, gamma_);
  write_pod(os, static_cast<std::uint64_t>(size_));
  os.write(reinterpret_cast<const char*>(entries_.data()),
           static_cast<std::streamsize>(entries_.size() * sizeof(double)));
  write_pod(os, diag_.clamped_entries);
  write_pod(os, diag_.max_clamped);
  write_pod(os, diag_.flagged_panels);
  if (!os) throw std::runtime_error("save: short write to " + file.string());
}

std::optional<KernelMatrix> KernelMatrix::load(
    const std::filesystem::path& file, GridPtr grid, int n, double gamma,
    const KernelSettings& settings) {
  std::ifstream is(file, std::ios::binary);
  if (!is) return std::nullopt;
  std::uint32_t magic = 0, version = 0;
  std::uint64_t key = 0, count = 0;
  std::int32_t file_n = 0, reserved = 0;
  double file_gamma = 0.0;
  if (!read_pod(is, magic) || magic != kCacheMagic) return std::nullopt;
  if (!read_pod(is, version) || version != kCacheVersion) return std::nullopt;
  if (!read_pod(is, key) || !read_pod(is, file_n) || !read_pod(is, reserved) ||
      !read_pod(is, file_gamma) || !read_pod(is, count))
    return std::nullopt;
  if (!grid || key != content_key_for(*grid, n, gamma, settings))
    return std::nullopt;
  if (file_n != n || file_gamma != gamma || count != grid->size())
    return std::nullopt;

  KernelMatrix K;
  K.grid_ = std::move(grid);
  K.n_ = n;
  K.gamma_ = gamma;
  K.settings_ = settings;
  K.size_ = count;
  K.entries_.resize(count * count);
  is.read(reinterpret_cast<char*>(K.entries_.data()),
          static_cast<std::streamsize>(K.entries_.size() * sizeof(double)));
  if (!is) return std::nullopt;
  if (!read_pod(is, K.diag_.clamped_entries) ||
      !read_pod(is, K.diag_.max_clamped) ||
      !read_pod(is, K.diag_.flagged_panels))
    return std::nullopt;
  return K;
}

KernelMatrix KernelMatrix::build_cached(GridPtr grid, int n, double gamma,
                                        const KernelSettings& settings,
                                        const std::filesystem::path& cache_dir) {
  if (!grid) throw std::invalid_argument("build_cached: null grid");
  std::uint64_t key = content_key_for(*grid, n, gamma, settings);
  char name[64];
  std::snprintf(name, sizeof name, "kernel-%016llx.bin",
                static_cast<unsigned long long>(key));
  std::filesystem::path file = cache_dir / name;
  if (auto hit = load(file, grid, n, gamma, settings)) return std::move(*hit);
  KernelMatrix K = (n == 1) ? build_line(std::move(grid), gamma, settings)
                            : build(std::move(grid), n, gamma, settings);
  std::error_code ec;
  std::filesystem::create_directories(cache_dir, ec);
  K.save(file);
  return K;
}

RadialField apply_convolution(const KernelMatrix& K, const RadialField& U) {
  return K.apply(U);
}

}
