// Copyright 2026 The ptscan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ptscan/assemble.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <thread>

#include "ptscan/errors.hpp"

namespace ptscan {
namespace {

constexpr int kMaxPower = 8;

// Dense band workspace for a real symmetric banded product: row i holds
// columns i-w..i+w.
class BandWork {
 public:
  BandWork(std::size_t n, std::size_t w) : n_(n), w_(w), data_(n * (2 * w + 1), 0.0) {}

  double get(std::size_t i, std::ptrdiff_t j) const {
    if (j < 0 || static_cast<std::size_t>(j) >= n_) return 0.0;
    const std::ptrdiff_t off = j - static_cast<std::ptrdiff_t>(i);
    if (std::abs(off) > static_cast<std::ptrdiff_t>(w_)) return 0.0;
    return data_[i * (2 * w_ + 1) + static_cast<std::size_t>(off + static_cast<std::ptrdiff_t>(w_))];
  }
  void set(std::size_t i, std::ptrdiff_t off, double v) {
    data_[i * (2 * w_ + 1) + static_cast<std::size_t>(off + static_cast<std::ptrdiff_t>(w_))] = v;
  }

 private:
  std::size_t n_;
  std::size_t w_;
  std::vector<double> data_;
};

// Keeps the upper triangle of a row-indexed band workspace and mirrors it.
BandedOperator crop_symmetric(const BandWork& work, std::size_t n, int width) {
  BandedOperator op;
  op.dim = n;
  for (int off = 0; off <= width; ++off) {
    if (static_cast<std::size_t>(off) >= n) break;
    std::vector<cplx> band(n - static_cast<std::size_t>(off));
    bool any = false;
    for (std::size_t t = 0; t < band.size(); ++t) {
      const double v = work.get(t, static_cast<std::ptrdiff_t>(t) + off);
      band[t] = v;
      any = any || v != 0.0;
    }
    if (!any) continue;
    if (off != 0) op.bands[-off] = band;
    op.bands[off] = std::move(band);
  }
  return op;
}

struct Factor {
  std::size_t mode;
  const BandedOperator* op;
};

struct PreparedTerm {
  cplx coefficient;
  std::vector<Factor> factors;
};

struct Layout {
  std::vector<std::size_t> states;
  std::vector<std::size_t> stride;
  std::vector<std::size_t> cutoff;
  std::vector<unsigned> parity;  // 0 full, else restricted with n = 2m + parity - 1
  std::size_t dim = 0;

  std::size_t basis_index(std::size_t mode, std::size_t m) const {
    return parity[mode] == 0 ? m : 2 * m + parity[mode] - 1;
  }
  std::size_t local_index(std::size_t mode, std::size_t n) const {
    return parity[mode] == 0 ? n : n / 2;
  }
};

struct RowChunk {
  std::vector<std::size_t> row_nnz;
  std::vector<std::size_t> cols;
  std::vector<cplx> values;
};

void assemble_rows(const Layout& layout, const std::vector<std::vector<double>>& diag,
                   const std::vector<PreparedTerm>& terms, std::size_t r0, std::size_t r1,
                   RowChunk& out) {
  const std::size_t d = layout.states.size();
  std::vector<std::pair<std::size_t, cplx>> pending;
  std::vector<std::size_t> n(d);
  out.row_nnz.assign(r1 - r0, 0);
  for (std::size_t r = r0; r < r1; ++r) {
    std::size_t rem = r;
    for (std::size_t i = 0; i < d; ++i) {
      n[i] = layout.basis_index(i, rem / layout.stride[i]);
      rem %= layout.stride[i];
    }
    double dsum = 0.0;
    for (std::size_t i = 0; i < d; ++i) dsum += diag[i][n[i]];
    pending.emplace_back(r, dsum);

    for (const auto& term : terms) {
      // Depth-first walk over one band choice per factor.
      struct Frame {
        std::map<std::ptrdiff_t, std::vector<cplx>>::const_iterator it;
        std::size_t col;
        cplx value;
      };
      const std::size_t nf = term.factors.size();
      std::vector<Frame> stack(nf + 1);
      stack[0].col = r;
      stack[0].value = term.coefficient;
      std::size_t level = 0;
      stack[0].it = term.factors[0].op->bands.begin();
      while (true) {
        const Factor& f = term.factors[level];
        auto& frame = stack[level];
        if (frame.it == f.op->bands.end()) {
          if (level == 0) break;
          --level;
          ++stack[level].it;
          continue;
        }
        const std::ptrdiff_t off = frame.it->first;
        const auto ni = static_cast<std::ptrdiff_t>(n[f.mode]);
        const std::ptrdiff_t nj = ni + off;
        if (nj < 0 || nj >= static_cast<std::ptrdiff_t>(layout.cutoff[f.mode]) ||
            (layout.parity[f.mode] != 0 && (off % 2) != 0)) {
          ++frame.it;
          continue;
        }
        const auto t = static_cast<std::size_t>(std::min(ni, nj));
        const cplx v = frame.value * frame.it->second[t];
        const std::size_t mi = layout.local_index(f.mode, static_cast<std::size_t>(ni));
        const std::size_t mj = layout.local_index(f.mode, static_cast<std::size_t>(nj));
        const std::size_t col = frame.col + mj * layout.stride[f.mode] - mi * layout.stride[f.mode];
        if (level + 1 == nf) {
          pending.emplace_back(col, v);
          ++frame.it;
        } else {
          ++level;
          stack[level].col = col;
          stack[level].value = v;
          stack[level].it = term.factors[level].op->bands.begin();
        }
      }
    }
    // Same merge rule as SparseBuilder: stable by column, sum in arrival
    // order, drop exact zeros.
    std::stable_sort(pending.begin(), pending.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t k = 0; k < pending.size();) {
      const std::size_t col = pending[k].first;
      cplx sum = 0.0;
      for (; k < pending.size() && pending[k].first == col; ++k) sum += pending[k].second;
      if (sum == cplx{}) continue;
      out.cols.push_back(col);
      out.values.push_back(sum);
      ++out.row_nnz[r - r0];
    }
    pending.clear();
  }
}

}  // namespace

std::string_view to_string(Sector s) {
  switch (s) {
    case Sector::full:
      return "full";
    case Sector::even:
      return "even";
    case Sector::odd:
      return "odd";
  }
  return "?";
}

Sector sector_from_string(std::string_view s) {
  if (s == "full") return Sector::full;
  if (s == "even") return Sector::even;
  if (s == "odd") return Sector::odd;
  throw DomainError("unknown parity sector '" + std::string(s) + "'");
}

Sector Truncation::sector(std::size_t mode) const {
  return sectors.empty() ? Sector::full : sectors.at(mode);
}

std::size_t Truncation::states(std::size_t mode) const {
  const std::size_t n = cutoffs.at(mode);
  switch (sector(mode)) {
    case Sector::full:
      return n;
    case Sector::even:
      return (n + 1) / 2;
    case Sector::odd:
      return n / 2;
  }
  return n;
}

std::size_t Truncation::dimension() const {
  std::size_t dim = 1;
  for (std::size_t i = 0; i < cutoffs.size(); ++i) {
    const std::size_t s = states(i);
    if (s != 0 && dim > std::numeric_limits<std::size_t>::max() / s) {
      throw ResourceError("truncation dimension overflows");
    }
    dim *= s;
  }
  return dim;
}

std::string Truncation::label() const {
  std::string out;
  for (std::size_t i = 0; i < cutoffs.size(); ++i) {
    if (i > 0) out += 'x';
    out += std::to_string(cutoffs[i]);
    if (sector(i) == Sector::even) out += 'e';
    if (sector(i) == Sector::odd) out += 'o';
  }
  return out;
}

Truncation uniform_truncation(std::size_t modes, std::size_t n) {
  return Truncation{std::vector<std::size_t>(modes, n), {}};
}

Truncation parse_truncation(std::string_view text) {
  Truncation t;
  bool any_sector = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find_first_of("x,", pos), text.size());
    std::string_view tok = text.substr(pos, end - pos);
    Sector s = Sector::full;
    if (!tok.empty() && (tok.back() == 'e' || tok.back() == 'o')) {
      s = tok.back() == 'e' ? Sector::even : Sector::odd;
      tok.remove_suffix(1);
      any_sector = true;
    }
    std::size_t n = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), n);
    if (ec != std::errc{} || ptr != tok.data() + tok.size() || n == 0) {
      throw DomainError("bad truncation '" + std::string(text) + "'");
    }
    t.cutoffs.push_back(n);
    t.sectors.push_back(s);
    pos = end + 1;
  }
  if (!any_sector) t.sectors.clear();
  return t;
}

cplx BandedOperator::at(std::size_t i, std::size_t j) const {
  const auto off = static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(i);
  const auto it = bands.find(off);
  if (it == bands.end()) return {};
  return it->second[std::min(i, j)];
}

DenseMatrix BandedOperator::to_dense() const {
  DenseMatrix m(dim);
  for (const auto& [off, band] : bands) {
    for (std::size_t t = 0; t < band.size(); ++t) {
      if (off >= 0) {
        m(t, t + static_cast<std::size_t>(off)) = band[t];
      } else {
        m(t + static_cast<std::size_t>(-off), t) = band[t];
      }
    }
  }
  return m;
}

double mode_frequency(double quad_coeff, double kinetic_coeff) {
  if (!(quad_coeff > 0.0) || !(kinetic_coeff > 0.0)) {
    throw DomainError("mode_frequency: coefficients must be positive");
  }
  return std::sqrt(4.0 * kinetic_coeff * quad_coeff);
}

BandedOperator single_mode_matrix(OperatorKind kind, int power, std::size_t n, double omega) {
  if (n == 0) throw DomainError("single_mode_matrix: N must be positive");
  if (!(omega > 0.0)) throw DomainError("single_mode_matrix: omega must be positive");

  if (kind == OperatorKind::momentum_squared) {
    // p^2 = (omega/2)[(2n+1) - a^2 - a^H^2]
    BandWork work(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
      const double di = static_cast<double>(i);
      work.set(i, 0, 0.5 * omega * (2.0 * di + 1.0));
      if (i + 2 < n) work.set(i, 2, -0.5 * omega * std::sqrt((di + 1.0) * (di + 2.0)));
    }
    return crop_symmetric(work, n, 2);
  }

  if (power < 0 || power > kMaxPower) {
    throw UnsupportedError("single_mode_matrix: x^" + std::to_string(power) + " exceeds the cap x^" +
                           std::to_string(kMaxPower));
  }
  const auto k = static_cast<std::size_t>(power);
  const std::size_t m = n + k;
  const double scale = 1.0 / std::sqrt(2.0 * omega);
  std::vector<double> xsub(m);  // <i|x|i+1>
  for (std::size_t i = 0; i + 1 < m; ++i) xsub[i] = scale * std::sqrt(static_cast<double>(i + 1));

  BandWork acc(m, k);
  for (std::size_t i = 0; i < m; ++i) acc.set(i, 0, 1.0);
  for (std::size_t step = 1; step <= k; ++step) {
    BandWork next(m, k);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::ptrdiff_t off = -static_cast<std::ptrdiff_t>(step);
           off <= static_cast<std::ptrdiff_t>(step); off += 2) {
        const std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i) + off;
        if (j < 0 || j >= static_cast<std::ptrdiff_t>(m)) continue;
        const auto ju = static_cast<std::size_t>(j);
        // (acc x)(i, j) = acc(i, j-1) x(j-1, j) + acc(i, j+1) x(j+1, j)
        const double left = ju > 0 ? acc.get(i, j - 1) * xsub[ju - 1] : 0.0;
        const double right = ju + 1 < m ? acc.get(i, j + 1) * xsub[ju] : 0.0;
        next.set(i, off, left + right);
      }
    }
    acc = std::move(next);
  }
  return crop_symmetric(acc, n, power);
}

BandedOperator box_position_matrix(std::size_t n, double half_width) {
  if (!(half_width > 0.0)) throw DomainError("box_position_matrix: half width must be positive");
  // <j|x|k> = -16 j k L / (pi^2 (j^2 - k^2)^2) for j - k odd, zero otherwise.
  BandedOperator op;
  op.dim = n;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  for (std::size_t off = 1; off < n; off += 2) {
    std::vector<cplx> band(n - off);
    for (std::size_t t = 0; t < band.size(); ++t) {
      const double j = static_cast<double>(t + 1);
      const double k = static_cast<double>(t + 1 + off);
      const double d = j * j - k * k;
      band[t] = -16.0 * j * k * half_width / (pi2 * d * d);
    }
    op.bands[-static_cast<std::ptrdiff_t>(off)] = band;
    op.bands[static_cast<std::ptrdiff_t>(off)] = std::move(band);
  }
  return op;
}

BandedOperator fourier_cosine_matrix(std::size_t n) {
  BandedOperator op;
  op.dim = n;
  if (n >= 2) {
    std::vector<cplx> band(n - 1, cplx{0.5});
    op.bands[-1] = band;
    op.bands[1] = std::move(band);
  }
  return op;
}

SparseMatrix assemble_sparse(const HamiltonianSpec& spec, const Truncation& trunc, double g,
                             const AssembleOptions& opts) {
  check_well_formed(spec);
  if (!validate_pt(spec)) throw DomainError("assemble: spec '" + spec.name + "' is not PT-symmetric");
  const std::size_t d = spec.mode_count();
  if (trunc.mode_count() != d) {
    throw DomainError("assemble: " + std::to_string(trunc.mode_count()) + " cutoffs for " +
                      std::to_string(d) + " modes");
  }
  if (!trunc.sectors.empty() && trunc.sectors.size() != d) {
    throw DomainError("assemble: sector list length differs from mode count");
  }

  Layout layout;
  layout.states.resize(d);
  layout.cutoff.resize(d);
  layout.parity.resize(d);
  layout.stride.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    if (trunc.cutoffs[i] == 0) throw DomainError("assemble: cutoffs must be positive");
    layout.cutoff[i] = trunc.cutoffs[i];
    layout.states[i] = trunc.states(i);
    const Sector s = trunc.sector(i);
    layout.parity[i] = s == Sector::full ? 0u : (s == Sector::even ? 1u : 2u);
    if (s == Sector::full) continue;
    if (spec.modes[i].basis != BasisKind::oscillator) {
      throw DomainError("assemble: parity sectors need an oscillator basis (mode " + std::to_string(i) + ")");
    }
    for (const auto& term : spec.terms) {
      if (term.kind == TermKind::position && term.exponents[i] % 2 != 0) {
        throw DomainError("assemble: Hamiltonian is not parity-invariant in mode " + std::to_string(i));
      }
    }
  }
  layout.dim = trunc.dimension();
  if (layout.dim > opts.max_dim) {
    throw ResourceError("assemble: dimension " + std::to_string(layout.dim) + " exceeds cap " +
                        std::to_string(opts.max_dim));
  }
  if (layout.dim == 0) throw DomainError("assemble: empty parity sector");
  for (std::size_t i = d; i-- > 0;) {
    layout.stride[i] = (i + 1 == d) ? 1 : layout.stride[i + 1] * layout.states[i + 1];
  }

  // Quadratic part per mode, diagonal in every supported basis.
  std::vector<std::vector<double>> diag(d);
  std::vector<double> omega(d, 1.0);
  for (std::size_t i = 0; i < d; ++i) {
    const auto& m = spec.modes[i];
    const std::size_t n = layout.cutoff[i];
    diag[i].resize(n);
    switch (m.basis) {
      case BasisKind::oscillator: {
        const double w = mode_frequency(m.quad_coeff, m.kinetic_coeff);
        omega[i] = std::sqrt(m.quad_coeff / m.kinetic_coeff);
        for (std::size_t t = 0; t < n; ++t) diag[i][t] = w * (static_cast<double>(t) + 0.5);
        break;
      }
      case BasisKind::fourier_sine:
      case BasisKind::sine_box: {
        if (m.quad_coeff != 0.0) {
          throw UnsupportedError("assemble: x^2 in a " + std::string(to_string(m.basis)) + " mode");
        }
        const double unit = m.basis == BasisKind::sine_box ? std::numbers::pi / (2.0 * m.half_width) : 1.0;
        for (std::size_t t = 0; t < n; ++t) {
          const double q = unit * static_cast<double>(t + 1);
          diag[i][t] = m.kinetic_coeff * q * q;
        }
        break;
      }
    }
  }

  std::vector<std::unique_ptr<BandedOperator>> storage;
  std::vector<PreparedTerm> terms;
  auto keep = [&storage](BandedOperator op) {
    storage.push_back(std::make_unique<BandedOperator>(std::move(op)));
    return storage.back().get();
  };
  for (std::size_t t = 0; t < spec.terms.size(); ++t) {
    const auto& term = spec.terms[t];
    PreparedTerm pt;
    pt.coefficient = term.coefficient * (t == spec.coupling_term ? g : 1.0);
    if (pt.coefficient == cplx{}) continue;
    switch (term.kind) {
      case TermKind::position:
        for (std::size_t i = 0; i < d; ++i) {
          const int k = term.exponents[i];
          if (k == 0) continue;
          const auto& m = spec.modes[i];
          if (m.basis == BasisKind::oscillator) {
            pt.factors.push_back(
                {i, keep(single_mode_matrix(OperatorKind::position_power, k, layout.cutoff[i], omega[i]))});
          } else if (m.basis == BasisKind::sine_box && k == 1) {
            pt.factors.push_back({i, keep(box_position_matrix(layout.cutoff[i], m.half_width))});
          } else {
            throw UnsupportedError("assemble: x^" + std::to_string(k) + " in a " +
                                   std::string(to_string(m.basis)) + " mode");
          }
        }
        break;
      case TermKind::momentum: {
        const std::size_t i = term.mode;
        if (spec.modes[i].basis == BasisKind::oscillator) {
          pt.factors.push_back(
              {i, keep(single_mode_matrix(OperatorKind::momentum_squared, 2, layout.cutoff[i], omega[i]))});
        } else {
          // p^2 is diagonal in both sine bases; reuse the kinetic diagonal.
          BandedOperator op;
          op.dim = layout.cutoff[i];
          std::vector<cplx> band(op.dim);
          for (std::size_t s = 0; s < op.dim; ++s) band[s] = diag[i][s] / spec.modes[i].kinetic_coeff;
          op.bands[0] = std::move(band);
          pt.factors.push_back({i, keep(std::move(op))});
        }
        break;
      }
      case TermKind::cosine:
        pt.factors.push_back({term.mode, keep(fourier_cosine_matrix(layout.cutoff[term.mode]))});
        break;
    }
    if (pt.factors.empty()) {
      // Constant term: fold into the diagonal through an identity factor.
      BandedOperator id;
      id.dim = layout.cutoff[0];
      id.bands[0] = std::vector<cplx>(id.dim, cplx{1.0});
      pt.factors.push_back({0, keep(std::move(id))});
    }
    terms.push_back(std::move(pt));
  }

  const unsigned workers = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(
                                                                             std::min<std::size_t>(layout.dim, 64))));
  std::vector<RowChunk> chunks(workers);
  std::vector<std::size_t> bounds(workers + 1);
  for (unsigned w = 0; w <= workers; ++w) bounds[w] = layout.dim * w / workers;
  if (workers == 1) {
    assemble_rows(layout, diag, terms, 0, layout.dim, chunks[0]);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] { assemble_rows(layout, diag, terms, bounds[w], bounds[w + 1], chunks[w]); });
    }
    for (auto& th : pool) th.join();
  }

  SparseMatrix a;
  a.dim = layout.dim;
  a.row_ptr.assign(layout.dim + 1, 0);
  std::size_t total = 0;
  for (const auto& c : chunks) total += c.cols.size();
  a.col_idx.reserve(total);
  a.values.reserve(total);
  std::size_t row = 0;
  for (const auto& c : chunks) {
    for (std::size_t k : c.row_nnz) {
      a.row_ptr[row + 1] = a.row_ptr[row] + k;
      ++row;
    }
    a.col_idx.insert(a.col_idx.end(), c.cols.begin(), c.cols.end());
    a.values.insert(a.values.end(), c.values.begin(), c.values.end());
  }
  return a;
}

SparseMatrix assemble_trig(const HamiltonianSpec& spec, std::size_t n, double g) {
  if (spec.mode_count() != 1 || !spec.is_trigonometric()) {
    throw DomainError("assemble_trig: '" + spec.name + "' is not a one-mode trigonometric model");
  }
  if (n < 2) throw DomainError("assemble_trig: N must be at least 2");
  return assemble_sparse(spec, Truncation{{n}, {}}, g);
}

}  // namespace ptscan
