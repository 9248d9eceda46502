#include "sqg/zalgebra.hpp"

#include <algorithm>
#include <sstream>

namespace sqg {

namespace {

// floor division/modulus, divisor > 0
Int floordiv(const Int& a, const Int& b) {
  Int q = a / b;
  if (a % b != 0 && ((a < 0) != (b < 0))) q -= 1;
  return q;
}
Int floormod(const Int& a, const Int& b) { return a - floordiv(a, b) * b; }

}  // namespace

IntMatrix::IntMatrix(std::size_t r, std::size_t c, std::vector<std::vector<long long>> init)
    : rows(r), cols(c), a(r * c, Int(0)) {
  if (init.size() != r) throw SqgError("IntMatrix init: row count mismatch");
  for (std::size_t i = 0; i < r; ++i) {
    if (init[i].size() != c) throw SqgError("IntMatrix init: col count mismatch");
    for (std::size_t j = 0; j < c; ++j) at(i, j) = init[i][j];
  }
}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::diag(const Vec& d) {
  IntMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m.at(i, i) = d[i];
  return m;
}

IntMatrix IntMatrix::from_rows(const std::vector<Vec>& rws, std::size_t ncols) {
  IntMatrix m(rws.size(), ncols);
  for (std::size_t i = 0; i < rws.size(); ++i) m.set_row(i, rws[i]);
  return m;
}

Vec IntMatrix::row(std::size_t i) const {
  Vec v(cols);
  for (std::size_t j = 0; j < cols; ++j) v[j] = at(i, j);
  return v;
}

void IntMatrix::set_row(std::size_t i, const Vec& v) {
  if (v.size() != cols) throw SqgError("set_row: size mismatch");
  for (std::size_t j = 0; j < cols; ++j) at(i, j) = v[j];
}

IntMatrix IntMatrix::mul(const IntMatrix& o) const {
  if (cols != o.rows) throw SqgError("matrix mul: shape mismatch");
  IntMatrix r(rows, o.cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t k = 0; k < cols; ++k) {
      const Int& x = at(i, k);
      if (x == 0) continue;
      for (std::size_t j = 0; j < o.cols; ++j) r.at(i, j) += x * o.at(k, j);
    }
  return r;
}

IntMatrix IntMatrix::transpose() const {
  IntMatrix r(cols, rows);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) r.at(j, i) = at(i, j);
  return r;
}

IntMatrix IntMatrix::vstack(const IntMatrix& o) const {
  if (cols != o.cols && rows != 0 && o.rows != 0) throw SqgError("vstack: col mismatch");
  std::size_t c = rows == 0 ? o.cols : cols;
  IntMatrix r(rows + o.rows, c);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) r.at(i, j) = at(i, j);
  for (std::size_t i = 0; i < o.rows; ++i)
    for (std::size_t j = 0; j < o.cols; ++j) r.at(rows + i, j) = o.at(i, j);
  return r;
}

bool IntMatrix::is_zero() const {
  for (const auto& x : a)
    if (x != 0) return false;
  return true;
}

std::string IntMatrix::str() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < rows; ++i) {
    os << (i ? ",[" : "[");
    for (std::size_t j = 0; j < cols; ++j) os << (j ? "," : "") << at(i, j);
    os << "]";
  }
  os << "]";
  return os.str();
}

Vec mul_row(const Vec& x, const IntMatrix& m) {
  if (x.size() != m.rows) throw SqgError("mul_row: size mismatch");
  Vec r(m.cols, Int(0));
  for (std::size_t i = 0; i < m.rows; ++i) {
    if (x[i] == 0) continue;
    for (std::size_t j = 0; j < m.cols; ++j) r[j] += x[i] * m.at(i, j);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Smith normal form
// ---------------------------------------------------------------------------

Vec SnfResult::diagonal() const {
  std::size_t n = std::min(d.rows, d.cols);
  Vec r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = d.at(i, i);
  return r;
}

SnfResult smith_normal_form(const IntMatrix& m) {
  SnfResult res;
  res.d = m;
  res.u = IntMatrix::identity(m.rows);
  res.v = IntMatrix::identity(m.cols);
  res.v_inv = IntMatrix::identity(m.cols);
  IntMatrix& d = res.d;
  IntMatrix& u = res.u;
  IntMatrix& v = res.v;
  IntMatrix& vi = res.v_inv;

  auto row_swap = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t c = 0; c < d.cols; ++c) std::swap(d.at(i, c), d.at(j, c));
    for (std::size_t c = 0; c < u.cols; ++c) std::swap(u.at(i, c), u.at(j, c));
  };
  auto col_swap = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t r = 0; r < d.rows; ++r) std::swap(d.at(r, i), d.at(r, j));
    for (std::size_t r = 0; r < v.rows; ++r) std::swap(v.at(r, i), v.at(r, j));
    for (std::size_t c = 0; c < vi.cols; ++c) std::swap(vi.at(i, c), vi.at(j, c));
  };
  auto row_sub = [&](std::size_t i, std::size_t j, const Int& q) {
    // row_i -= q * row_j
    if (q == 0) return;
    for (std::size_t c = 0; c < d.cols; ++c) d.at(i, c) -= q * d.at(j, c);
    for (std::size_t c = 0; c < u.cols; ++c) u.at(i, c) -= q * u.at(j, c);
  };
  auto col_sub = [&](std::size_t i, std::size_t j, const Int& q) {
    // col_i -= q * col_j
    if (q == 0) return;
    for (std::size_t r = 0; r < d.rows; ++r) d.at(r, i) -= q * d.at(r, j);
    for (std::size_t r = 0; r < v.rows; ++r) v.at(r, i) -= q * v.at(r, j);
    for (std::size_t c = 0; c < vi.cols; ++c) vi.at(j, c) += q * vi.at(i, c);
  };
  auto row_neg = [&](std::size_t i) {
    for (std::size_t c = 0; c < d.cols; ++c) d.at(i, c) = -d.at(i, c);
    for (std::size_t c = 0; c < u.cols; ++c) u.at(i, c) = -u.at(i, c);
  };

  std::size_t t = 0;
  std::size_t n = std::min(d.rows, d.cols);
  while (t < n) {
    // pick nonzero entry of smallest magnitude in the submatrix
    bool found = false;
    std::size_t pi = t, pj = t;
    Int best = 0;
    for (std::size_t i = t; i < d.rows && best != 1; ++i)
      for (std::size_t j = t; j < d.cols; ++j) {
        if (d.at(i, j) == 0) continue;
        Int mag = abs(d.at(i, j));
        if (!found || mag < best) {
          found = true;
          best = mag;
          pi = i;
          pj = j;
          if (best == 1) break;
        }
      }
    if (!found) break;
    row_swap(t, pi);
    col_swap(t, pj);

    bool clean = true;
    for (std::size_t i = t + 1; i < d.rows; ++i)
      if (d.at(i, t) != 0) {
        Int q = d.at(i, t) / d.at(t, t);
        row_sub(i, t, q);
        if (d.at(i, t) != 0) clean = false;
      }
    for (std::size_t j = t + 1; j < d.cols; ++j)
      if (d.at(t, j) != 0) {
        Int q = d.at(t, j) / d.at(t, t);
        col_sub(j, t, q);
        if (d.at(t, j) != 0) clean = false;
      }
    if (!clean) continue;  // smaller pivot now exists

    // make pivot divide the rest of the submatrix
    bool divides = true;
    for (std::size_t i = t + 1; i < d.rows && divides; ++i)
      for (std::size_t j = t + 1; j < d.cols && divides; ++j)
        if (d.at(i, j) % d.at(t, t) != 0) {
          row_sub(t, i, Int(-1));  // row_t += row_i, creates a reducible entry
          divides = false;
        }
    if (!divides) continue;

    if (d.at(t, t) < 0) row_neg(t);
    ++t;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Hermite normal form
// ---------------------------------------------------------------------------

HnfResult hermite_normal_form(const IntMatrix& m) {
  HnfResult res;
  res.h = m;
  res.u = IntMatrix::identity(m.rows);
  IntMatrix& h = res.h;
  IntMatrix& u = res.u;

  auto row_swap = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t c = 0; c < h.cols; ++c) std::swap(h.at(i, c), h.at(j, c));
    for (std::size_t c = 0; c < u.cols; ++c) std::swap(u.at(i, c), u.at(j, c));
  };
  auto row_sub = [&](std::size_t i, std::size_t j, const Int& q) {
    if (q == 0) return;
    for (std::size_t c = 0; c < h.cols; ++c) h.at(i, c) -= q * h.at(j, c);
    for (std::size_t c = 0; c < u.cols; ++c) u.at(i, c) -= q * u.at(j, c);
  };
  auto row_neg = [&](std::size_t i) {
    for (std::size_t c = 0; c < h.cols; ++c) h.at(i, c) = -h.at(i, c);
    for (std::size_t c = 0; c < u.cols; ++c) u.at(i, c) = -u.at(i, c);
  };

  std::size_t r = 0;
  for (std::size_t c = 0; c < h.cols && r < h.rows; ++c) {
    // euclidean elimination below row r in column c
    for (;;) {
      bool found = false;
      std::size_t best_i = r;
      Int best = 0;
      for (std::size_t i = r; i < h.rows; ++i) {
        if (h.at(i, c) == 0) continue;
        Int mag = abs(h.at(i, c));
        if (!found || mag < best) {
          found = true;
          best = mag;
          best_i = i;
          if (best == 1) break;
        }
      }
      if (!found) break;
      row_swap(r, best_i);
      bool done = true;
      for (std::size_t i = r + 1; i < h.rows; ++i)
        if (h.at(i, c) != 0) {
          Int q = h.at(i, c) / h.at(r, c);
          row_sub(i, r, q);
          if (h.at(i, c) != 0) done = false;
        }
      if (done) break;
    }
    if (h.at(r, c) == 0) continue;
    if (h.at(r, c) < 0) row_neg(r);
    for (std::size_t i = 0; i < r; ++i) {
      Int q = floordiv(h.at(i, c), h.at(r, c));
      row_sub(i, r, q);
    }
    res.pivot_col.push_back(c);
    ++r;
  }
  res.rank = r;
  return res;
}

Vec HnfResult::reduce(const Vec& v, Vec* combo) const {
  Vec r = v;
  if (combo) *combo = Vec(rank, Int(0));
  for (std::size_t k = 0; k < rank; ++k) {
    std::size_t c = pivot_col[k];
    Int q = floordiv(r[c], h.at(k, c));
    if (q != 0)
      for (std::size_t j = 0; j < h.cols; ++j) r[j] -= q * h.at(k, j);
    if (combo) (*combo)[k] = q;
  }
  return r;
}

IntMatrix HnfResult::basis() const {
  IntMatrix b(rank, h.cols);
  for (std::size_t i = 0; i < rank; ++i)
    for (std::size_t j = 0; j < h.cols; ++j) b.at(i, j) = h.at(i, j);
  return b;
}

IntMatrix hnf_basis_only(const IntMatrix& m) {
  IntMatrix h = m;
  std::size_t r = 0;
  for (std::size_t c = 0; c < h.cols && r < h.rows; ++c) {
    for (;;) {
      bool found = false;
      std::size_t best_i = r;
      Int best = 0;
      for (std::size_t i = r; i < h.rows; ++i) {
        if (h.at(i, c) == 0) continue;
        Int mag = abs(h.at(i, c));
        if (!found || mag < best) {
          found = true;
          best = mag;
          best_i = i;
          if (best == 1) break;
        }
      }
      if (!found) break;
      if (best_i != r)
        for (std::size_t j = 0; j < h.cols; ++j) std::swap(h.at(r, j), h.at(best_i, j));
      bool done = true;
      for (std::size_t i = r + 1; i < h.rows; ++i)
        if (h.at(i, c) != 0) {
          Int q = h.at(i, c) / h.at(r, c);
          if (q != 0)
            for (std::size_t j = 0; j < h.cols; ++j) h.at(i, j) -= q * h.at(r, j);
          if (h.at(i, c) != 0) done = false;
        }
      if (done) break;
    }
    if (h.at(r, c) == 0) continue;
    if (h.at(r, c) < 0)
      for (std::size_t j = 0; j < h.cols; ++j) h.at(r, j) = -h.at(r, j);
    for (std::size_t i = 0; i < r; ++i) {
      Int q = floordiv(h.at(i, c), h.at(r, c));
      if (q != 0)
        for (std::size_t j = 0; j < h.cols; ++j) h.at(i, j) -= q * h.at(r, j);
    }
    ++r;
  }
  IntMatrix out(r, h.cols);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < h.cols; ++j) out.at(i, j) = h.at(i, j);
  return out;
}

IntMatrix left_nullspace(const IntMatrix& m) {
  HnfResult r = hermite_normal_form(m);
  IntMatrix out(m.rows - r.rank, m.rows);
  for (std::size_t i = r.rank; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.rows; ++j) out.at(i - r.rank, j) = r.u.at(i, j);
  return out;
}

std::optional<Vec> solve_left(const IntMatrix& m, const Vec& b) {
  if (b.size() != m.cols) throw SqgError("solve_left: size mismatch");
  HnfResult r = hermite_normal_form(m);
  Vec residual = b;
  Vec y(r.rank, Int(0));
  for (std::size_t k = 0; k < r.rank; ++k) {
    std::size_t c = r.pivot_col[k];
    if (residual[c] % r.h.at(k, c) != 0) {
      // may still fail later; exact division required at pivots
    }
    Int q = residual[c] / r.h.at(k, c);
    if (residual[c] % r.h.at(k, c) != 0) return std::nullopt;
    y[k] = q;
    for (std::size_t j = 0; j < m.cols; ++j) residual[j] -= q * r.h.at(k, j);
  }
  if (!is_zero_vec(residual)) return std::nullopt;
  Vec x(m.rows, Int(0));
  for (std::size_t k = 0; k < r.rank; ++k)
    for (std::size_t j = 0; j < m.rows; ++j) x[j] += y[k] * r.u.at(k, j);
  return x;
}

IntMatrix lattice_sum(const IntMatrix& a, const IntMatrix& b) {
  return hnf_basis_only(a.vstack(b));
}

IntMatrix lattice_preimage(const IntMatrix& m, const IntMatrix& l) {
  IntMatrix negl(l.rows, l.cols);
  for (std::size_t i = 0; i < l.rows; ++i)
    for (std::size_t j = 0; j < l.cols; ++j) negl.at(i, j) = -l.at(i, j);
  IntMatrix ns = left_nullspace(m.vstack(negl));
  IntMatrix xpart(ns.rows, m.rows);
  for (std::size_t i = 0; i < ns.rows; ++i)
    for (std::size_t j = 0; j < m.rows; ++j) xpart.at(i, j) = ns.at(i, j);
  return hermite_normal_form(xpart).basis();
}

// ---------------------------------------------------------------------------
// FgAbelianGroup
// ---------------------------------------------------------------------------

struct FgabData {
  std::size_t ngens = 0;
  IntMatrix rels;       // r x ngens
  Vec factors;          // canonical invariant factors (nonunit torsion, then zeros)
  IntMatrix to_can;     // ngens x rank
  IntMatrix from_can;   // rank x ngens
  std::size_t rank = 0;
};

namespace {

Vec normalize_coords(const FgabData& d, Vec c) {
  for (std::size_t i = 0; i < d.rank; ++i)
    if (d.factors[i] > 0) c[i] = floormod(c[i], d.factors[i]);
  return c;
}

std::shared_ptr<const FgabData> make_data(std::size_t gens, const IntMatrix& rels) {
  auto d = std::make_shared<FgabData>();
  d->ngens = gens;
  if (rels.cols != gens && rels.rows != 0) throw SqgError("presentation: rels col count != gens");
  d->rels = rels.rows ? rels : IntMatrix(0, gens);
  // tall relation lists are reduced to a lattice basis first; the row span
  // and hence the canonical data are unchanged
  IntMatrix reduced = d->rels.rows > gens ? hnf_basis_only(d->rels) : d->rels;
  SnfResult s = smith_normal_form(reduced);
  Vec diag(gens, Int(0));
  {
    Vec sd = s.diagonal();
    for (std::size_t i = 0; i < sd.size(); ++i) diag[i] = sd[i];
  }
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < gens; ++i)
    if (diag[i] != 1) keep.push_back(i);
  d->rank = keep.size();
  d->factors.resize(d->rank);
  for (std::size_t k = 0; k < keep.size(); ++k) d->factors[k] = diag[keep[k]];
  d->to_can = IntMatrix(gens, d->rank);
  // rels.rows==0 -> v is identity of size gens
  const IntMatrix& v = rels.rows ? s.v : IntMatrix::identity(gens);
  const IntMatrix& vinv = rels.rows ? s.v_inv : IntMatrix::identity(gens);
  for (std::size_t i = 0; i < gens; ++i)
    for (std::size_t k = 0; k < keep.size(); ++k) d->to_can.at(i, k) = v.at(i, keep[k]);
  d->from_can = IntMatrix(d->rank, gens);
  for (std::size_t k = 0; k < keep.size(); ++k)
    for (std::size_t j = 0; j < gens; ++j) d->from_can.at(k, j) = vinv.at(keep[k], j);
  return d;
}

}  // namespace

FgAbelianGroup::FgAbelianGroup() : d_(make_data(0, IntMatrix(0, 0))) {}

FgAbelianGroup FgAbelianGroup::from_presentation(std::size_t gens, const IntMatrix& rels) {
  return FgAbelianGroup(make_data(gens, rels));
}

FgAbelianGroup FgAbelianGroup::from_factors(const Vec& factors) {
  IntMatrix rels(0, factors.size());
  std::vector<Vec> rows;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (factors[i] != 0) {
      Vec r(factors.size(), Int(0));
      r[i] = factors[i];
      rows.push_back(r);
    }
  }
  return from_presentation(factors.size(), IntMatrix::from_rows(rows, factors.size()));
}

FgAbelianGroup FgAbelianGroup::free(std::size_t n) { return from_presentation(n, IntMatrix(0, n)); }

std::size_t FgAbelianGroup::ngens() const { return d_->ngens; }
const IntMatrix& FgAbelianGroup::rels() const { return d_->rels; }
const IntMatrix& FgAbelianGroup::to_can() const { return d_->to_can; }
const IntMatrix& FgAbelianGroup::from_can() const { return d_->from_can; }
const Vec& FgAbelianGroup::invariant_factors() const { return d_->factors; }
std::size_t FgAbelianGroup::rank() const { return d_->rank; }

std::size_t FgAbelianGroup::free_rank() const {
  std::size_t n = 0;
  for (const auto& f : d_->factors)
    if (f == 0) ++n;
  return n;
}

bool FgAbelianGroup::is_trivial() const { return d_->rank == 0; }

bool FgAbelianGroup::is_finite() const { return free_rank() == 0; }

Int FgAbelianGroup::order() const {
  if (!is_finite()) throw SqgError("order: infinite group");
  Int n = 1;
  for (const auto& f : d_->factors) n *= f;
  return n;
}

FgabElement FgAbelianGroup::element(Vec canonical_coords) const {
  if (canonical_coords.size() != d_->rank) throw SqgError("element: coord size mismatch");
  FgabElement e;
  e.coords = normalize_coords(*d_, std::move(canonical_coords));
  e.data = d_;
  return e;
}

FgabElement FgAbelianGroup::from_presentation_coords(const Vec& x) const {
  if (x.size() != d_->ngens) throw SqgError("from_presentation_coords: size mismatch");
  return element(mul_row(x, d_->to_can));
}

FgabElement FgAbelianGroup::zero() const { return element(Vec(d_->rank, Int(0))); }

FgabElement FgAbelianGroup::pres_gen(std::size_t i) const {
  Vec x(d_->ngens, Int(0));
  x.at(i) = 1;
  return from_presentation_coords(x);
}

FgabElement FgAbelianGroup::canonical_gen(std::size_t i) const {
  Vec c(d_->rank, Int(0));
  c.at(i) = 1;
  return element(c);
}

std::vector<FgabElement> FgAbelianGroup::canonical_gens() const {
  std::vector<FgabElement> v;
  for (std::size_t i = 0; i < d_->rank; ++i) v.push_back(canonical_gen(i));
  return v;
}

bool FgAbelianGroup::same_shape(const FgAbelianGroup& o) const {
  return d_->factors == o.d_->factors;
}

bool FgAbelianGroup::same_instance(const FgAbelianGroup& o) const { return d_ == o.d_; }

std::vector<FgabElement> FgAbelianGroup::enumerate() const {
  if (!is_finite()) throw SqgError("enumerate: infinite group");
  std::vector<FgabElement> out;
  Vec c(d_->rank, Int(0));
  for (;;) {
    out.push_back(element(c));
    std::size_t i = 0;
    for (; i < d_->rank; ++i) {
      c[i] += 1;
      if (c[i] < d_->factors[i]) break;
      c[i] = 0;
    }
    if (i == d_->rank) break;
  }
  return out;
}

std::optional<Vec> FgAbelianGroup::solve(const std::vector<FgabElement>& span,
                                         const FgabElement& target) const {
  std::vector<Vec> rows;
  for (const auto& e : span) rows.push_back(e.coords);
  std::size_t ntors = 0;
  for (std::size_t i = 0; i < d_->rank; ++i)
    if (d_->factors[i] > 0) {
      Vec r(d_->rank, Int(0));
      r[i] = d_->factors[i];
      rows.push_back(r);
      ++ntors;
    }
  auto sol = solve_left(IntMatrix::from_rows(rows, d_->rank), target.coords);
  if (!sol) return std::nullopt;
  Vec out(span.size());
  for (std::size_t i = 0; i < span.size(); ++i) out[i] = (*sol)[i];
  return out;
}

bool FgAbelianGroup::in_span(const std::vector<FgabElement>& span, const FgabElement& target) const {
  return solve(span, target).has_value();
}

std::string FgAbelianGroup::str() const {
  std::ostringstream os;
  os << "Z^" << free_rank();
  bool first = true;
  std::ostringstream tors;
  for (const auto& f : d_->factors)
    if (f != 0) {
      tors << (first ? "" : "+") << "Z/" << f;
      first = false;
    }
  if (free_rank() == 0 && first) return "0";
  if (free_rank() == 0) return tors.str();
  if (first) return os.str();
  return os.str() + "+" + tors.str();
}

// FgabElement ops

FgabElement FgabElement::operator+(const FgabElement& o) const {
  if (data != o.data && data->factors != o.data->factors)
    throw SqgError("element add: owner mismatch");
  FgabElement e;
  e.data = data;
  e.coords = normalize_coords(*data, add_vec(coords, o.coords));
  return e;
}

FgabElement FgabElement::operator-(const FgabElement& o) const { return *this + (-o); }

FgabElement FgabElement::operator-() const {
  FgabElement e;
  e.data = data;
  e.coords = normalize_coords(*data, neg_vec(coords));
  return e;
}

FgabElement FgabElement::scaled(const Int& c) const {
  FgabElement e;
  e.data = data;
  e.coords = normalize_coords(*data, scale_vec(c, coords));
  return e;
}

bool FgabElement::operator==(const FgabElement& o) const { return coords == o.coords; }

bool FgabElement::is_zero() const { return is_zero_vec(coords); }

std::string FgabElement::str() const {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < coords.size(); ++i) os << (i ? "," : "") << coords[i];
  os << ")";
  return os.str();
}

// ---------------------------------------------------------------------------
// FgabHom
// ---------------------------------------------------------------------------

FgabHom::FgabHom(FgAbelianGroup src, FgAbelianGroup dst, IntMatrix mat)
    : src_(std::move(src)), dst_(std::move(dst)), mat_(std::move(mat)) {
  if (mat_.rows != src_.rank() || mat_.cols != dst_.rank())
    throw SqgError("FgabHom: matrix shape mismatch");
  // torsion must be respected
  const Vec& fs = src_.invariant_factors();
  for (std::size_t i = 0; i < src_.rank(); ++i) {
    if (fs[i] == 0) continue;
    FgabElement img = dst_.element(scale_vec(fs[i], mat_.row(i)));
    if (!img.is_zero()) throw SqgError("FgabHom: torsion not respected at generator " + std::to_string(i));
  }
  // normalize matrix rows into canonical coordinate ranges
  for (std::size_t i = 0; i < mat_.rows; ++i) mat_.set_row(i, dst_.element(mat_.row(i)).coords);
}

FgabHom FgabHom::identity(const FgAbelianGroup& g) {
  return FgabHom(g, g, IntMatrix::identity(g.rank()));
}

FgabHom FgabHom::zero(const FgAbelianGroup& src, const FgAbelianGroup& dst) {
  return FgabHom(src, dst, IntMatrix(src.rank(), dst.rank()));
}

FgabHom FgabHom::from_pres_images(const FgAbelianGroup& src, const FgAbelianGroup& dst,
                                  const std::vector<FgabElement>& images) {
  if (images.size() != src.ngens()) throw SqgError("from_pres_images: wrong image count");
  IntMatrix mat(src.rank(), dst.rank());
  for (std::size_t k = 0; k < src.rank(); ++k) {
    FgabElement acc = dst.zero();
    for (std::size_t i = 0; i < src.ngens(); ++i) {
      const Int& c = k < src.rank() ? src.data()->from_can.at(k, i) : Int(0);
      if (c != 0) acc = acc + images[i].scaled(c);
    }
    mat.set_row(k, acc.coords);
  }
  return FgabHom(src, dst, mat);
}

FgabHom FgabHom::from_gen_images(const FgAbelianGroup& src, const FgAbelianGroup& dst,
                                 const std::vector<FgabElement>& images) {
  if (images.size() != src.rank()) throw SqgError("from_gen_images: wrong image count");
  IntMatrix mat(src.rank(), dst.rank());
  for (std::size_t i = 0; i < src.rank(); ++i) mat.set_row(i, images[i].coords);
  return FgabHom(src, dst, mat);
}

FgabElement FgabHom::apply(const FgabElement& x) const {
  return dst_.element(mul_row(x.coords, mat_));
}

FgabHom FgabHom::then(const FgabHom& g) const {
  if (!dst_.same_shape(g.src())) throw SqgError("then: middle group mismatch");
  return FgabHom(src_, g.dst(), mat_.mul(g.matrix()));
}

FgabHom FgabHom::plus(const FgabHom& g) const {
  IntMatrix m = mat_;
  for (std::size_t i = 0; i < m.a.size(); ++i) m.a[i] += g.mat_.a[i];
  return FgabHom(src_, dst_, m);
}

FgabHom FgabHom::minus(const FgabHom& g) const { return plus(g.negate()); }

FgabHom FgabHom::negate() const {
  IntMatrix m = mat_;
  for (auto& x : m.a) x = -x;
  return FgabHom(src_, dst_, m);
}

FgabHom FgabHom::scaled(const Int& c) const {
  IntMatrix m = mat_;
  for (auto& x : m.a) x *= c;
  return FgabHom(src_, dst_, m);
}

bool FgabHom::is_zero() const { return mat_.is_zero(); }

bool FgabHom::equals(const FgabHom& g) const { return mat_ == g.mat_; }

std::pair<FgAbelianGroup, FgabHom> FgabHom::kernel() const {
  // {y in src : y*mat = 0 in dst}; stack destination torsion rows
  std::vector<Vec> stack_rows;
  for (std::size_t i = 0; i < mat_.rows; ++i) stack_rows.push_back(mat_.row(i));
  const Vec& fd = dst_.invariant_factors();
  for (std::size_t j = 0; j < dst_.rank(); ++j)
    if (fd[j] > 0) {
      Vec r(dst_.rank(), Int(0));
      r[j] = fd[j];
      stack_rows.push_back(r);
    }
  IntMatrix stacked = IntMatrix::from_rows(stack_rows, dst_.rank());
  IntMatrix ns = left_nullspace(stacked);
  // y-part: first src.rank() columns; HNF for a clean basis
  IntMatrix ymat(ns.rows, src_.rank());
  for (std::size_t i = 0; i < ns.rows; ++i)
    for (std::size_t j = 0; j < src_.rank(); ++j) ymat.at(i, j) = ns.at(i, j);
  IntMatrix kbasis = hermite_normal_form(ymat).basis();
  // relations among the kernel generators: combos landing in src torsion
  std::vector<Vec> tors_rows;
  const Vec& fs = src_.invariant_factors();
  for (std::size_t j = 0; j < src_.rank(); ++j)
    if (fs[j] > 0) {
      Vec r(src_.rank(), Int(0));
      r[j] = fs[j];
      tors_rows.push_back(r);
    }
  IntMatrix tors = IntMatrix::from_rows(tors_rows, src_.rank());
  IntMatrix krels = lattice_preimage(kbasis, tors);
  FgAbelianGroup K = FgAbelianGroup::from_presentation(kbasis.rows, krels);
  std::vector<FgabElement> incl_images;
  for (std::size_t i = 0; i < kbasis.rows; ++i) incl_images.push_back(src_.element(kbasis.row(i)));
  FgabHom incl = FgabHom::from_pres_images(K, src_, incl_images);
  return {K, incl};
}

std::pair<FgAbelianGroup, FgabHom> FgabHom::cokernel() const {
  std::vector<FgabElement> imgs;
  for (std::size_t i = 0; i < src_.rank(); ++i) imgs.push_back(dst_.element(mat_.row(i)));
  return quotient_by_elements(dst_, imgs);
}

bool FgabHom::is_injective() const { return kernel().first.is_trivial(); }
bool FgabHom::is_surjective() const { return cokernel().first.is_trivial(); }
bool FgabHom::is_iso() const { return is_injective() && is_surjective(); }

FgabHom hom_inverse(const FgabHom& f) {
  // one Hermite factorization, then back-substitution per generator
  const FgAbelianGroup& src = f.src();
  const FgAbelianGroup& dst = f.dst();
  std::vector<Vec> rows;
  for (std::size_t i = 0; i < src.rank(); ++i) rows.push_back(f.matrix().row(i));
  const Vec& fd = dst.invariant_factors();
  for (std::size_t j = 0; j < dst.rank(); ++j)
    if (fd[j] > 0) {
      Vec r(dst.rank(), Int(0));
      r[j] = fd[j];
      rows.push_back(r);
    }
  IntMatrix mat = IntMatrix::from_rows(rows, dst.rank());
  HnfResult h = hermite_normal_form(mat);
  IntMatrix inv_mat(dst.rank(), src.rank());
  for (std::size_t j = 0; j < dst.rank(); ++j) {
    Vec target(dst.rank(), Int(0));
    target[j] = 1;
    Vec residual = target;
    Vec y(h.rank, Int(0));
    for (std::size_t k = 0; k < h.rank; ++k) {
      std::size_t c = h.pivot_col[k];
      if (residual[c] % h.h.at(k, c) != 0) throw SqgError("hom_inverse: not surjective");
      Int q = residual[c] / h.h.at(k, c);
      y[k] = q;
      if (q != 0)
        for (std::size_t t = 0; t < dst.rank(); ++t) residual[t] -= q * h.h.at(k, t);
    }
    if (!is_zero_vec(residual)) throw SqgError("hom_inverse: not surjective");
    Vec x(mat.rows, Int(0));
    for (std::size_t k = 0; k < h.rank; ++k)
      if (y[k] != 0)
        for (std::size_t t = 0; t < mat.rows; ++t) x[t] += y[k] * h.u.at(k, t);
    Vec coords(src.rank());
    for (std::size_t t = 0; t < src.rank(); ++t) coords[t] = x[t];
    inv_mat.set_row(j, src.element(coords).coords);
  }
  FgabHom inv(dst, src, inv_mat);
  if (!f.then(inv).equals(FgabHom::identity(src)) ||
      !inv.then(f).equals(FgabHom::identity(dst)))
    throw SqgError("hom_inverse: not an isomorphism");
  return inv;
}

std::pair<FgAbelianGroup, FgabHom> quotient_by_elements(const FgAbelianGroup& g,
                                                        const std::vector<FgabElement>& elems) {
  std::vector<Vec> rows;
  const Vec& f = g.invariant_factors();
  for (std::size_t i = 0; i < g.rank(); ++i)
    if (f[i] > 0) {
      Vec r(g.rank(), Int(0));
      r[i] = f[i];
      rows.push_back(r);
    }
  for (const auto& e : elems) rows.push_back(e.coords);
  FgAbelianGroup q =
      FgAbelianGroup::from_presentation(g.rank(), IntMatrix::from_rows(rows, g.rank()));
  std::vector<FgabElement> proj_images;
  for (std::size_t i = 0; i < g.rank(); ++i) {
    Vec x(g.rank(), Int(0));
    x[i] = 1;
    proj_images.push_back(q.from_presentation_coords(x));
  }
  FgabHom proj = FgabHom::from_gen_images(g, q, proj_images);
  return {q, proj};
}

DirectSum direct_sum(const std::vector<FgAbelianGroup>& parts) {
  DirectSum out;
  Vec factors;
  std::vector<std::size_t> offset;
  for (const auto& p : parts) {
    offset.push_back(factors.size());
    for (const auto& f : p.invariant_factors()) factors.push_back(f);
  }
  // presentation directly in block coordinates; factors need not form a chain,
  // from_factors renormalizes via SNF but keeps presentation coords blockwise.
  out.sum = FgAbelianGroup::from_factors(factors);
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto& p = parts[k];
    std::vector<FgabElement> inj;
    for (std::size_t i = 0; i < p.rank(); ++i) {
      Vec x(factors.size(), Int(0));
      x[offset[k] + i] = 1;
      inj.push_back(out.sum.from_presentation_coords(x));
    }
    out.inject.push_back(FgabHom::from_gen_images(p, out.sum, inj));
    std::vector<FgabElement> prj;
    for (std::size_t i = 0; i < factors.size(); ++i) {
      std::size_t local = i - offset[k];
      if (i >= offset[k] && local < p.rank())
        prj.push_back(p.canonical_gen(local));
      else
        prj.push_back(p.zero());
    }
    out.project.push_back(FgabHom::from_pres_images(out.sum, p, prj));
  }
  return out;
}

FgabElement TensorAb::pair(const FgabElement& x, const FgabElement& y) const {
  Vec pres(left.rank() * right.rank(), Int(0));
  for (std::size_t i = 0; i < left.rank(); ++i) {
    if (x.coords[i] == 0) continue;
    for (std::size_t j = 0; j < right.rank(); ++j) pres[i * right.rank() + j] = x.coords[i] * y.coords[j];
  }
  return group.from_presentation_coords(pres);
}

FgabElement TensorAb::pres_pair(std::size_t i, std::size_t j) const {
  Vec pres(left.rank() * right.rank(), Int(0));
  pres[i * right.rank() + j] = 1;
  return group.from_presentation_coords(pres);
}

TensorAb fgab_tensor(const FgAbelianGroup& a, const FgAbelianGroup& b) {
  TensorAb t;
  t.left = a;
  t.right = b;
  std::size_t n = a.rank() * b.rank();
  std::vector<Vec> rows;
  const Vec& fa = a.invariant_factors();
  const Vec& fb = b.invariant_factors();
  for (std::size_t i = 0; i < a.rank(); ++i)
    for (std::size_t j = 0; j < b.rank(); ++j) {
      std::size_t idx = i * b.rank() + j;
      if (fa[i] != 0) {
        Vec r(n, Int(0));
        r[idx] = fa[i];
        rows.push_back(r);
      }
      if (fb[j] != 0) {
        Vec r(n, Int(0));
        r[idx] = fb[j];
        rows.push_back(r);
      }
    }
  t.group = FgAbelianGroup::from_presentation(n, IntMatrix::from_rows(rows, n));
  return t;
}

FgabHom tensor_hom(const TensorAb& src, const TensorAb& dst, const FgabHom& f, const FgabHom& g) {
  std::vector<FgabElement> images;
  for (std::size_t i = 0; i < src.left.rank(); ++i)
    for (std::size_t j = 0; j < src.right.rank(); ++j)
      images.push_back(dst.pair(f.apply(src.left.canonical_gen(i)), g.apply(src.right.canonical_gen(j))));
  return FgabHom::from_pres_images(src.group, dst.group, images);
}

FgAbelianGroup fgab_tor1(const FgAbelianGroup& a, const FgAbelianGroup& b) {
  // kernel of multiplication by the torsion factors of a on copies of b
  Vec tors;
  for (const auto& f : a.invariant_factors())
    if (f != 0) tors.push_back(f);
  if (tors.empty()) return FgAbelianGroup();
  std::vector<FgAbelianGroup> copies(tors.size(), b);
  DirectSum ds = direct_sum(copies);
  FgabHom mult = FgabHom::zero(ds.sum, ds.sum);
  for (std::size_t k = 0; k < tors.size(); ++k)
    mult = mult.plus(ds.project[k].scaled(tors[k]).then(ds.inject[k]));
  return mult.kernel().first;
}

ChainComplexZ::ChainComplexZ(std::vector<FgAbelianGroup> groups, std::vector<FgabHom> boundaries)
    : groups_(std::move(groups)), boundaries_(std::move(boundaries)) {
  if (groups_.empty()) throw SqgError("ChainComplexZ: empty");
  if (boundaries_.size() + 1 != groups_.size())
    throw SqgError("ChainComplexZ: need one boundary per adjacent pair");
  for (std::size_t i = 0; i + 1 < boundaries_.size(); ++i) {
    if (!boundaries_[i + 1].then(boundaries_[i]).is_zero())
      throw SqgError("ChainComplexZ: composite boundary not zero at degree " + std::to_string(i + 1));
  }
}

FgAbelianGroup ChainComplexZ::homology(std::size_t degree) const {
  if (degree >= groups_.size()) throw SqgError("homology: degree out of range");
  // kernel of outgoing boundary (degree -> degree-1)
  FgAbelianGroup K;
  FgabHom incl;
  if (degree == 0) {
    K = groups_[0];
    incl = FgabHom::identity(K);
  } else {
    auto kr = boundaries_[degree - 1].kernel();
    K = kr.first;
    incl = kr.second;
  }
  if (degree >= boundaries_.size()) return K;  // no incoming boundary
  const FgabHom& din = boundaries_[degree];
  std::vector<FgabElement> img_in_K;
  std::vector<FgabElement> kgens;
  for (std::size_t i = 0; i < K.rank(); ++i) kgens.push_back(incl.apply(K.canonical_gen(i)));
  for (std::size_t i = 0; i < din.src().rank(); ++i) {
    FgabElement img = din.apply(din.src().canonical_gen(i));
    auto sol = groups_[degree].solve(kgens, img);
    if (!sol) throw SqgError("homology: image not inside kernel");
    img_in_K.push_back(K.element(*sol));
  }
  return quotient_by_elements(K, img_in_K).first;
}

FgAbelianGroup chain_homology(const ChainComplexZ& c, std::size_t degree) {
  return c.homology(degree);
}

Sym2Group sym2(const FgAbelianGroup& a) {
  Sym2Group s;
  s.base = a;
  s.tensor_square = fgab_tensor(a, a);
  std::vector<FgabElement> kill;
  for (std::size_t i = 0; i < a.rank(); ++i)
    for (std::size_t j = i + 1; j < a.rank(); ++j) {
      FgabElement x = s.tensor_square.pres_pair(i, j) - s.tensor_square.pres_pair(j, i);
      kill.push_back(x);
    }
  auto q = quotient_by_elements(s.tensor_square.group, kill);
  s.group = q.first;
  s.proj = q.second;
  return s;
}

FgabElement Sym2Group::pair(const FgabElement& x, const FgabElement& y) const {
  return proj.apply(tensor_square.pair(x, y));
}

}  // namespace sqg
