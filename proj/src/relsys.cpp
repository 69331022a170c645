#include "densplit/relsys.hpp"

#include <bit>
#include <map>
#include <sstream>

#include "densplit/errors.hpp"

namespace densplit {

namespace {

using Mask = std::uint64_t;

Mask all_of(std::size_t n) { return n == 64 ? ~Mask{0} : (Mask{1} << n) - 1; }

// col[y]: the x below y.
std::vector<Mask> columns(const FiniteRelSys& r) {
  std::vector<Mask> col(r.ys.size(), 0);
  for (std::size_t x = 0; x < r.xs.size(); ++x) {
    for (std::size_t y = 0; y < r.ys.size(); ++y) {
      if (r.rel[x][y]) col[y] |= Mask{1} << x;
    }
  }
  return col;
}

// Subsets of {0..n-1} of size s in lexicographic order until pred is true.
template <typename Pred>
bool any_subset(std::size_t n, std::size_t s, std::size_t from, Mask acc, Pred& pred) {
  if (s == 0) return pred(acc);
  for (std::size_t i = from; i + s <= n; ++i) {
    if (any_subset(n, s - 1, i + 1, acc | (Mask{1} << i), pred)) return true;
  }
  return false;
}

void cover(const std::vector<Mask>& col, const FiniteRelSys& r, Mask covered, Mask full, std::size_t used,
           std::size_t& best) {
  if (covered == full) {
    best = std::min(best, used);
    return;
  }
  if (used + 1 >= best) return;
  const std::size_t x = static_cast<std::size_t>(std::countr_zero(~covered & full));
  for (std::size_t y = 0; y < col.size(); ++y) {
    if (r.rel[x][y]) cover(col, r, covered | col[y], full, used + 1, best);
  }
}

std::string subset_label(Mask m, std::size_t n) {
  std::string s = "{";
  bool first = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (m >> i & 1) {
      s += (first ? "" : ",") + std::to_string(i);
      first = false;
    }
  }
  return s + "}";
}

std::vector<std::string> split_colon(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  for (std::string p; std::getline(in, p, ':');) parts.push_back(p);
  return parts;
}

std::size_t parse_count(const std::string& text) {
  try {
    std::size_t used = 0;
    unsigned long v = std::stoul(text, &used);
    if (used != text.size()) throw ParseError("bad number: " + text);
    return v;
  } catch (const std::logic_error&) {
    throw ParseError("bad number: " + text);
  }
}

}  // namespace

void validate(const FiniteRelSys& r) {
  if (r.xs.empty() || r.ys.empty()) throw PreconditionError("both sides must be non-empty");
  if (r.xs.size() > 64 || r.ys.size() > 64) throw PreconditionError("at most 64 points per side");
  if (r.rel.size() != r.xs.size()) throw PreconditionError("relation needs one row per x");
  for (std::size_t x = 0; x < r.xs.size(); ++x) {
    if (r.rel[x].size() != r.ys.size()) throw PreconditionError("relation row " + std::to_string(x) + " has wrong width");
    bool any = false;
    for (bool b : r.rel[x]) any = any || b;
    if (!any) throw PreconditionError("x = " + r.xs[x] + " is below no y");
  }
  const std::vector<Mask> col = columns(r);
  for (std::size_t y = 0; y < r.ys.size(); ++y) {
    if (col[y] == all_of(r.xs.size())) throw PreconditionError("y = " + r.ys[y] + " is above every x");
  }
}

std::size_t bounding_number(const FiniteRelSys& r) {
  validate(r);
  const std::vector<Mask> col = columns(r);
  auto unbounded = [&](Mask u) {
    for (Mask c : col) {
      if ((c & u) == u) return false;
    }
    return true;
  };
  for (std::size_t s = 1; s <= r.xs.size(); ++s) {
    if (any_subset(r.xs.size(), s, 0, 0, unbounded)) return s;
  }
  throw std::logic_error("X is bounded although validated");
}

std::size_t dominating_number(const FiniteRelSys& r) {
  validate(r);
  const std::vector<Mask> col = columns(r);
  const Mask full = all_of(r.xs.size());
  if (r.ys.size() <= 20) {
    auto covers = [&](Mask d) {
      Mask c = 0;
      for (std::size_t y = 0; y < col.size(); ++y) {
        if (d >> y & 1) c |= col[y];
      }
      return c == full;
    };
    for (std::size_t s = 1; s <= r.ys.size(); ++s) {
      if (any_subset(r.ys.size(), s, 0, 0, covers)) return s;
    }
    throw std::logic_error("Y does not cover X although validated");
  }
  std::size_t best = r.ys.size() + 1;
  cover(col, r, 0, full, 0, best);
  return best;
}

FiniteRelSys dual(const FiniteRelSys& r) {
  validate(r);
  FiniteRelSys d{r.ys, r.xs, std::vector<std::vector<bool>>(r.ys.size(), std::vector<bool>(r.xs.size()))};
  for (std::size_t x = 0; x < r.xs.size(); ++x) {
    for (std::size_t y = 0; y < r.ys.size(); ++y) d.rel[y][x] = !r.rel[x][y];
  }
  try {
    validate(d);
  } catch (const PreconditionError& e) {
    throw std::logic_error(std::string("dual of a valid system is invalid: ") + e.what());
  }
  return d;
}

TukeyVerdict check_tukey(const FiniteRelSys& r0, const FiniteRelSys& r1, const TukeyPair& pair) {
  if (pair.f.size() != r0.xs.size() || pair.g.size() != r1.ys.size()) {
    throw PreconditionError("connection maps must be total");
  }
  for (std::size_t v : pair.f) {
    if (v >= r1.xs.size()) throw PreconditionError("f leaves X1");
  }
  for (std::size_t v : pair.g) {
    if (v >= r0.ys.size()) throw PreconditionError("g leaves Y0");
  }
  for (std::size_t x0 = 0; x0 < r0.xs.size(); ++x0) {
    for (std::size_t y1 = 0; y1 < r1.ys.size(); ++y1) {
      if (r1.rel[pair.f[x0]][y1] && !r0.rel[x0][pair.g[y1]]) return {false, std::make_pair(x0, y1)};
    }
  }
  return {};
}

TukeyPair reversed(const TukeyPair& pair) { return {pair.g, pair.f}; }

TukeyPair compose(const TukeyPair& first, const TukeyPair& second) {
  TukeyPair c;
  c.f.reserve(first.f.size());
  for (std::size_t v : first.f) {
    if (v >= second.f.size()) throw PreconditionError("connections do not meet");
    c.f.push_back(second.f[v]);
  }
  c.g.reserve(second.g.size());
  for (std::size_t v : second.g) {
    if (v >= first.g.size()) throw PreconditionError("connections do not meet");
    c.g.push_back(first.g[v]);
  }
  return c;
}

TukeyPair identity_pair(const FiniteRelSys& r) {
  TukeyPair p{std::vector<std::size_t>(r.xs.size()), std::vector<std::size_t>(r.ys.size())};
  for (std::size_t i = 0; i < p.f.size(); ++i) p.f[i] = i;
  for (std::size_t i = 0; i < p.g.size(); ++i) p.g[i] = i;
  return p;
}

SparseRangeResult sparse_range_check(const OmegaSet& r, const std::function<BigNat(std::size_t)>& x, std::size_t threshold,
                          std::size_t n_max, const Rational& tolerance) {
  if (n_max > 20) throw PreconditionError("n_max above 20 is not supported");
  SparseRangeResult res{threshold, std::max<std::size_t>(threshold, 1), {}, true, false};
  std::vector<BigNat> xs;
  auto x_at = [&](std::size_t i) -> const BigNat& {
    while (xs.size() <= i) {
      BigNat v = x(xs.size());
      if (!xs.empty() && v <= xs.back()) {
        throw PreconditionError("x is not strictly increasing at n = " + std::to_string(xs.size()));
      }
      xs.push_back(std::move(v));
    }
    return xs[i];
  };
  std::size_t next_x = 0;   // first x(i) not yet compared
  std::size_t hits = 0;     // x(i) in R among those compared
  for (std::size_t n = 0; n <= n_max; ++n) {
    const std::size_t first = std::size_t{1} << n;
    SparseRangeRow row{n, kth_element(r, big(first)), kth_element(r, big(2 * first)), Rational(0), BigNat(0),
                  Rational(res.effective_threshold + n, first), true};
    row.bound.canonicalize();
    if (n >= threshold && x_at(n) < row.lo) {
      throw PreconditionError("hypothesis fails at n = " + std::to_string(n) + ": x(n) = " + x_at(n).get_str() +
                              " < " + row.lo.get_str());
    }
    BigNat rj = row.lo;
    for (std::size_t j = first; j < 2 * first; ++j) {
      if (j > first) rj = kth_element(r, big(j));
      for (; x_at(next_x) <= rj; ++next_x) {
        if (r.contains(x_at(next_x))) ++hits;
      }
      Rational q(static_cast<unsigned long>(hits), static_cast<unsigned long>(j + 1));
      q.canonicalize();
      if (j == first || q > row.max_ratio) {
        row.max_ratio = q;
        row.at = rj + 1;
      }
    }
    row.ok = row.max_ratio <= row.bound;
    res.holds = res.holds && row.ok;
    res.rows.push_back(std::move(row));
  }
  res.zero_splits = res.rows.back().max_ratio <= tolerance;
  return res;
}

GalleryEntry gallery(const std::string& name) {
  const std::vector<std::string> parts = split_colon(name);
  if (parts.empty()) throw ParseError("empty gallery name");
  GalleryEntry e;
  e.name = name;
  FiniteRelSys& s = e.system;
  if (parts[0] == "dom" && parts.size() == 3) {
    const std::size_t len = parse_count(parts[1]);
    const std::size_t vals = parse_count(parts[2]);
    std::size_t total = 1;
    for (std::size_t i = 0; i < len; ++i) {
      total *= vals;
      if (total > 64) throw PreconditionError("dom truncation exceeds 64 points");
    }
    if (len == 0 || vals < 2) throw PreconditionError("dom truncation needs length >= 1 and at least 2 values");
    std::vector<std::vector<std::size_t>> fns(total, std::vector<std::size_t>(len));
    for (std::size_t f = 0; f < total; ++f) {
      std::size_t c = f;
      for (std::size_t i = 0; i < len; ++i, c /= vals) fns[f][len - 1 - i] = c % vals;
      std::string label;
      for (std::size_t v : fns[f]) label += std::to_string(v);
      s.xs.push_back(label);
    }
    // Functions at the top value on every compared position dominate everything; they are left out of Y.
    std::vector<std::size_t> kept;
    for (std::size_t f = 0; f < total; ++f) {
      bool top = true;
      for (std::size_t i = len / 2; i < len; ++i) top = top && fns[f][i] + 1 == vals;
      if (!top) {
        kept.push_back(f);
        s.ys.push_back(s.xs[f]);
      }
    }
    s.rel.assign(total, std::vector<bool>(kept.size()));
    for (std::size_t a = 0; a < total; ++a) {
      for (std::size_t j = 0; j < kept.size(); ++j) {
        bool below = true;
        for (std::size_t i = len / 2; i < len; ++i) below = below && fns[a][i] <= fns[kept[j]][i];
        s.rel[a][j] = below;
      }
    }
    e.note = "functions of length " + parts[1] + " below " + parts[2] + ", compared on the upper half of the domain";
  } else if ((parts[0] == "reap" && parts.size() == 2) || (parts[0] == "reap-rho" && parts.size() == 4)) {
    const std::size_t n = parse_count(parts[1]);
    if (n < 3 || n > 6) throw PreconditionError("reap truncations need 3 <= n <= 6");
    std::vector<Mask> sets;
    for (Mask m = 0; m < (Mask{1} << n); ++m) {
      if (std::popcount(m) >= 2) sets.push_back(m);
    }
    for (Mask m : sets) s.xs.push_back(subset_label(m, n));
    s.ys = s.xs;
    s.rel.assign(sets.size(), std::vector<bool>(sets.size()));
    if (parts[0] == "reap") {
      for (std::size_t a = 0; a < sets.size(); ++a) {
        for (std::size_t b = 0; b < sets.size(); ++b) s.rel[a][b] = (sets[a] & sets[b]) && (sets[a] & ~sets[b]);
      }
      e.note = "subsets of {0.." + std::to_string(n - 1) + "} with two or more points; x below y iff y splits x";
    } else {
      const Rational rho = parse_rational(parts[2]);
      const Rational band = parse_rational(parts[3]);
      for (std::size_t a = 0; a < sets.size(); ++a) {
        for (std::size_t b = 0; b < sets.size(); ++b) {
          Rational q(std::popcount(sets[a] & sets[b]), std::popcount(sets[a]));
          q.canonicalize();
          s.rel[a][b] = abs(q - rho) <= band;
        }
      }
      e.note = "x below y iff |x ∩ y|/|x| lies within " + to_string(band) + " of " + to_string(rho) +
               " (band membership at the truncation, not a limit)";
    }
  } else {
    throw ParseError("unknown gallery entry: " + name);
  }
  return e;
}

std::vector<std::string> gallery_names() { return {"dom:L:v", "reap:n", "reap-rho:n:p/q:band"}; }

}  // namespace densplit
