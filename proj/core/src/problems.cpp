#include "trilfa/problems.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace trilfa {

namespace {
const double kSqrt3 = std::sqrt(3.0);

struct Entry {
  int kk, ll;
  double c;
};

// P1 Laplacian on the unit-side triangular grid (h-independent).
const Entry kLap[] = {{0, 0, 2.0 * kSqrt3}, {1, 0, -1.0 / kSqrt3},
                      {-1, 0, -1.0 / kSqrt3}, {0, 1, -1.0 / kSqrt3},
                      {0, -1, -1.0 / kSqrt3}, {1, 1, -1.0 / kSqrt3},
                      {-1, -1, -1.0 / kSqrt3}};

// Pressure-gradient couplings at h = 1 (scale linearly with h).
const Entry kGx[] = {{1, 0, kSqrt3 / 6.0},  {-1, 0, -kSqrt3 / 6.0},
                     {1, 1, kSqrt3 / 12.0}, {-1, -1, -kSqrt3 / 12.0},
                     {0, 1, -kSqrt3 / 12.0}, {0, -1, kSqrt3 / 12.0}};
const Entry kGy[] = {{1, 1, 0.25}, {0, 1, 0.25}, {-1, -1, -0.25}, {0, -1, -0.25}};
}  // namespace

MultiStencil stokes_stencils(const ProblemSpec& spec) {
  if (spec.kind != ProblemKind::Stokes) {
    throw std::invalid_argument("stokes_stencils: spec.kind must be Stokes");
  }
  if (!(spec.beta > 0.0)) {
    throw std::invalid_argument("stokes_stencils: beta must be positive");
  }
  const double h = spec.h;
  MultiStencil st(3, {0, 0, 0}, h);
  for (const auto& e : kLap) {
    st.add(0, 0, {e.kk, e.ll}, e.c);
    st.add(1, 1, {e.kk, e.ll}, e.c);
    st.add(2, 2, {e.kk, e.ll}, -spec.beta * h * h * e.c);
  }
  for (const auto& e : kGx) {
    st.add(0, 2, {e.kk, e.ll}, h * e.c);
    st.add(2, 0, {-e.kk, -e.ll}, h * e.c);
  }
  for (const auto& e : kGy) {
    st.add(1, 2, {e.kk, e.ll}, h * e.c);
    st.add(2, 1, {-e.kk, -e.ll}, h * e.c);
  }
  return st;
}

namespace {
// Off-diagonal coupling offsets of the edge-element operator; the rot-rot
// part carries sgn * 4/(sqrt(3) h^2) and the mass part -sgn * sqrt(3)/36 at
// the same two offsets per block.
struct EdgeCoupling {
  int i, r;
  int kk, ll;
  int sgn;
};
const EdgeCoupling kEdgeOff[] = {
    {0, 1, 1, 0, +1},  {0, 1, 0, -1, +1},   // (1,2)
    {0, 2, 0, 0, -1},  {0, 2, 0, -1, -1},   // (1,3)
    {1, 0, -1, 0, +1}, {1, 0, 0, 1, +1},    // (2,1)
    {1, 2, -1, 0, -1}, {1, 2, 0, 0, -1},    // (2,3)
    {2, 0, 0, 0, -1},  {2, 0, 0, 1, -1},    // (3,1)
    {2, 1, 0, 0, -1},  {2, 1, 1, 0, -1},    // (3,2)
};
}  // namespace

MultiStencil nedelec_rotrot_stencils(const ProblemSpec& spec) {
  if (spec.kind != ProblemKind::CurlCurl) {
    throw std::invalid_argument("nedelec_rotrot_stencils: spec.kind must be CurlCurl");
  }
  const double s = 4.0 / (kSqrt3 * spec.h * spec.h);
  MultiStencil st(3, {1, 2, 3}, spec.h);
  for (int i = 0; i < 3; ++i) st.add(i, i, {0, 0}, 2.0 * s);
  for (const auto& e : kEdgeOff) st.add(e.i, e.r, {e.kk, e.ll}, e.sgn * s);
  return st;
}

MultiStencil nedelec_mass_stencils(const ProblemSpec& spec) {
  if (spec.kind != ProblemKind::CurlCurl) {
    throw std::invalid_argument("nedelec_mass_stencils: spec.kind must be CurlCurl");
  }
  const double d = 5.0 * kSqrt3 / 18.0;
  const double o = kSqrt3 / 36.0;
  MultiStencil st(3, {1, 2, 3}, spec.h);
  for (int i = 0; i < 3; ++i) st.add(i, i, {0, 0}, d);
  for (const auto& e : kEdgeOff) st.add(e.i, e.r, {e.kk, e.ll}, -e.sgn * o);
  return st;
}

MultiStencil nedelec_curlcurl_stencils(const ProblemSpec& spec) {
  if (!(spec.kappa >= 0.0)) {
    throw std::invalid_argument("nedelec_curlcurl_stencils: kappa must be >= 0");
  }
  MultiStencil st = nedelec_rotrot_stencils(spec);
  const MultiStencil mass = nedelec_mass_stencils(spec);
  for (int i = 0; i < 3; ++i) {
    for (int r = 0; r < 3; ++r) {
      for (const auto& e : mass.entries(i, r)) {
        st.add(i, r, e.off, spec.kappa * e.c);
      }
    }
  }
  return st;
}

Eigen::Vector3cd discrete_gradient_symbol(Freq theta, PhaseConvention pc) {
  const cdouble g1 = std::polar(1.0, theta.t1) - 1.0;
  const cdouble g2 = std::polar(1.0, theta.t2) - 1.0;
  const cdouble g3 = std::polar(1.0, theta.t1 + theta.t2) - 1.0;
  Eigen::Vector3cd g(g1, g2, g3);
  if (pc == PhaseConvention::Geometric) {
    // Referred to each edge's own midpoint: multiply by exp(-i theta . delta_i).
    for (int i = 0; i < 3; ++i) {
      const FracOffset d = subgrid_offset(i + 1);
      g(i) *= std::polar(1.0, -(theta.t1 * d.d1 + theta.t2 * d.d2));
    }
  }
  return g;
}

// --- Golden tables ---------------------------------------------------------

std::vector<GoldenTerm> stokes_golden_terms() {
  std::vector<GoldenTerm> t;
  auto lap = [&](int i, int r, long long num, long long den, int hpow) {
    // num/den scales the unit Laplacian pattern: center 2*sqrt3, ring -1/3*sqrt3.
    t.push_back({i, r, 0, 0, 2 * num, den, 1, hpow});
    const int ring[6][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, -1}};
    for (auto& o : ring) t.push_back({i, r, o[0], o[1], -num, 3 * den, 1, hpow});
  };
  lap(0, 0, 1, 1, 0);
  lap(1, 1, 1, 1, 0);
  lap(2, 2, -1, 12, 2);  // -beta h^2 Laplacian at beta = 1/12
  const GoldenTerm gx[] = {{0, 2, 1, 0, 1, 6, 1, 1},   {0, 2, -1, 0, -1, 6, 1, 1},
                           {0, 2, 1, 1, 1, 12, 1, 1},  {0, 2, -1, -1, -1, 12, 1, 1},
                           {0, 2, 0, 1, -1, 12, 1, 1}, {0, 2, 0, -1, 1, 12, 1, 1}};
  const GoldenTerm gy[] = {{1, 2, 1, 1, 1, 4, 0, 1},
                           {1, 2, 0, 1, 1, 4, 0, 1},
                           {1, 2, -1, -1, -1, 4, 0, 1},
                           {1, 2, 0, -1, -1, 4, 0, 1}};
  for (const auto& g : gx) {
    t.push_back(g);
    t.push_back({2, 0, -g.kk, -g.ll, g.num, g.den, g.sqrt3, g.hpow});
  }
  for (const auto& g : gy) {
    t.push_back(g);
    t.push_back({2, 1, -g.kk, -g.ll, g.num, g.den, g.sqrt3, g.hpow});
  }
  return t;
}

std::vector<GoldenTerm> nedelec_rotrot_golden_terms() {
  std::vector<GoldenTerm> t;
  for (int i = 0; i < 3; ++i) t.push_back({i, i, 0, 0, 8, 3, 1, -2});
  for (const auto& e : kEdgeOff) {
    t.push_back({e.i, e.r, e.kk, e.ll, 4LL * e.sgn, 3, 1, -2});
  }
  return t;
}

std::vector<GoldenTerm> nedelec_mass_golden_terms() {
  std::vector<GoldenTerm> t;
  for (int i = 0; i < 3; ++i) t.push_back({i, i, 0, 0, 5, 18, 1, 0});
  for (const auto& e : kEdgeOff) {
    t.push_back({e.i, e.r, e.kk, e.ll, -1LL * e.sgn, 36, 1, 0});
  }
  return t;
}

double golden_value(const GoldenTerm& t, double h) {
  double v = static_cast<double>(t.num) / static_cast<double>(t.den);
  if (t.sqrt3) v *= kSqrt3;
  return v * std::pow(h, t.hpow);
}

std::string render_golden(const std::vector<GoldenTerm>& terms,
                          const std::string& header) {
  std::ostringstream os;
  os << "# " << header << "\n";
  os << "# format: i r kk ll coeff, coeff = num/den[*sqrt3][*h^p]\n";
  for (const auto& t : terms) {
    os << t.i << ' ' << t.r << ' ' << t.kk << ' ' << t.ll << ' ' << t.num << '/'
       << t.den;
    if (t.sqrt3) os << "*sqrt3";
    if (t.hpow != 0) os << "*h^" << t.hpow;
    os << '\n';
  }
  return os.str();
}

std::vector<GoldenTerm> parse_golden(std::istream& in) {
  std::vector<GoldenTerm> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    GoldenTerm t;
    std::string coeff;
    if (!(ls >> t.i >> t.r >> t.kk >> t.ll >> coeff)) {
      throw std::runtime_error("parse_golden: malformed line " + std::to_string(lineno));
    }
    std::size_t pos = 0;
    auto fail = [&]() {
      throw std::runtime_error("parse_golden: bad coefficient on line " +
                               std::to_string(lineno) + ": " + coeff);
    };
    try {
      std::size_t used = 0;
      t.num = std::stoll(coeff, &used);
      pos = used;
      if (pos >= coeff.size() || coeff[pos] != '/') fail();
      ++pos;
      t.den = std::stoll(coeff.substr(pos), &used);
      pos += used;
      while (pos < coeff.size()) {
        if (coeff.compare(pos, 6, "*sqrt3") == 0) {
          t.sqrt3 = 1;
          pos += 6;
        } else if (coeff.compare(pos, 3, "*h^") == 0) {
          pos += 3;
          t.hpow = static_cast<int>(std::stoll(coeff.substr(pos), &used));
          pos += used;
        } else {
          fail();
        }
      }
    } catch (const std::invalid_argument&) {
      fail();
    }
    if (t.den == 0) fail();
    out.push_back(t);
  }
  return out;
}

MultiStencil golden_to_stencil(const std::vector<GoldenTerm>& terms,
                               std::vector<int> subgrids, double h) {
  int m = 0;
  for (const auto& t : terms) m = std::max({m, t.i + 1, t.r + 1});
  MultiStencil st(m, std::move(subgrids), h);
  for (const auto& t : terms) st.add(t.i, t.r, {t.kk, t.ll}, golden_value(t, h));
  return st;
}

}  // namespace trilfa
