// Stencil generators for the two model problems: stabilized equal-order P1
// Stokes and lowest-order edge-element curl-curl, both on uniform triangular
// grids, plus the plain-text golden stencil format used for provenance data.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "trilfa/stencil.hpp"

namespace trilfa {

enum class ProblemKind { Stokes, CurlCurl };

struct ProblemSpec {
  ProblemKind kind = ProblemKind::Stokes;
  double h = 1.0;
  double beta = 1.0 / 12.0;  ///< pressure stabilization weight (Stokes)
  double kappa = 1.0;        ///< zeroth-order coefficient (curl-curl)
};

/// 3-variable nodal stencil (u, v, p) of the stabilized P1-P1 Stokes system in
/// the symmetric arrangement [A B; B^T -beta C]: vector-Laplacian diagonal
/// blocks, pressure-gradient couplings, and the -beta * h^2 pressure-Laplacian
/// stabilization block.  Throws std::invalid_argument for a non-Stokes spec.
MultiStencil stokes_stencils(const ProblemSpec& spec);

/// Curl-curl part N alone (the printed edge-element stencils), variables on
/// edge subgrids 1..3.  Entries scale like 1/h^2.
MultiStencil nedelec_rotrot_stencils(const ProblemSpec& spec);

/// Edge mass matrix M alone; h-independent with line-integral (Whitney)
/// degrees of freedom.
MultiStencil nedelec_mass_stencils(const ProblemSpec& spec);

/// Full curl-curl operator N + kappa * M.
MultiStencil nedelec_curlcurl_stencils(const ProblemSpec& spec);

/// Symbol of the discrete gradient (node potentials -> edge circulations):
/// component i is the phase factor of the oriented difference along subgrid-i
/// edges.  Satisfies N~(theta) * g~(theta) = 0 for all theta.
Eigen::Vector3cd discrete_gradient_symbol(Freq theta,
                                          PhaseConvention pc = PhaseConvention::Geometric);

// --- Golden stencil text format -------------------------------------------
//
// One entry per line: `i r kk ll coeff`, where coeff is an exact expression
// `[-]num/den[*sqrt3][*h^p]` (p may be negative).  Lines starting with `#`
// are comments.  The files record the oracle-verified stencil tables; the
// library itself uses the closed forms above and never reads them at runtime.

struct GoldenTerm {
  int i = 0, r = 0, kk = 0, ll = 0;
  long long num = 0, den = 1;  ///< rational factor num/den
  int sqrt3 = 0;               ///< power of sqrt(3), 0 or 1
  int hpow = 0;                ///< power of h
};

/// The exact entry tables behind the generators (Stokes at beta = 1/12).
std::vector<GoldenTerm> stokes_golden_terms();
std::vector<GoldenTerm> nedelec_rotrot_golden_terms();
std::vector<GoldenTerm> nedelec_mass_golden_terms();

double golden_value(const GoldenTerm& t, double h);

/// Render terms in the canonical golden text layout (with a leading comment).
std::string render_golden(const std::vector<GoldenTerm>& terms,
                          const std::string& header);

/// Parse golden text; throws std::runtime_error on malformed input.
std::vector<GoldenTerm> parse_golden(std::istream& in);

/// Evaluate parsed terms into a MultiStencil at mesh size h.
MultiStencil golden_to_stencil(const std::vector<GoldenTerm>& terms,
                               std::vector<int> subgrids, double h);

}  // namespace trilfa
