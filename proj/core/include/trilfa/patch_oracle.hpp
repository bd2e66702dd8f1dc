// Brute-force verification oracle: assemble the chosen finite-element problem
// on a doubly periodic patch of equilateral triangles with exact quadrature
// and read interior matrix rows back as a MultiStencil.  Independent code path
// from the closed-form stencil generators.
#pragma once

#include "trilfa/problems.hpp"

namespace trilfa {

/// Assemble on a patch_n x patch_n periodic lattice (patch_n >= 4, throws
/// std::invalid_argument otherwise) and extract one interior representative
/// row per variable.  Deterministic.  The Stokes result uses spec.beta; the
/// curl-curl result is the full operator N + spec.kappa * M.
MultiStencil assemble_patch_oracle(const ProblemSpec& spec, int patch_n);

}  // namespace trilfa
