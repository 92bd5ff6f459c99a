#pragma once

// Minkowski reduction on P_n, Grenier reduction on 𝔓_n, Siegel-set tests and
// reduction of P_{n,m} points under GL(n,Z)⋉Z^(m,n).
//
// Transforms follow the action convention: reduced = γ·Y·ᵗγ and
// V_reduced = (V + a)·ᵗγ.

#include "pnm/groups.hpp"
#include "pnm/matcore.hpp"

#include <string>
#include <vector>

namespace pnm {

inline constexpr int kDefaultReductionBound = 3;

struct ReductionResult {
    Matrix Y;  // reduced
    Matrix V;  // reduced translation part (m×n; empty on P_n)
    GlIntegralElement transform;
    bool certified = false;
    int certificate_bound = kDefaultReductionBound;
    // Some defining inequality holds with equality (within 1e-9 relative).
    bool boundary_contact = false;
    std::string note;
};

struct ReductionCheck {
    bool reduced = true;
    std::string condition;  // "M.1", "M.2", "F1", "F2", "F3" or empty
    int k = 0;              // 1-based index of the violated condition
    std::vector<long long> a;
    double value = 0.0;
    double threshold = 0.0;
    bool boundary_contact = false;
};

// (M.1) for each k = n..1 over primitive-tail vectors with ‖a‖∞ ≤ bound (one
// sign per ± pair, lexicographic), then (M.2). Returns the first violation.
ReductionCheck is_minkowski_reduced(const Matrix& Y, int bound = kDefaultReductionBound);
ReductionResult minkowski_reduce(const Matrix& Y, int bound = kDefaultReductionBound, int max_steps = 10000);

// (F1) over primitive (a, c) with c ≠ 0 and ‖(a,c)‖∞ ≤ bound, (F2) recursively,
// (F3) as 0 ≤ x₁ ≤ ½ and |x_j| ≤ ½ for j ≥ 2.
ReductionCheck is_in_grenier_domain(const Matrix& Y, int bound = kDefaultReductionBound);
ReductionResult grenier_reduce(const Matrix& Y, int bound = kDefaultReductionBound);

// y_i ≥ t^{-1/2} and |x_ij| ≤ ½ in full Iwasawa coordinates.
bool siegel_set_contains(const Matrix& Y, double t);
// Some diag(±1) image of Y lies in the Grenier domain.
bool in_grenier_sharp(const Matrix& Y, int bound = kDefaultReductionBound);

ReductionResult reduce_pnm(const Matrix& Y, const Matrix& V, int bound = kDefaultReductionBound);

// Unimodular r×r matrix whose first column is the primitive vector w.
IntMatrix unimodular_completion(const std::vector<long long>& w);

}  // namespace pnm
