#pragma once

// Charts, invariant metrics and volume densities, geodesics from the identity,
// and the Siegel volume of SL(n,Z)\𝔓_n.

#include "pnm/coords.hpp"
#include "pnm/groups.hpp"
#include "pnm/matcore.hpp"

#include <functional>
#include <span>
#include <vector>

namespace pnm {

struct MetricParams {
    double A = 1.0;
    double B = 1.0;
    double c = 1.0;
};

struct Tangent {
    Matrix dY;  // symmetric n×n
    Matrix dV;  // m×n (empty on P_n)
};

enum class MetricSpace { Cone, Pnm };

// c·Tr(Y⁻¹dY₁Y⁻¹dY₂) on P_n; A·Tr(Y⁻¹dY₁Y⁻¹dY₂) + B·Tr(Y⁻¹ᵗdV₁dV₂) on P_{n,m}.
double metric_eval(const SpdPoint& Y, const Tangent& t1, const Tangent& t2, const MetricParams& params,
                   MetricSpace space);
// Pushforward of a tangent at (Y, V) under (A, a): (A dY ᵗA, dV ᵗA).
Tangent push_tangent(const Matrix& A, const Tangent& t);

enum class DensitySpace { ConeDv, SlDmu, GoldfeldDstar, PnmDv };
DensitySpace parse_density_space(const std::string& name);

// Exponent convention for the Goldfeld density ∏ y_k^{e_k}:
//   Invariant: e_k = −k(n−k) − 1 (left-invariant under the action)
//   AsPrinted: e_k = −n(n−k) − 1
enum class GoldfeldExponent { Invariant, AsPrinted };

// Lebesgue coordinates per space:
//   ConeDv        y_ij (i <= j)                          on P_n
//   PnmDv         y_ij (i <= j) then v_ab                on P_{n,m}
//   SlDmu         recursive partial-Iwasawa chart        on 𝔓_n
//   GoldfeldDstar x_ij (i < j, row-major) then y_1..y_{n-1}
double volume_density(DensitySpace space, int n, int m, std::span<const double> coords,
                      GoldfeldExponent conv = GoldfeldExponent::Invariant);
int density_dim(DensitySpace space, int n, int m);

// The action of (A, a) written in the Lebesgue coordinates of the space.
// For SlDmu A must have det 1; GoldfeldDstar ignores a.
std::vector<double> act_in_density_coords(DensitySpace space, int n, int m, const Matrix& A, const Matrix& a,
                                          std::span<const double> coords);

// Central-difference Jacobian of a coordinate map.
Matrix numeric_jacobian(const std::function<std::vector<double>(std::span<const double>)>& f,
                        std::span<const double> point, double h = 1e-3);

double siegel_volume(int n);

SpdPoint geodesic_point(const SpdPoint& Y, double t);
double geodesic_distance(const SpdPoint& Y);
// ‖log(Y^{-1/2} Z Y^{-1/2})‖_F, from the generalized eigenvalues of (Z, Y).
double geodesic_distance(const SpdPoint& Y, const SpdPoint& Z);

struct PartialIwasawaCoords {
    double v = 1.0;
    Vector x;  // length n−1
    Matrix W;  // (n−1)×(n−1), unit determinant
};

PartialIwasawaCoords partial_iwasawa(const UnitDetSpdPoint& Y);
UnitDetSpdPoint partial_iwasawa_inverse(const PartialIwasawaCoords& c);

struct FullIwasawaCoords {
    Vector y;     // y_1..y_{n−1}
    Matrix X;     // upper unitriangular, entries x_ij above the diagonal
    double ydet;  // y₁^{2(n−1)}·…·y_{n−1}²
};

FullIwasawaCoords full_iwasawa(const UnitDetSpdPoint& Y);
// y^{-1/n}·diag(1, y₁², (y₁y₂)², …)[X], which has determinant 1.
UnitDetSpdPoint full_iwasawa_inverse(const FullIwasawaCoords& c);
// y^{-1}·diag(1, y₁², …)[X] with the scalar factor exactly as printed; its
// determinant is y^{1−n}.
SpdPoint full_iwasawa_inverse_as_printed(const FullIwasawaCoords& c);

struct GoldfeldPoint {
    Matrix x;  // upper unitriangular
    Vector y;  // y_1..y_{n−1} > 0

    int n() const { return static_cast<int>(x.rows()); }
    // diag(y₁⋯y_{n−1}, y₁⋯y_{n−2}, …, y₁, 1)
    Matrix y_matrix() const;
    Matrix z() const { return x * y_matrix(); }
    std::vector<double> coords() const;
    static GoldfeldPoint from_coords(int n, std::span<const double> c);
};

struct GoldfeldDecomposition {
    GoldfeldPoint z;
    Matrix k;  // orthogonal
    double r;  // g = z·k·(r I)
};

GoldfeldDecomposition goldfeld_decompose(const Matrix& g);
UnitDetSpdPoint goldfeld_to_spd(const GoldfeldPoint& z);
GoldfeldPoint goldfeld_from_spd(const SpdPoint& Y);
GoldfeldPoint goldfeld_act(const Matrix& g, const GoldfeldPoint& z);

// Random unit-determinant SPD matrix (random_spd renormalized).
UnitDetSpdPoint random_unit_spd(int n, Rng& rng, double spread = 1.0);

}  // namespace pnm
