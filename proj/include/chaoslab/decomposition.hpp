#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "chaoslab/grid.hpp"
#include "chaoslab/seed_covariance.hpp"

namespace chaoslab {

// Radial Fourier symbols of the star-scale kernels:
//   K-hat(xi)   = int_0^1 v^{d-1} k-hat(v xi) dv
//   u-hat_a(xi) = int_0^1 v^{d-1+a} k-hat(v xi) dv   (symbol of C_X - C_Y(a))
//   K-hat_a     = K-hat - u-hat_a                    (symbol of C_Y(a))
std::vector<double> symbol_K_hat(std::span<const double> xi, const SeedCovariance& seed);
std::vector<double> symbol_u_alpha(std::span<const double> xi, const SeedCovariance& seed, double alpha);
// int_0^inf e^{-(d+a)u} k-hat(e^{-u} xi) du by adaptive quadrature in u, with
// no tables shared with symbol_u_alpha.
double symbol_u_alpha_direct(double xi, const SeedCovariance& seed, double alpha);

struct SymbolTable {
  int dimension = 1;
  double alpha = 0.0;
  std::vector<double> xi;
  std::vector<double> k_hat;
  std::vector<double> k_alpha_hat;
  std::vector<double> u_alpha_hat;
};
SymbolTable symbol_table(std::span<const double> xi, const SeedCovariance& seed, double alpha);

// c_low <= values (1 + xi^2)^{exponent/2} <= c_high over the table.
struct Bracket {
  double c_low = 0.0;
  double c_high = 0.0;
};
Bracket fit_bracket(std::span<const double> xi, std::span<const double> values, double exponent);

// Smallest table xi beyond which `values` is nonincreasing.
double monotone_from(std::span<const double> xi, std::span<const double> values);

// C_X(r) in d = 1 by inverting K-hat: the pi (1 - e^{-xi}) / xi part is done
// in closed form, the remainder by quadrature.
double star_kernel_from_symbol(double r, const SeedCovariance& seed);

// Axis-aligned box [lo, hi]^d.
struct Box {
  double lo = 0.0;
  double hi = 0.0;
};

// a = u / v, b = (1 - u) / v with v = sqrt(u^2 + (1 - u)^2), u a product of
// polynomial smoothsteps that is 1 on V and 0 outside W.
struct PartitionPair {
  GridSpec grid;
  std::vector<double> u;
  std::vector<double> a;
  std::vector<double> b;
};
// Odd order 2N + 1 >= 1; order 7 is C^3.
double smoothstep(double t, int order);
PartitionPair partition_of_unity(const Box& v, const Box& w, const GridSpec& grid, int order = 7);

// Dense symmetric discretization h^d K(x_i, x_j) of an integral operator.
struct OperatorMatrix {
  std::string kernel_id;
  GridSpec grid;
  Eigen::MatrixXd matrix;
};

// Grid on [lo, hi]^d at cell midpoints, non-periodic.
GridSpec interval_grid(double lo, double hi, std::size_t points, int dimension = 1);

// C_X with the cell-averaged log singularity on the diagonal.
OperatorMatrix star_kernel_matrix(const GridSpec& grid, const SeedCovariance& seed);
// C_X - C_Y(alpha), kernel int_0^inf k(e^u r) e^{-alpha u} du.
OperatorMatrix u_alpha_matrix(const GridSpec& grid, const SeedCovariance& seed, double alpha);

// Toy remainders g-tilde = C_Gamma - C_X, in increasing difficulty.
enum class GTildeKind {
  None,             // R = 0: Gamma = X, no extension needed
  Zero,             // g-tilde = 0, R = (aa + bb - 1) C_X
  Bump,             // g-tilde = c phi(x) phi(y), c at -strength of the positivity limit
  CircleRemainder,  // C_Gamma the log kernel of a circle of length 2 (d = 1)
};
std::string to_string(GTildeKind kind);
GTildeKind gtilde_from_string(const std::string& s);

OperatorMatrix gtilde_matrix(GTildeKind kind, const GridSpec& grid, const SeedCovariance& seed, const Box& w,
                             const OperatorMatrix& cx, double bump_strength = 0.5);

// (a(x)a(y) + b(x)b(y) - 1) C_X + a(x)a(y) g-tilde, entrywise.
OperatorMatrix assemble_R(const PartitionPair& pair, const OperatorMatrix& cx, const OperatorMatrix& gtilde);

double min_eigenvalue(const OperatorMatrix& m);
// Smallest eigenvalue and n eps max|eig|.
std::pair<double, double> min_eigenvalue_with_resolution(const OperatorMatrix& m);

struct DecompositionScanOptions {
  // Past alpha ~ 5 the smallest eigenvalue of U_alpha drops below rounding.
  std::vector<double> alphas{0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 1.5, 2.0};
  Box v{-0.25, 0.25};
  Box w{-0.5, 0.5};
  Box domain{-1.0, 1.0};
  std::size_t points = 1024;
  int dimension = 1;
  GTildeKind gtilde = GTildeKind::Zero;
  double bump_strength = 0.5;
  int smoothstep_order = 7;
};

struct ScanEntry {
  double alpha = 0.0;
  double min_eig = 0.0;
  double resolution = 0.0;  // n eps |A|: eigenvalues below this are rounding noise
};

struct DecompositionScan {
  std::string kernel_id;
  std::size_t grid_points = 0;
  double base_min_eig = 0.0;  // smallest eigenvalue of C_X + R
  std::vector<ScanEntry> entries;
  // Largest alpha in the list whose smallest eigenvalue exceeds its
  // resolution; 0 if none.
  double alpha_star = 0.0;
  bool nonincreasing = true;
};

DecompositionScan min_eig_scan(const DecompositionScanOptions& options, const SeedCovariance& seed);

void write_json(std::ostream& out, const DecompositionScan& scan);
// xi, K-hat, K-alpha-hat, u-alpha-hat
void write_csv(std::ostream& out, const SymbolTable& table);

}  // namespace chaoslab
