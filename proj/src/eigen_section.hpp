#pragma once

#include <string>
#include <vector>

namespace conewalk {

/// Tabulated ground-state eigenfunction of the spherical-section Dirichlet
/// problem for an axisymmetric cone in R^3:
///
///   (sin t * m')' = -lambda * sin t * m   on (0, theta0),
///   m'(0) = 0,  m(theta0) = 0.
///
/// m1 is positive on the open interval and normalized to max = 1.
struct EigenTable {
    std::vector<double> theta_grid;  // increasing, theta_grid.front()=0, back()=theta0
    std::vector<double> m1_values;   // same length; m1_values.back() == 0
    double lambda1 = 0.0;
    double theta0 = 0.0;
    int mesh_size = 0;
    double est_error = 0.0;  // Richardson estimate from mesh vs mesh/2

    /// Linear interpolation of m1 at angle t; 0 outside [0, theta0].
    double interpolate(double t) const;
    /// Slope of the linear interpolant within the cell containing t.
    double cell_slope(double t) const;
    /// Symmetric-difference slope over one grid step (smoother than the cell
    /// slope; used for the tabulated gradient branch).
    double fd_slope(double t) const;
};

/// Smallest Dirichlet eigenvalue of -m'' on (0, alpha): returns (pi/alpha)^2.
/// The eigenfunction is sin(pi*t/alpha).
double wedge_lambda1(double alpha);

/// Exponent p from the section eigenvalue: sqrt(lambda1 + (d/2-1)^2) - (d/2-1).
double p_exponent(double lambda1, int d);

/// Solves the circular-cone section problem by second-order finite
/// differences on a uniform grid with a half-cell offset at t=0 (the sin t
/// weight then vanishes at the pole face and no special casing is needed).
/// The smallest eigenvalue comes from Sturm bisection on the tridiagonal
/// pencil, the eigenvector from one inverse-iteration sweep.
EigenTable circular_cone_lambda1(double theta0, int mesh);

/// Serialization used by the `eigen` CLI stage: CSV of (theta, m1) rows.
std::string eigen_table_csv(const EigenTable& table);

/// Rebuilds a table from the CSV body plus the JSON-header scalars. The
/// grid must be the solver layout (pole node, mesh cell centers, theta0).
EigenTable eigen_table_from_csv(const std::string& csv, double lambda1, double theta0, int mesh,
                                double est_error);

}  // namespace conewalk
