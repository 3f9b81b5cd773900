#pragma once

#include <vector>

namespace pmlab {

/// Uniform grid on [a, b] with n_cells + 1 nodes.
struct Grid1D {
  double a = 0.0;
  double b = 1.0;
  int n_cells = 8;

  /// Validates a < b, n_cells >= 8 and, for radial grids, a > 0.
  static Grid1D make(double a, double b, int n_cells, bool radial = false);

  double spacing() const { return (b - a) / n_cells; }
  double node(int i) const { return a + spacing() * i; }
  double midpoint(int i) const { return a + spacing() * (i + 0.5); }
  int node_count() const { return n_cells + 1; }
  /// Grid whose nodes are the cell midpoints of this one.
  Grid1D midpoint_grid() const;
};

struct Field1D {
  Grid1D grid;
  std::vector<double> values;
  double time = 0.0;

  /// Throws NumericError on wrong length or non-finite values.
  void validate() const;
};

/// (u_{i+1} - u_i) / h for i = 0..N-1.
std::vector<double> midpoint_gradients(const Field1D& field);

}  // namespace pmlab
