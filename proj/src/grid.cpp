#include "pmlab/grid.hpp"

#include <cmath>
#include <sstream>

#include "pmlab/errors.hpp"

namespace pmlab {

Grid1D Grid1D::make(double a, double b, int n_cells, bool radial) {
  if (!(std::isfinite(a) && std::isfinite(b) && a < b)) throw ConfigError("grid", "need a < b");
  if (n_cells < 8) throw ConfigError("grid.n_cells", "need at least 8 cells");
  if (radial && !(a > 0.0)) throw DomainError("radial grid needs r1 > 0");
  return Grid1D{a, b, n_cells};
}

Grid1D Grid1D::midpoint_grid() const {
  const double h = spacing();
  return Grid1D{a + 0.5 * h, b - 0.5 * h, n_cells - 1};
}

void Field1D::validate() const {
  if (values.size() != static_cast<std::size_t>(grid.node_count())) {
    std::ostringstream msg;
    msg << "field has " << values.size() << " values, grid has " << grid.node_count() << " nodes";
    throw NumericError(msg.str());
  }
  for (double v : values)
    if (!std::isfinite(v)) throw NumericError("non-finite field value");
}

std::vector<double> midpoint_gradients(const Field1D& field) {
  const double h = field.grid.spacing();
  std::vector<double> p(field.values.size() - 1);
  for (std::size_t i = 0; i + 1 < field.values.size(); ++i) p[i] = (field.values[i + 1] - field.values[i]) / h;
  return p;
}

}  // namespace pmlab
