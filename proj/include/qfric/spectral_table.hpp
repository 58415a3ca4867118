#pragma once

#include <functional>
#include <ostream>
#include <vector>

#include "qfric/dyad.hpp"

namespace qfric {

/// Dyad-valued samples on a strictly increasing frequency grid with
/// four-point Lagrange (cubic) interpolation.
class SpectralTable
{
  public:
    SpectralTable(std::vector<double> grid, std::vector<Dyad> values,
                  std::vector<double> errors = {});

    /// Uniform grid of n points on [lo, hi].
    static SpectralTable sample(std::function<Dyad(double)> const& f, double lo, double hi, int n);

    double lo() const { return grid_.front(); }
    double hi() const { return grid_.back(); }
    bool contains(double omega) const { return omega >= lo() && omega <= hi(); }
    std::size_t size() const { return grid_.size(); }
    std::vector<double> const& grid() const { return grid_; }
    std::vector<Dyad> const& values() const { return values_; }

    /// Throws DomainError outside [lo, hi].
    Dyad operator()(double omega) const;

    /// Every other node; the coarse partner of the Richardson check.
    SpectralTable half_resolution() const;

    /// Max Frobenius deviation of the half-resolution interpolant at the
    /// dropped nodes, divided by 16 (cubic convergence), relative to the
    /// largest sample. Estimates the interpolation error of this table.
    double refinement_error() const;

    /// Columns: omega, v, Re/Im of each entry (row major), err.
    void dump_csv(std::ostream& os, double v) const;

  private:
    std::vector<double> grid_;
    std::vector<Dyad> values_;
    std::vector<double> errors_;
    bool uniform_ = false;
};

}  // namespace qfric
