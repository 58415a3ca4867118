#include "qfric/spectral_table.hpp"

#include <algorithm>
#include <cmath>

#include "qfric/errors.hpp"

namespace qfric {

SpectralTable::SpectralTable(std::vector<double> grid, std::vector<Dyad> values,
                             std::vector<double> errors)
    : grid_(std::move(grid)), values_(std::move(values)), errors_(std::move(errors))
{
    if (grid_.size() < 4 || grid_.size() != values_.size()) {
        throw ValidationError("SpectralTable: need at least 4 samples, one per grid point");
    }
    for (std::size_t i = 1; i < grid_.size(); ++i) {
        if (!(grid_[i] > grid_[i - 1])) {
            throw ValidationError("SpectralTable: grid must be strictly increasing");
        }
    }
    if (errors_.empty()) {
        errors_.assign(grid_.size(), 0.0);
    }
    double const h = (grid_.back() - grid_.front()) / static_cast<double>(grid_.size() - 1);
    uniform_ = true;
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        if (std::abs(grid_[i] - (grid_.front() + static_cast<double>(i) * h)) > 1e-12 * h) {
            uniform_ = false;
            break;
        }
    }
}

SpectralTable SpectralTable::sample(std::function<Dyad(double)> const& f, double lo, double hi,
                                    int n)
{
    if (n < 4 || !(hi > lo)) {
        throw ValidationError("SpectralTable::sample: need n >= 4 and hi > lo");
    }
    std::vector<double> grid(n);
    std::vector<Dyad> values(n);
    for (int i = 0; i < n; ++i) {
        grid[i] = i == n - 1 ? hi : lo + (hi - lo) * i / (n - 1);
        values[i] = f(grid[i]);
    }
    return SpectralTable(std::move(grid), std::move(values));
}

Dyad SpectralTable::operator()(double omega) const
{
    if (!contains(omega)) {
        throw DomainError("SpectralTable: frequency outside the tabulated range");
    }
    std::size_t const n = grid_.size();
    std::size_t i;
    if (uniform_) {
        double const h = (grid_.back() - grid_.front()) / static_cast<double>(n - 1);
        i = static_cast<std::size_t>((omega - grid_.front()) / h);
        i = std::min(i, n - 2);
    } else {
        i = static_cast<std::size_t>(std::upper_bound(grid_.begin(), grid_.end(), omega)
                                     - grid_.begin());
        i = std::min(std::max<std::size_t>(i, 1), n - 1) - 1;
    }
    // Stencil i-1 .. i+2, shifted inward at the ends.
    std::size_t const s = std::min(std::max<std::size_t>(i, 1), n - 3) - 1;
    Dyad out = Dyad::Zero();
    for (std::size_t j = s; j < s + 4; ++j) {
        double w = 1.0;
        for (std::size_t k = s; k < s + 4; ++k) {
            if (k != j) {
                w *= (omega - grid_[k]) / (grid_[j] - grid_[k]);
            }
        }
        out += w * values_[j];
    }
    return out;
}

SpectralTable SpectralTable::half_resolution() const
{
    std::vector<double> g;
    std::vector<Dyad> v;
    std::vector<double> e;
    for (std::size_t i = 0; i < grid_.size(); i += 2) {
        g.push_back(grid_[i]);
        v.push_back(values_[i]);
        e.push_back(errors_[i]);
    }
    if (grid_.size() % 2 == 0) {
        g.push_back(grid_.back());
        v.push_back(values_.back());
        e.push_back(errors_.back());
    }
    return SpectralTable(std::move(g), std::move(v), std::move(e));
}

double SpectralTable::refinement_error() const
{
    SpectralTable const coarse = half_resolution();
    double worst = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        scale = std::max(scale, frobenius(values_[i]));
        if (i % 2 == 1) {
            worst = std::max(worst, frobenius(coarse(grid_[i]) - values_[i]));
        }
    }
    return scale > 0.0 ? worst / (16.0 * scale) : 0.0;
}

void SpectralTable::dump_csv(std::ostream& os, double v) const
{
    os << "omega,v";
    char const axes[] = {'x', 'y', 'z'};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            os << ",re_" << axes[i] << axes[j] << ",im_" << axes[i] << axes[j];
        }
    }
    os << ",err\n";
    auto const prec = os.precision(17);
    for (std::size_t k = 0; k < grid_.size(); ++k) {
        os << grid_[k] << ',' << v;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                os << ',' << values_[k](i, j).real() << ',' << values_[k](i, j).imag();
            }
        }
        os << ',' << errors_[k] << '\n';
    }
    os.precision(prec);
}

}  // namespace qfric
