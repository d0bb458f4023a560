#include "hyplab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace hyplab {

GridFunction::GridFunction(int n_comp, StripGrid grid)
    : n_(n_comp), grid_(grid),
      v_(static_cast<std::size_t>(n_comp) * (grid.N + 1) * (grid.M + 1), 0.0) {
    if (n_comp < 1 || grid.N < 1 || grid.M < 1 || !(grid.T > 0.0))
        throw StructuralError("grid", "need n >= 1, N, M >= 1, T > 0");
}

double GridFunction::eval(int comp, double x, double t) const {
    const double fx = std::clamp(x, 0.0, 1.0) * grid_.N;
    const double ft = (std::clamp(t, grid_.s, grid_.s + grid_.T) - grid_.s) / grid_.dt();
    int ix = std::min(static_cast<int>(fx), grid_.N - 1);
    int il = std::min(static_cast<int>(ft), grid_.M - 1);
    const double wx = fx - ix;
    const double wt = ft - il;
    return (1 - wx) * (1 - wt) * at(comp, ix, il) + wx * (1 - wt) * at(comp, ix + 1, il) +
           (1 - wx) * wt * at(comp, ix, il + 1) + wx * wt * at(comp, ix + 1, il + 1);
}

double GridFunction::sup_norm() const {
    double r = 0.0;
    for (double x : v_) r = std::max(r, std::abs(x));
    return r;
}

bool GridFunction::all_finite() const {
    return std::all_of(v_.begin(), v_.end(), [](double x) { return std::isfinite(x); });
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
    if (other.v_.size() != v_.size()) throw StructuralError("grid", "shape mismatch in +=");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += other.v_[i];
    return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
    if (other.v_.size() != v_.size()) throw StructuralError("grid", "shape mismatch in -=");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= other.v_[i];
    return *this;
}

GridFunction& GridFunction::operator*=(double factor) {
    for (double& x : v_) x *= factor;
    return *this;
}

std::string GridFunction::to_csv() const {
    std::ostringstream os;
    os << "component,xIndex,tIndex,value\n";
    char buf[64];
    for (int c = 0; c < n_; ++c)
        for (int i = 0; i <= grid_.N; ++i)
            for (int l = 0; l <= grid_.M; ++l) {
                std::snprintf(buf, sizeof buf, "%.17g", at(c, i, l));
                os << c << ',' << i << ',' << l << ',' << buf << '\n';
            }
    return os.str();
}

GridFunction GridFunction::from_csv(const std::string& text, StripGrid grid, int n_comp) {
    GridFunction out(n_comp, grid);
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line.rfind("component,xIndex,tIndex,value", 0) != 0)
        throw ParseError("grid CSV must start with header component,xIndex,tIndex,value");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        int c, i, l;
        double v;
        if (std::sscanf(line.c_str(), "%d,%d,%d,%lf", &c, &i, &l, &v) != 4)
            throw ParseError("bad grid CSV row: " + line);
        if (c < 0 || c >= n_comp || i < 0 || i > grid.N || l < 0 || l > grid.M)
            throw ParseError("grid CSV index out of range: " + line);
        out.at(c, i, l) = v;
    }
    return out;
}

BoundaryTrace BoundaryTrace::from_grid(const GridFunction& u) {
    BoundaryTrace tr;
    tr.n_comp = u.components();
    tr.s = u.grid().s;
    tr.T = u.grid().T;
    tr.left.assign(tr.n_comp, std::vector<double>(u.grid().M + 1));
    tr.right.assign(tr.n_comp, std::vector<double>(u.grid().M + 1));
    for (int c = 0; c < tr.n_comp; ++c)
        for (int l = 0; l <= u.grid().M; ++l) {
            tr.left[c][l] = u.at(c, 0, l);
            tr.right[c][l] = u.at(c, u.grid().N, l);
        }
    return tr;
}

double BoundaryTrace::eval(int comp, bool right_edge, double t) const {
    const double tol = 1e-12 * std::max(1.0, std::abs(s) + T);
    if (t < s - tol || t > s + T + tol)
        throw DomainError("boundary trace queried outside its time range");
    const auto& col = right_edge ? right[comp] : left[comp];
    const double ft = std::clamp((t - s) / dt(), 0.0, static_cast<double>(levels() - 1));
    int l = std::min(static_cast<int>(ft), levels() - 2);
    const double w = ft - l;
    return (1 - w) * col[l] + w * col[l + 1];
}

double InitialProfile::eval(int comp, double x) const {
    const double fx = std::clamp(x, 0.0, 1.0) * N;
    int ix = std::min(static_cast<int>(fx), N - 1);
    const double w = fx - ix;
    return (1 - w) * at(comp, ix) + w * at(comp, ix + 1);
}

double InitialProfile::sup_norm() const {
    double r = 0.0;
    for (double x : values) r = std::max(r, std::abs(x));
    return r;
}

}  // namespace hyplab
