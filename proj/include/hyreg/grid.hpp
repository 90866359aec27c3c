#pragma once

// Finite subsets of [1,N]^d, the raw material of the grid reductions.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace hyreg {

struct GridPoint {
    std::vector<long long> c;

    bool operator==(const GridPoint& o) const { return c == o.c; }
    bool operator<(const GridPoint& o) const { return c < o.c; }
};

class GridSet {
public:
    GridSet() = default;
    GridSet(int dimension, long long side) : dim_(dimension), side_(side) {
        if (dimension < 1) throw std::invalid_argument("grid: dimension must be >= 1");
        if (side < 1) throw std::invalid_argument("grid: side must be >= 1");
    }

    int dimension() const { return dim_; }
    long long side() const { return side_; }
    std::size_t size() const { return points_.size(); }
    const std::vector<GridPoint>& points() const { return points_; }

    void insert(GridPoint p) {
        if (static_cast<int>(p.c.size()) != dim_)
            throw std::invalid_argument("grid: point dimension mismatch");
        for (long long v : p.c)
            if (v < 1 || v > side_) throw std::invalid_argument("grid: coordinate out of range");
        auto it = std::lower_bound(points_.begin(), points_.end(), p);
        if (it == points_.end() || !(*it == p)) points_.insert(it, std::move(p));
    }

    void insert(std::initializer_list<long long> coords) {
        GridPoint p;
        p.c.assign(coords);
        insert(std::move(p));
    }

    bool contains(const GridPoint& p) const {
        return std::binary_search(points_.begin(), points_.end(), p);
    }

    bool contains_coords(const std::vector<long long>& c) const {
        for (long long v : c)
            if (v < 1 || v > side_) return false;
        GridPoint p{c};
        return contains(p);
    }

    bool operator==(const GridSet& o) const {
        return dim_ == o.dim_ && side_ == o.side_ && points_ == o.points_;
    }

private:
    int dim_ = 1;
    long long side_ = 1;
    std::vector<GridPoint> points_;  // sorted, unique
};

}  // namespace hyreg
