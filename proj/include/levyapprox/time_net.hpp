#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "levyapprox/common.hpp"

namespace levyapprox {

// Deterministic time-net 0 = t_0 < t_1 < ... < t_N = 1.
class TimeNet {
public:
    explicit TimeNet(std::vector<double> points) : points_(std::move(points)) {
        require(points_.size() >= 2, "TimeNet: need at least two knots");
        // Collapse floating-point duplicates; reject if the interval count drops.
        const std::size_t requested = points_.size() - 1;
        std::vector<double> clean;
        clean.reserve(points_.size());
        clean.push_back(points_.front());
        for (std::size_t i = 1; i < points_.size(); ++i) {
            if (points_[i] > clean.back()) clean.push_back(points_[i]);
        }
        require(clean.size() - 1 == requested,
                "TimeNet: knots are not strictly increasing");
        points_ = std::move(clean);
        require(points_.front() == 0.0 && points_.back() == 1.0,
                "TimeNet: endpoints must be exactly 0 and 1");
    }

    // theta-net t_k = 1 - (1 - k/N)^{1/theta}; theta = 1 is equidistant.
    static TimeNet theta(std::size_t N, double theta_param) {
        require(N >= 1, "theta net: N >= 1 required");
        require(theta_param > 0.0 && theta_param <= 1.0,
                "theta net: theta in (0,1] required");
        std::vector<double> pts(N + 1);
        for (std::size_t k = 0; k <= N; ++k) {
            const double frac = 1.0 - static_cast<double>(k) / static_cast<double>(N);
            pts[k] = 1.0 - std::pow(frac, 1.0 / theta_param);
        }
        pts[0] = 0.0;
        pts[N] = 1.0;
        return TimeNet(std::move(pts));
    }

    static TimeNet equidistant(std::size_t N) { return theta(N, 1.0); }

    const std::vector<double>& points() const { return points_; }
    std::size_t intervals() const { return points_.size() - 1; }
    double operator[](std::size_t k) const { return points_[k]; }

    double mesh() const {
        double m = 0.0;
        for (std::size_t k = 1; k < points_.size(); ++k)
            m = std::max(m, points_[k] - points_[k - 1]);
        return m;
    }

    // Sorted union with {k/N : k = 0..N}; mesh of the result is <= 1/N.
    TimeNet refine_union(std::size_t N) const {
        require(N >= 1, "refine_union: N >= 1 required");
        std::vector<double> merged = points_;
        for (std::size_t k = 0; k <= N; ++k)
            merged.push_back(static_cast<double>(k) / static_cast<double>(N));
        std::sort(merged.begin(), merged.end());
        std::vector<double> out;
        out.reserve(merged.size());
        out.push_back(merged.front());
        for (double t : merged) {
            if (t - out.back() > 1e-13) out.push_back(t);
        }
        out.front() = 0.0;
        out.back() = 1.0;
        return TimeNet(std::move(out));
    }

private:
    std::vector<double> points_;
};

struct MeshBoundCheck {
    bool ok = false;
    double margin = 0.0;  // 1/(theta N) minus the worst ratio; >= 0 when ok
};

// Checks |t_k - t_{k-1}| / (1 - t_{k-1})^{1-theta} <= 1/(theta N) over the
// theta-net, the estimate the rate results rely on.
inline MeshBoundCheck mesh_bound_check(std::size_t N, double theta_param) {
    const TimeNet net = TimeNet::theta(N, theta_param);
    const double bound =
        1.0 / (theta_param * static_cast<double>(N));
    double worst = 0.0;
    for (std::size_t k = 1; k <= net.intervals(); ++k) {
        const double prev = net[k - 1];
        const double ratio =
            (net[k] - prev) / std::pow(1.0 - prev, 1.0 - theta_param);
        worst = std::max(worst, ratio);
    }
    MeshBoundCheck res;
    res.margin = bound - worst;
    res.ok = res.margin >= -1e-12;
    return res;
}

}  // namespace levyapprox
