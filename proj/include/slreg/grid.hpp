#pragma once

/**
 * @file grid.hpp
 * @brief Geometric endpoint meshes for resolving boundary singularities.
 *
 * All endpoint analysis happens on a grid that marches from an interior
 * anchor c toward one endpoint in geometric steps: for a finite endpoint e
 * the grid points are e + (c - e) sigma^i, so each level halves (by default)
 * the distance to the singularity; for an infinite endpoint they are
 * c / sigma^i, capped at a configurable magnitude.  Consecutive grid points
 * bound "panels", and every panel carries Chebyshev-Lobatto sample nodes.
 * Functions of interest are smooth on each panel -- the geometric compression
 * is what turns an endpoint singularity into a sequence of benign panels --
 * so spectral quadrature per panel plus geometric tail extrapolation yields
 * high-accuracy improper integrals without ever evaluating at the endpoint.
 *
 * Depth convention: index 0 is the anchor; larger indices lie closer to the
 * endpoint.  "deep" always means "nearer the singular endpoint".
 */

#include <cmath>
#include <stdexcept>
#include <vector>

#include "slreg/cheb.hpp"
#include "slreg/problem.hpp"

namespace slreg {

struct GridConfig {
    double sigma = 0.5;   ///< geometric ratio per level, in (0, 1)
    int levels = 40;      ///< number of grid points (anchor included)
    int panel_order = 16; ///< Chebyshev order per panel (panel carries order+1 nodes)
    double x_max = 1e3;   ///< cap on |x| for infinite endpoints
};

class EndpointGrid {
public:
    EndpointGrid(const Interval& iv, Side side, double anchor, GridConfig cfg = {})
        : side_(side), interval_(iv), anchor_(anchor), cfg_(cfg) {
        if (!(cfg.sigma > 0.0 && cfg.sigma < 1.0))
            throw std::invalid_argument("EndpointGrid: sigma must lie in (0,1)");
        if (cfg.levels < 3) throw std::invalid_argument("EndpointGrid: need at least 3 levels");
        const double e = iv.endpoint(side);
        infinite_ = std::isinf(e);
        if (!infinite_) {
            if ((side == Side::Left && !(anchor > e)) || (side == Side::Right && !(anchor < e)))
                throw std::invalid_argument("EndpointGrid: anchor must lie strictly inside the interval");
            if (side == Side::Left && anchor > iv.b) throw std::invalid_argument("EndpointGrid: anchor beyond far endpoint");
            if (side == Side::Right && anchor < iv.a) throw std::invalid_argument("EndpointGrid: anchor beyond far endpoint");
            for (int i = 0; i < cfg.levels; ++i) {
                const double x = e + (anchor - e) * std::pow(cfg.sigma, i);
                points_.push_back(x);
            }
        } else {
            if (anchor == 0.0) throw std::invalid_argument("EndpointGrid: anchor must be nonzero toward an infinite endpoint");
            if ((side == Side::Right && anchor < 0) || (side == Side::Left && anchor > 0))
                throw std::invalid_argument("EndpointGrid: anchor sign inconsistent with infinite endpoint");
            for (int i = 0; i < cfg.levels; ++i) {
                const double x = anchor / std::pow(cfg.sigma, i);
                if (std::abs(x) > cfg.x_max && i > 0) break;
                points_.push_back(x);
            }
            if (points_.size() < 3) throw std::invalid_argument("EndpointGrid: x_max leaves fewer than 3 levels");
        }
        build_nodes();
    }

    Side side() const { return side_; }
    const Interval& interval() const { return interval_; }
    double anchor() const { return anchor_; }
    bool endpoint_infinite() const { return infinite_; }
    double endpoint() const { return interval_.endpoint(side_); }
    double sigma() const { return cfg_.sigma; }
    int panel_order() const { return cfg_.panel_order; }
    const GridConfig& config() const { return cfg_; }

    /// Grid points ordered anchor -> endpoint.
    const std::vector<double>& points() const { return points_; }
    int levels() const { return static_cast<int>(points_.size()); }
    int panels() const { return levels() - 1; }

    /// Global fine nodes ordered anchor -> endpoint; node_count = panels*G + 1.
    const std::vector<double>& nodes() const { return nodes_; }
    int node_count() const { return static_cast<int>(nodes_.size()); }
    double deepest() const { return points_.back(); }

    /// Panel k spans grid points k (shallow) .. k+1 (deep); its sample nodes
    /// occupy global indices k*G .. k*G + G, shared at panel joints.
    int panel_of_node(int node) const {
        const int G = cfg_.panel_order;
        int k = node / G;
        if (k >= panels()) k = panels() - 1;
        return k;
    }
    int node_index(int panel, int j) const { return panel * cfg_.panel_order + j; }
    int node_of_point(int level) const { return level * cfg_.panel_order; }

    double shallow_edge(int panel) const { return points_[panel]; }
    double deep_edge(int panel) const { return points_[panel + 1]; }
    /// Half-width |deep - shallow| / 2 of a panel.
    double panel_halfwidth(int panel) const { return std::abs(points_[panel + 1] - points_[panel]) / 2.0; }

    /// Distance to the (finite) endpoint, or |x| toward an infinite one.
    double depth_coordinate(double x) const {
        if (infinite_) return std::abs(x);
        return std::abs(x - endpoint());
    }

    /// Locate the node index of a given grid-point coordinate; exact matches only.
    int find_node(double x, double tol = 1e-12) const {
        for (int i = 0; i < node_count(); ++i)
            if (std::abs(nodes_[i] - x) <= tol * std::max(1.0, std::abs(x))) return i;
        throw std::invalid_argument("EndpointGrid: coordinate is not a mesh node");
    }

private:
    void build_nodes() {
        const int G = cfg_.panel_order;
        const ChebBasis& basis = ChebBasis::get(G);
        nodes_.clear();
        nodes_.reserve(panels() * G + 1);
        for (int k = 0; k < panels(); ++k) {
            const double shallow = points_[k], deep = points_[k + 1];
            const double mid = 0.5 * (shallow + deep);
            const double h = 0.5 * (deep - shallow); // signed: tau=-1 -> shallow, tau=+1 -> deep
            for (int j = (k == 0 ? 0 : 1); j <= G; ++j) {
                nodes_.push_back(mid + h * basis.nodes()[j]);
            }
        }
    }

    Side side_;
    Interval interval_;
    double anchor_;
    GridConfig cfg_;
    bool infinite_ = false;
    std::vector<double> points_;
    std::vector<double> nodes_;
};

} // namespace slreg
