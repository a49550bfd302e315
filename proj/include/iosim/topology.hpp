#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>

namespace iosim {

// Integer coordinate on the d x d x d wrap-around grid.
struct GridPoint {
    int x = 0, y = 0, z = 0;
};

GridPoint grid_point(Eigen::Index index, int d);
Eigen::Index grid_index(const GridPoint& p, int d);

// Euclidean distance on the 3-D torus: each axis delta wraps around.
double torus_distance(const GridPoint& a, const GridPoint& b, int d);

// Unnormalized sampling weight for a candidate connection at distance r.
// Zero at r = 0 (no self-junctions) and for r >= r_max; the shell-density
// factor of the underlying radial distribution is realized implicitly by
// enumerating actual grid neighbors.
double connection_weight(double r, double r_max);

// Directed gap-junction edge lists over the d^3 grid. Every undirected
// pair appears in both directions, and the lists are sorted by (tgt, src)
// so the engine's scatter-add runs over contiguous target segments in a
// fixed order.
struct Topology {
    int grid_dim = 0;
    double avg_degree = 0.0;
    double r_max = 0.0;
    std::uint64_t seed = 0;
    std::string rng_algorithm = "mt19937_64/a-res";

    Eigen::ArrayXi src;
    Eigen::ArrayXi tgt;

    Eigen::Index neuron_count() const {
        return static_cast<Eigen::Index>(grid_dim) * grid_dim * grid_dim;
    }
    Eigen::Index edge_count() const { return src.size(); }

    static Topology unconnected(int d);

    // Checks every structural invariant (index range, ordering, no self
    // edges, both directions present, distances below r_max).
    void validate() const;
};

// Samples floor(avg_degree * N / 2) distinct undirected pairs, each drawn
// with probability proportional to connection_weight of its torus distance
// (weighted reservoir sampling, Efraimidis-Spirakis A-Res keys over a
// mt19937_64 stream), then emits both directions. Deterministic in all
// arguments. Throws ConfigError when the degree target is not achievable
// within r_max.
Topology generate_topology(int d, double avg_degree, double r_max, std::uint64_t seed);

// CSV edge list ("src,tgt" header) plus a JSON sidecar with the generation
// parameters and RNG identifier.
void write_topology_csv(const Topology& topo, const std::string& csv_path,
                        const std::string& sidecar_path);
Topology read_topology_csv(const std::string& csv_path, const std::string& sidecar_path);

}  // namespace iosim
