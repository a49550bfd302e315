#include "iosim/topology.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <queue>
#include <vector>

#include <json.hpp>

#include "iosim/errors.hpp"
#include "iosim/rng.hpp"

namespace iosim {

GridPoint grid_point(Eigen::Index index, int d) {
    const int di = static_cast<int>(index);
    return {di % d, (di / d) % d, di / (d * d)};
}

Eigen::Index grid_index(const GridPoint& p, int d) {
    return static_cast<Eigen::Index>(p.z) * d * d + static_cast<Eigen::Index>(p.y) * d + p.x;
}

double torus_distance(const GridPoint& a, const GridPoint& b, int d) {
    auto wrap = [d](int u, int v) {
        const int delta = std::abs(u - v);
        return std::min(delta, d - delta);
    };
    const double dx = wrap(a.x, b.x);
    const double dy = wrap(a.y, b.y);
    const double dz = wrap(a.z, b.z);
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double connection_weight(double r, double r_max) {
    if (r <= 0.0 || r >= r_max) return 0.0;
    return std::exp(-r * r) - std::exp(-r_max * r_max);
}

Topology Topology::unconnected(int d) {
    if (d < 2) throw ConfigError("grid dimension must be >= 2");
    Topology t;
    t.grid_dim = d;
    t.avg_degree = 0.0;
    t.r_max = 0.0;
    t.src.resize(0);
    t.tgt.resize(0);
    return t;
}

namespace {

struct Offset {
    int ox, oy, oz;   // canonical offset components in [0, d)
    double weight;    // connection_weight at the wrapped distance
};

// All nonzero canonical offsets whose wrapped distance is inside r_max,
// in lexicographic order. b = a + offset (mod d) enumerates every ordered
// in-range pair exactly once when applied to every cell a.
std::vector<Offset> in_range_offsets(int d, double r_max) {
    std::vector<Offset> offsets;
    const GridPoint origin{0, 0, 0};
    for (int ox = 0; ox < d; ++ox)
        for (int oy = 0; oy < d; ++oy)
            for (int oz = 0; oz < d; ++oz) {
                if (ox == 0 && oy == 0 && oz == 0) continue;
                const double r = torus_distance(origin, GridPoint{ox, oy, oz}, d);
                const double w = connection_weight(r, r_max);
                if (w > 0.0) offsets.push_back({ox, oy, oz, w});
            }
    return offsets;
}

}  // namespace

Topology generate_topology(int d, double avg_degree, double r_max, std::uint64_t seed) {
    if (d < 2) throw ConfigError("grid dimension must be >= 2");
    if (avg_degree < 0.0) throw ConfigError("average degree must be non-negative");

    const Eigen::Index n = static_cast<Eigen::Index>(d) * d * d;
    const auto offsets = in_range_offsets(d, r_max);
    const Eigen::Index candidate_pairs = n * static_cast<Eigen::Index>(offsets.size()) / 2;
    const Eigen::Index want = static_cast<Eigen::Index>(avg_degree * double(n) / 2.0);

    if (want > candidate_pairs) {
        const double max_degree = 2.0 * double(candidate_pairs) / double(n);
        throw ConfigError("average degree " + std::to_string(avg_degree) +
                          " not achievable with r_max = " + std::to_string(r_max) +
                          "; at most " + std::to_string(max_degree) + " is");
    }

    // Weighted sampling without replacement (A-Res): keep the `want`
    // candidates with the largest keys log(u)/w. Candidates are visited in
    // a fixed order (cell-major, offsets lexicographic) and draw exactly
    // one uniform each, so the selection is a pure function of the seed.
    using Entry = std::pair<double, std::uint64_t>;  // key, cell * n_offsets + offset index
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> best;
    SeededRng rng(seed);

    const int dd = d * d;
    for (Eigen::Index a = 0; a < n; ++a) {
        const int ax = static_cast<int>(a) % d;
        const int ay = (static_cast<int>(a) / d) % d;
        const int az = static_cast<int>(a) / dd;
        for (std::size_t oi = 0; oi < offsets.size(); ++oi) {
            const Offset& o = offsets[oi];
            const int bx = ax + o.ox < d ? ax + o.ox : ax + o.ox - d;
            const int by = ay + o.oy < d ? ay + o.oy : ay + o.oy - d;
            const int bz = az + o.oz < d ? az + o.oz : az + o.oz - d;
            const Eigen::Index b = static_cast<Eigen::Index>(bz) * dd + by * Eigen::Index(d) + bx;
            if (b <= a) continue;  // count each unordered pair once
            const double key = std::log(rng.uniform_pos01()) / o.weight;
            const std::uint64_t id = std::uint64_t(a) * offsets.size() + oi;
            if (static_cast<Eigen::Index>(best.size()) < want) {
                best.emplace(key, id);
            } else if (want > 0 && Entry(key, id) > best.top()) {
                best.pop();
                best.emplace(key, id);
            }
        }
    }

    // Both directions of every selected pair, sorted by (tgt, src).
    std::vector<std::uint64_t> edges;
    edges.reserve(2 * static_cast<std::size_t>(want));
    auto pack = [](Eigen::Index tgt, Eigen::Index src) {
        return (std::uint64_t(tgt) << 32) | std::uint64_t(src);
    };
    while (!best.empty()) {
        const std::uint64_t id = best.top().second;
        best.pop();
        const Eigen::Index a = static_cast<Eigen::Index>(id / offsets.size());
        const Offset& o = offsets[id % offsets.size()];
        const GridPoint pa = grid_point(a, d);
        const GridPoint pb{(pa.x + o.ox) % d, (pa.y + o.oy) % d, (pa.z + o.oz) % d};
        const Eigen::Index b = grid_index(pb, d);
        edges.push_back(pack(a, b));
        edges.push_back(pack(b, a));
    }
    std::sort(edges.begin(), edges.end());

    Topology topo;
    topo.grid_dim = d;
    topo.avg_degree = avg_degree;
    topo.r_max = r_max;
    topo.seed = seed;
    topo.src.resize(static_cast<Eigen::Index>(edges.size()));
    topo.tgt.resize(static_cast<Eigen::Index>(edges.size()));
    for (std::size_t k = 0; k < edges.size(); ++k) {
        topo.tgt[static_cast<Eigen::Index>(k)] = static_cast<int>(edges[k] >> 32);
        topo.src[static_cast<Eigen::Index>(k)] = static_cast<int>(edges[k] & 0xFFFFFFFFu);
    }
    return topo;
}

void Topology::validate() const {
    if (grid_dim < 2) throw ContractError("topology: grid_dim must be >= 2");
    const Eigen::Index n = neuron_count();
    const Eigen::Index e = edge_count();
    if (tgt.size() != e) throw ContractError("topology: src/tgt length mismatch");

    std::vector<std::uint64_t> seen;
    seen.reserve(static_cast<std::size_t>(e));
    for (Eigen::Index k = 0; k < e; ++k) {
        if (src[k] < 0 || src[k] >= n || tgt[k] < 0 || tgt[k] >= n)
            throw ContractError("topology: edge index out of range");
        if (src[k] == tgt[k]) throw ContractError("topology: self junction");
        if (k > 0 && (tgt[k] < tgt[k - 1] || (tgt[k] == tgt[k - 1] && src[k] <= src[k - 1])))
            throw ContractError("topology: edge list not sorted by (tgt, src)");
        if (r_max > 0.0) {
            const double r = torus_distance(grid_point(src[k], grid_dim),
                                            grid_point(tgt[k], grid_dim), grid_dim);
            if (r >= r_max) throw ContractError("topology: connection at distance >= r_max");
        }
        seen.push_back((std::uint64_t(src[k]) << 32) | std::uint64_t(tgt[k]));
    }
    // gap junctions conduct both ways: (a,b) present iff (b,a) present
    std::sort(seen.begin(), seen.end());
    for (Eigen::Index k = 0; k < e; ++k) {
        const std::uint64_t rev = (std::uint64_t(tgt[k]) << 32) | std::uint64_t(src[k]);
        if (!std::binary_search(seen.begin(), seen.end(), rev))
            throw ContractError("topology: missing reverse direction of an edge");
    }
}

void write_topology_csv(const Topology& topo, const std::string& csv_path,
                        const std::string& sidecar_path) {
    std::ofstream out(csv_path);
    if (!out) throw ConfigError("cannot write " + csv_path);
    out << "src,tgt\n";
    for (Eigen::Index k = 0; k < topo.edge_count(); ++k)
        out << topo.src[k] << ',' << topo.tgt[k] << '\n';

    nlohmann::json j{{"grid_dim", topo.grid_dim},
                     {"avg_degree", topo.avg_degree},
                     {"r_max", topo.r_max},
                     {"seed", topo.seed},
                     {"rng_algorithm", topo.rng_algorithm}};
    std::ofstream side(sidecar_path);
    if (!side) throw ConfigError("cannot write " + sidecar_path);
    side << j.dump(2) << "\n";
}

Topology read_topology_csv(const std::string& csv_path, const std::string& sidecar_path) {
    std::ifstream side(sidecar_path);
    if (!side) throw ConfigError("cannot open " + sidecar_path);
    nlohmann::json j;
    side >> j;

    Topology topo;
    topo.grid_dim = j.at("grid_dim").get<int>();
    topo.avg_degree = j.at("avg_degree").get<double>();
    topo.r_max = j.at("r_max").get<double>();
    topo.seed = j.at("seed").get<std::uint64_t>();
    topo.rng_algorithm = j.at("rng_algorithm").get<std::string>();

    std::ifstream in(csv_path);
    if (!in) throw ConfigError("cannot open " + csv_path);
    std::string line;
    if (!std::getline(in, line) || line != "src,tgt")
        throw ConfigError(csv_path + ": expected 'src,tgt' header");
    std::vector<int> src, tgt;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ConfigError(csv_path + ": malformed row");
        int s = 0, t = 0;
        auto r1 = std::from_chars(line.data(), line.data() + comma, s);
        auto r2 = std::from_chars(line.data() + comma + 1, line.data() + line.size(), t);
        if (r1.ec != std::errc{} || r2.ec != std::errc{})
            throw ConfigError(csv_path + ": malformed row");
        src.push_back(s);
        tgt.push_back(t);
    }
    topo.src = Eigen::Map<const Eigen::ArrayXi>(src.data(), static_cast<Eigen::Index>(src.size()));
    topo.tgt = Eigen::Map<const Eigen::ArrayXi>(tgt.data(), static_cast<Eigen::Index>(tgt.size()));
    return topo;
}

}  // namespace iosim
