#pragma once

// Shared random-input generators for the property tests.

#include <Eigen/Core>
#include <random>

#include "iosim/parameters.hpp"
#include "iosim/state.hpp"
#include "iosim/topology.hpp"

namespace gen {

// A physiologically plausible random state: voltages in [-80, 40] mV,
// gates in [0, 1], calcium in [0.5, 10].
inline iosim::StateMatrix<double> random_state(std::mt19937_64& rng, Eigen::Index n) {
    namespace row = iosim::state_row;
    std::uniform_real_distribution<double> uv(-80.0, 40.0);
    std::uniform_real_distribution<double> ug(0.0, 1.0);
    std::uniform_real_distribution<double> uc(0.5, 10.0);

    iosim::StateMatrix<double> s(row::count, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        s(row::v_soma, i) = uv(rng);
        s(row::v_dend, i) = uv(rng);
        s(row::v_axon, i) = uv(rng);
        for (Eigen::Index r = row::cal_k; r <= row::h_q; ++r) s(r, i) = ug(rng);
        s(row::ca, i) = uc(rng);
    }
    return s;
}

// Reference parameters with every conductance scaled by a random factor in
// [0.5, 2.0].
inline iosim::CellParameters random_parameters(std::mt19937_64& rng, Eigen::Index n) {
    std::uniform_real_distribution<double> uf(0.5, 2.0);
    iosim::CellParameters p = iosim::CellParameters::reference(n);
    for (const auto& field : iosim::conductance_fields())
        for (Eigen::Index i = 0; i < n; ++i) (p.*(field.second))[i] *= uf(rng);
    for (Eigen::Index i = 0; i < n; ++i) p.g_gj[i] *= uf(rng);
    return p;
}

// A random valid directed edge list over n neurons: distinct undirected
// pairs, both directions emitted, sorted by (tgt, src).
inline iosim::Topology random_graph(std::mt19937_64& rng, Eigen::Index n, Eigen::Index max_pairs) {
    std::uniform_int_distribution<Eigen::Index> un(0, n - 1);
    std::uniform_int_distribution<Eigen::Index> ucount(0, max_pairs);

    std::vector<std::uint64_t> pairs;
    const Eigen::Index want = std::min(ucount(rng), n * (n - 1) / 2);
    while (static_cast<Eigen::Index>(pairs.size()) < want) {
        const Eigen::Index a = un(rng);
        const Eigen::Index b = un(rng);
        if (a == b) continue;
        const std::uint64_t key = (std::uint64_t(std::min(a, b)) << 32) | std::uint64_t(std::max(a, b));
        if (std::find(pairs.begin(), pairs.end(), key) == pairs.end()) pairs.push_back(key);
    }

    std::vector<std::uint64_t> edges;  // packed (tgt << 32) | src
    for (std::uint64_t key : pairs) {
        const auto a = static_cast<Eigen::Index>(key >> 32);
        const auto b = static_cast<Eigen::Index>(key & 0xFFFFFFFFu);
        edges.push_back((std::uint64_t(b) << 32) | std::uint64_t(a));
        edges.push_back((std::uint64_t(a) << 32) | std::uint64_t(b));
    }
    std::sort(edges.begin(), edges.end());

    iosim::Topology topo;
    topo.grid_dim = 2;  // placeholder; distance invariants do not apply here
    topo.src.resize(static_cast<Eigen::Index>(edges.size()));
    topo.tgt.resize(static_cast<Eigen::Index>(edges.size()));
    for (std::size_t k = 0; k < edges.size(); ++k) {
        topo.tgt[static_cast<Eigen::Index>(k)] = static_cast<int>(edges[k] >> 32);
        topo.src[static_cast<Eigen::Index>(k)] = static_cast<int>(edges[k] & 0xFFFFFFFFu);
    }
    return topo;
}

}  // namespace gen
