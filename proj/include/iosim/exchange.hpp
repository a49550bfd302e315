#pragma once

#include <Eigen/Core>

#include "iosim/errors.hpp"
#include "iosim/precision.hpp"
#include "iosim/topology.hpp"

namespace iosim {

// Connexin-36 gap-junction current for a voltage difference dv between the
// two coupled dendrites: g * dv * (0.2 + 0.8 * exp(-dv^2 / 100)).
template <class Scalar, class ExpFn = IeeeExp>
Scalar gap_junction_current(Scalar dv, Scalar g_gj) {
    return g_gj * dv * (Scalar(0.2) + Scalar(0.8) * ExpFn{}(-(dv * dv) / Scalar(100)));
}

// Gather/scatter-add over one contiguous edge segment [e0, e1): for each
// edge, dv = v_dend[src] - v_dend[tgt], converted to a current with the
// target's junction conductance and accumulated into i_gj[tgt]. Zeroes and
// fills only the target range [col0, col0+ncols); the caller guarantees
// every edge in the segment points into that range. Accumulation runs in
// ascending edge order, so per-target sums have a fixed order no matter
// how segments are assigned to threads.
template <class Scalar, class ExpFn = IeeeExp>
void exchange_segment(const Scalar* v_dend, const Topology& topo, const Scalar* g_gj,
                      Eigen::Index e0, Eigen::Index e1, Eigen::Index col0, Eigen::Index ncols,
                      Scalar* i_gj) {
    for (Eigen::Index i = col0; i < col0 + ncols; ++i) i_gj[i] = Scalar(0);
    const int* src = topo.src.data();
    const int* tgt = topo.tgt.data();
    for (Eigen::Index e = e0; e < e1; ++e) {
        const int t = tgt[e];
        const Scalar dv = v_dend[src[e]] - v_dend[t];
        i_gj[t] += gap_junction_current<Scalar, ExpFn>(dv, g_gj[t]);
    }
}

// Gap-junction currents for the whole network.
template <class Scalar, class ExpFn = IeeeExp>
Eigen::ArrayX<Scalar> exchange(const Eigen::ArrayX<Scalar>& v_dend, const Topology& topo,
                               const Eigen::ArrayX<Scalar>& g_gj) {
    const Eigen::Index n = v_dend.size();
    if (g_gj.size() != n) throw ContractError("exchange: v_dend and g_gj disagree on N");
    if (topo.edge_count() > 0) {
        const int lo = std::min(topo.src.minCoeff(), topo.tgt.minCoeff());
        const int hi = std::max(topo.src.maxCoeff(), topo.tgt.maxCoeff());
        if (lo < 0 || hi >= n) throw ContractError("exchange: edge index out of range");
    }
    Eigen::ArrayX<Scalar> i_gj(n);
    exchange_segment<Scalar, ExpFn>(v_dend.data(), topo, g_gj.data(), 0, topo.edge_count(), 0, n,
                                    i_gj.data());
    return i_gj;
}

// Scalar-conductance convenience overload.
template <class Scalar, class ExpFn = IeeeExp>
Eigen::ArrayX<Scalar> exchange(const Eigen::ArrayX<Scalar>& v_dend, const Topology& topo,
                               Scalar g_gj) {
    return exchange<Scalar, ExpFn>(v_dend, topo,
                                   Eigen::ArrayX<Scalar>::Constant(v_dend.size(), g_gj));
}

}  // namespace iosim
