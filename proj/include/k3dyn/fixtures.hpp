#pragma once

// Registry of worked K3 lattice systems. Involution pullbacks are entered
// from their action on the basis; composite automorphisms are derived with
// pullback_of_composite, so every fixture matrix below is the product of
// the involution matrices and nothing else.

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "k3dyn/picard.hpp"

namespace k3dyn {

struct LatticeFixture {
    std::string key;
    std::string description;
    MorphismSystem system;
    Cone cone;
};

namespace fixtures {

/// Two involutions of a surface in P2xP2: ι_i^*L_i = L_i, ι_i^*L_j = k·L_i − L_j
/// (k = 4 for a (1,1)+(2,2) intersection, k = 5 for (1,2)+(2,1)).
inline std::array<PullbackMap, 2> wehler_involutions(long k) {
    return {PullbackMap(IntMatrix{{1, k}, {0, -1}}, "iota1", true),
            PullbackMap(IntMatrix{{-1, 0}, {k, 1}}, "iota2", true)};
}

/// (2,2,2) surface in P1xP1xP1: ι_i^*L_i = −L_i + 2L_j + 2L_k, other classes fixed.
inline std::array<PullbackMap, 3> triple_involutions() {
    return {PullbackMap(IntMatrix{{-1, 0, 0}, {2, 1, 0}, {2, 0, 1}}, "iota1", true),
            PullbackMap(IntMatrix{{1, 2, 0}, {0, -1, 0}, {0, 2, 1}}, "iota2", true),
            PullbackMap(IntMatrix{{1, 0, 2}, {0, 1, 2}, {0, 0, -1}}, "iota3", true)};
}

inline MorphismSystem involution_pair(long k) {
    auto [i1, i2] = wehler_involutions(k);
    return MorphismSystem(2, {i1, i2});
}

/// {σ, σ^-1} with σ = ι2∘ι1.
inline MorphismSystem sigma_pair(long k) {
    auto [i1, i2] = wehler_involutions(k);
    std::array<PullbackMap, 2> forward{i1, i2};
    std::array<PullbackMap, 2> backward{i2, i1};
    return MorphismSystem(2, {pullback_of_composite(forward, "sigma1"), pullback_of_composite(backward, "sigma2")});
}

inline std::vector<LatticeFixture> build_registry() {
    auto [t1, t2, t3] = triple_involutions();
    std::array<PullbackMap, 3> tau_fwd{t1, t2, t3};
    std::array<PullbackMap, 3> tau_bwd{t3, t2, t1};
    std::array<PullbackMap, 2> s12_fwd{t1, t2};
    std::array<PullbackMap, 2> s12_bwd{t2, t1};

    std::vector<LatticeFixture> reg;
    reg.push_back({"wehler-I", "(1,1)+(2,2) surface in P2xP2, involutions {iota1, iota2}", involution_pair(4),
                   Cone::positive_orthant()});
    reg.push_back({"wehler-I-sigma", "(1,1)+(2,2) surface, {sigma, sigma^-1} with sigma = iota2.iota1",
                   sigma_pair(4), Cone::positive_orthant()});
    reg.push_back({"wehler-II", "(1,2)+(2,1) surface in P2xP2, involutions {iota1, iota2}", involution_pair(5),
                   Cone::positive_orthant()});
    reg.push_back({"wehler-II-sigma", "(1,2)+(2,1) surface, {sigma, sigma^-1} with sigma = iota2.iota1",
                   sigma_pair(5), Cone::positive_orthant()});
    reg.push_back({"triple-involution", "(2,2,2) surface in P1xP1xP1, involutions {iota1, iota2, iota3}",
                   MorphismSystem(3, {t1, t2, t3}), Cone::positive_orthant()});
    reg.push_back({"triple-tau", "(2,2,2) surface, {tau, tau^-1} with tau = iota3.iota2.iota1",
                   MorphismSystem(3, {pullback_of_composite(tau_fwd, "tau1"), pullback_of_composite(tau_bwd, "tau2")}),
                   Cone::positive_orthant()});
    reg.push_back({"triple-sigma12", "(2,2,2) surface, {sigma, sigma^-1} with sigma = iota2.iota1",
                   MorphismSystem(3, {pullback_of_composite(s12_fwd, "sigma1"), pullback_of_composite(s12_bwd, "sigma2")}),
                   Cone::positive_orthant()});
    return reg;
}

}  // namespace fixtures

inline const std::vector<LatticeFixture>& lattice_fixtures() {
    static const std::vector<LatticeFixture> registry = fixtures::build_registry();
    return registry;
}

inline const LatticeFixture& lattice_fixture(std::string_view key) {
    for (const auto& f : lattice_fixtures())
        if (f.key == key) return f;
    std::string known;
    for (const auto& f : lattice_fixtures()) known += (known.empty() ? "" : ", ") + f.key;
    throw InvalidArgument("unknown fixture '" + std::string(key) + "' (known: " + known + ")");
}

}  // namespace k3dyn
