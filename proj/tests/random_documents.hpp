#pragma once

// Random network documents of every kind, for serialization round trips.

#include <random>

#include "anet/io.hpp"
#include "anet/relu.hpp"
#include "test_support.hpp"

namespace anet::testing {

inline Activation random_activation(Field f, std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> pick(0, f == Field::Real ? 7 : 5);
    switch (pick(rng)) {
    case 0: return Activation::exp(f);
    case 1: return Activation::sin(f);
    case 2: return Activation::cosh(f);
    case 3: return Activation::sinh(f);
    case 4: return Activation::polynomial(f, {draw(f, rng), draw(f, rng), draw(f, rng)});
    case 5: return Activation::cos(f);
    case 6: return Activation::relu();
    default: return Activation::leaky_relu(std::uniform_real_distribution<double>(0.0, 0.5)(rng));
    }
}

inline Matrix random_matrix(Field f, Eigen::Index r, Eigen::Index c, std::mt19937_64& rng)
{
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = draw(f, rng, -3.0, 3.0);
    return m;
}

inline ResNet random_resnet(const Activation& act, std::size_t d, std::mt19937_64& rng)
{
    const Field f = act.field();
    std::uniform_int_distribution<Eigen::Index> size(1, 4);
    const Eigen::Index d0 = static_cast<Eigen::Index>(d) + size(rng);
    std::vector<ResBlock> blocks;
    for (Eigen::Index l = size(rng); l > 0; --l) {
        const Eigen::Index D = size(rng);
        blocks.push_back({random_matrix(f, d0, D, rng), random_matrix(f, D, d0, rng), random_matrix(f, D, 1, rng)});
    }
    return ResNet(act, random_matrix(f, d0, static_cast<Eigen::Index>(d), rng), random_matrix(f, d0, 1, rng), std::move(blocks),
                  random_matrix(f, 1, d0, rng));
}

inline HarmonicNet random_harmonic(std::size_t d, std::mt19937_64& rng)
{
    static const HarmonicActivation acts[] = {HarmonicActivation::quadratic(), HarmonicActivation::cubic(),
                                               HarmonicActivation::expcos()};
    std::uniform_int_distribution<int> pick(0, 2);
    const auto& act = acts[pick(rng)];
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<HarmonicTerm> terms;
    for (int i = 0; i < 3; ++i) terms.push_back({u(rng), u(rng), random_projection(act.k, d, rng), {u(rng), u(rng)}});
    return HarmonicNet(act, d, std::move(terms));
}

/// kind: 0 shallow, 1 resnet, 2 mlp, 3 densenet, 4 harmonic.
inline NetworkDocument random_document(int kind, std::mt19937_64& rng)
{
    const Field f = rng() % 2 ? Field::Complex : Field::Real;
    const Activation act = random_activation(f, rng);
    const std::size_t d = 1 + rng() % 3;
    switch (kind) {
    case 0: return {random_shallow(act, d, 1 + rng() % 6, rng), Json{{"builder", "random"}}};
    case 1: return {random_resnet(act, d, rng)};
    case 2: return {random_mlp(act, {d, 1 + rng() % 4, 1 + rng() % 4, 1}, rng)};
    case 3: return {densenet_from_mlp(random_mlp(act, {d, 1 + rng() % 4, 1}, rng))};
    default: return {random_harmonic(2 + d, rng)};
    }
}

/// Evaluates any network at a point drawn for its input dimension and field.
inline Scalar eval_any(const AnyNetwork& net, std::mt19937_64& rng)
{
    return std::visit(
        [&](const auto& x) -> Scalar {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, HarmonicNet>) {
                std::vector<double> p(x.dim());
                for (auto& v : p) v = draw(Field::Real, rng).real();
                return eval_harmonic_net(x, p);
            } else {
                std::size_t d;
                if constexpr (std::is_same_v<T, ShallowNet>) d = x.dim();
                else d = x.input_dim();
                const auto z = draw_point(x.field(), d, rng);
                if constexpr (std::is_same_v<T, ShallowNet>) return eval_shallow(x, z);
                else if constexpr (std::is_same_v<T, ResNet>) return eval_resnet(x, z);
                else if constexpr (std::is_same_v<T, MLP>) return eval_mlp(x, z);
                else return eval_densenet(x, z);
            }
        },
        net);
}

} // namespace anet::testing
