#pragma once

#include "obscura/curve.hpp"
#include "obscura/random.hpp"
#include "ref_curve.hpp"

namespace testutil {

inline refcurve::Int to_int(const obscura::U256& v) {
    auto be = obscura::u256_to_be(v);
    return refcurve::from_be(be.data(), be.size());
}

inline refcurve::Int to_int(const obscura::Scalar& s) {
    return to_int(s.value());
}

inline obscura::U256 to_u256(const refcurve::Int& v) {
    auto be = refcurve::to_be<32>(v);
    return obscura::u256_from_be(be);
}

inline refcurve::Point to_ref(const obscura::GroupPoint& p) {
    if (p.is_identity())
        return refcurve::Point{};
    return refcurve::Point{to_int(p.x().value()), to_int(p.y().value()), false};
}

inline obscura::GroupPoint from_ref(const refcurve::Point& p) {
    if (p.identity)
        return obscura::GroupPoint::identity();
    return obscura::GroupPoint(obscura::Fp::from_u256(to_u256(p.x)),
                               obscura::Fp::from_u256(to_u256(p.y)));
}

inline obscura::Scalar scalar_of(std::uint64_t v) {
    return obscura::Scalar::from_u64(v);
}

inline obscura::GroupPoint random_point(obscura::RandomSource& rng) {
    return obscura::point_mul(obscura::generator_g(), obscura::random_nonzero_scalar(rng));
}

}  // namespace testutil
