#pragma once

#include <boost/rational.hpp>

#include "paflow/lozenge.hpp"

namespace paflow {

using Rational = boost::rational<long long>;

// Periodic orbit of the skewed orbit-space model: the strip {x < y < x + 1}
// with stable leaves L_c horizontal (y = c) and unstable leaves U_d vertical
// (x = d). The intersection U_d cap L_c lies inside the strip exactly when
// c - 1 < d < c; everything is exact over the rationals.
struct SkewOrbit {
    Rational d, c;

    bool operator==(const SkewOrbit& o) const { return d == o.d && c == o.c; }
};

bool valid_skew_orbit(const SkewOrbit& o);

// Validating constructor; throws LozengeError outside the strip.
SkewOrbit make_skew_orbit(const Rational& d, const Rational& c);

// Opposite corner of the lozenge spanned at (d, c): the orbit (c, d + 1).
// Applying it twice is the unit diagonal shift (d + 1, c + 1).
SkewOrbit skew_partner(const SkewOrbit& o);

// Opposite corner of the other lozenge cornered at (d, c): (c - 1, d).
SkewOrbit skew_partner_inverse(const SkewOrbit& o);

enum class SkewVerdict { connected_even, connected_odd, not_connected };

inline const char* to_string(SkewVerdict v) {
    switch (v) {
        case SkewVerdict::connected_even: return "connected-even";
        case SkewVerdict::connected_odd: return "connected-odd";
        default: return "not-connected";
    }
}

struct SkewConnectivity {
    SkewVerdict verdict = SkewVerdict::not_connected;
    long long length = -1;  // minimal lozenge-chain length; -1 when not connected
};

// Closed-form criterion through the projection nu(o) = (c mod 1, d mod 1):
// two orbits are chain-connected iff their projections agree (even chains,
// length 2|n| for the diagonal shift by n) or agree after the partner swap
// (odd chains, length |2m + 1|).
SkewConnectivity skew_chain_connected(const SkewOrbit& a, const SkewOrbit& b);

// Breadth-first search over partner moves, the independent oracle for
// skew_chain_connected. Returns the chain length, or -1 when b is not reached
// within max_depth (a semi-decision: -1 only bounds the distance from below).
int skew_chain_bfs(const SkewOrbit& a, const SkewOrbit& b, int max_depth = 12);

}  // namespace paflow
