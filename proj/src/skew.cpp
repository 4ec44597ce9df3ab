#include "paflow/skew.hpp"

#include <array>
#include <cstdlib>
#include <map>
#include <queue>
#include <sstream>

namespace paflow {

namespace {

bool integral(const Rational& r) { return r.denominator() == 1; }

std::array<long long, 4> key_of(const SkewOrbit& o) {
    return {o.d.numerator(), o.d.denominator(), o.c.numerator(), o.c.denominator()};
}

}  // namespace

bool valid_skew_orbit(const SkewOrbit& o) { return o.c - 1 < o.d && o.d < o.c; }

SkewOrbit make_skew_orbit(const Rational& d, const Rational& c) {
    SkewOrbit o{d, c};
    if (!valid_skew_orbit(o)) {
        std::ostringstream msg;
        msg << "orbit (" << d << ", " << c << ") lies outside the strip: need c - 1 < d < c";
        throw LozengeError(msg.str());
    }
    return o;
}

SkewOrbit skew_partner(const SkewOrbit& o) { return {o.c, o.d + 1}; }

SkewOrbit skew_partner_inverse(const SkewOrbit& o) { return {o.c - 1, o.d}; }

SkewConnectivity skew_chain_connected(const SkewOrbit& a, const SkewOrbit& b) {
    // even: b = (d + n, c + n) for an integer n (both shifts match by strip
    // validity, but check them independently anyway)
    Rational dn = b.d - a.d;
    Rational cn = b.c - a.c;
    if (integral(dn) && integral(cn) && dn == cn)
        return {SkewVerdict::connected_even, 2 * std::llabs(dn.numerator())};
    // odd: b is the partner of an even shift, b = (c + m, d + 1 + m)
    Rational md = b.d - a.c;
    Rational mc = b.c - a.d - 1;
    if (integral(md) && integral(mc) && md == mc)
        return {SkewVerdict::connected_odd, std::llabs(2 * md.numerator() + 1)};
    return {SkewVerdict::not_connected, -1};
}

int skew_chain_bfs(const SkewOrbit& a, const SkewOrbit& b, int max_depth) {
    if (max_depth < 0) return -1;
    auto target = key_of(b);
    if (key_of(a) == target) return 0;
    std::map<std::array<long long, 4>, int> dist;
    std::queue<SkewOrbit> frontier;
    dist[key_of(a)] = 0;
    frontier.push(a);
    while (!frontier.empty()) {
        SkewOrbit o = frontier.front();
        frontier.pop();
        int d0 = dist.at(key_of(o));
        if (d0 == max_depth) continue;
        for (const SkewOrbit& nb : {skew_partner(o), skew_partner_inverse(o)}) {
            auto k = key_of(nb);
            if (dist.count(k)) continue;
            dist[k] = d0 + 1;
            if (k == target) return d0 + 1;
            frontier.push(nb);
        }
    }
    return -1;
}

}  // namespace paflow
