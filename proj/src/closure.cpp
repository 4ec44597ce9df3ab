#include "paflow/closure.hpp"

#include "paflow/block_flow.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <sstream>

namespace paflow {

namespace {
constexpr double kPi = std::numbers::pi;

// "a,b,c,d" -> longs; count must match
std::vector<long long> parse_ints(const std::string& s, std::size_t n, int line) {
    std::vector<long long> out;
    std::stringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoll(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (...) {
            throw ParseError(line, "expected integer, got '" + tok + "'");
        }
    }
    if (out.size() != n)
        throw ParseError(line, "expected " + std::to_string(n) + " comma-separated integers");
    return out;
}

std::vector<double> parse_reals(const std::string& s, std::size_t n, int line) {
    std::vector<double> out;
    std::stringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (...) {
            throw ParseError(line, "expected number, got '" + tok + "'");
        }
    }
    if (out.size() != n)
        throw ParseError(line, "expected " + std::to_string(n) + " comma-separated numbers");
    return out;
}

int resolve_component(const AssembledManifold& m, const std::string& name, int line) {
    for (std::size_t i = 0; i < m.components.size(); ++i)
        if (component_name(static_cast<int>(i)) == name) return static_cast<int>(i);
    throw ParseError(line, "unknown component '" + name + "'");
}

int resolve_vertex(const AssembledManifold& m, const std::string& name, int line) {
    for (std::size_t i = 0; i < m.bp.vertices.size(); ++i)
        if (m.bp.vertices[i].id == name) return static_cast<int>(i);
    throw ParseError(line, "unknown vertex '" + name + "'");
}

}  // namespace

std::string component_name(int cycle) { return "c" + std::to_string(cycle); }

GluingSpec parse_gluing(const std::string& text, const AssembledManifold& m) {
    GluingSpec spec;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
        std::istringstream ls(line);
        std::vector<std::string> toks;
        std::string t;
        while (ls >> t) toks.push_back(t);
        if (toks.empty()) continue;

        if (toks[0] == "match") {
            if (toks.size() < 4)
                throw ParseError(lineno, "match line needs <out> <in> L=a,b,c,d [shift=s,t]");
            GluingMatch gm;
            gm.out_name = toks[1];
            gm.in_name = toks[2];
            gm.out_component = resolve_component(m, gm.out_name, lineno);
            gm.in_component = resolve_component(m, gm.in_name, lineno);
            bool have_l = false;
            for (std::size_t i = 3; i < toks.size(); ++i) {
                if (toks[i].rfind("L=", 0) == 0) {
                    auto v = parse_ints(toks[i].substr(2), 4, lineno);
                    gm.a = v[0];
                    gm.b = v[1];
                    gm.c = v[2];
                    gm.d = v[3];
                    have_l = true;
                } else if (toks[i].rfind("shift=", 0) == 0) {
                    auto v = parse_reals(toks[i].substr(6), 2, lineno);
                    gm.s = v[0];
                    gm.t = v[1];
                } else {
                    throw ParseError(lineno, "unknown match field '" + toks[i] + "'");
                }
            }
            if (!have_l) throw ParseError(lineno, "match line is missing L=a,b,c,d");
            spec.matches.push_back(gm);
        } else if (toks[0] == "surgery") {
            if (toks.size() != 3 || toks[2].rfind("m=", 0) != 0)
                throw ParseError(lineno, "surgery line needs <vertex> m=p,q");
            SurgeryRecord sr;
            sr.vertex_name = toks[1];
            sr.vertex = resolve_vertex(m, sr.vertex_name, lineno);
            auto v = parse_ints(toks[2].substr(2), 2, lineno);
            sr.p = v[0];
            sr.q = v[1];
            spec.surgeries.push_back(sr);
        } else {
            throw ParseError(lineno, "unknown directive '" + toks[0] + "'");
        }
    }
    return spec;
}

GluingValidation validate_gluing(const AssembledManifold& m, const GluingSpec& spec) {
    GluingValidation val;
    auto fail = [&](const std::string& why) { val.failures.push_back(why); };

    // Klein bottles anywhere on the transverse boundary are fatal
    for (const auto& comp : m.components)
        if (!comp.torus)
            fail("component " + component_name(comp.cycle) + " (k=" + std::to_string(comp.k) +
                 ") is a Klein bottle: all the transverse components have to be tori");

    std::vector<int> out_used(m.components.size(), 0), in_used(m.components.size(), 0);
    for (const auto& gm : spec.matches) {
        const auto& out = m.components[gm.out_component];
        const auto& in = m.components[gm.in_component];
        std::string pair = gm.out_name + " -> " + gm.in_name;
        out_used[gm.out_component]++;
        in_used[gm.in_component]++;
        if (out.polarity != Polarity::outgoing)
            fail("match " + pair + ": " + gm.out_name + " is not an outgoing component");
        if (in.polarity != Polarity::incoming)
            fail("match " + pair + ": " + gm.in_name + " is not an incoming component");
        long long det = gm.a * gm.d - gm.b * gm.c;
        if (det != 1 && det != -1)
            fail("match " + pair + ": det L = " + std::to_string(det) + ", must be +-1");
        if (gm.b == 0)
            fail("match " + pair + ": b = 0 preserves the fiber line field (image of the fiber "
                 "class has zero horizontal homology)");
    }

    int n_out = 0, n_in = 0;
    for (const auto& comp : m.components)
        (comp.polarity == Polarity::outgoing ? n_out : n_in)++;
    if (n_out != n_in)
        fail("component counts differ: " + std::to_string(n_out) + " outgoing vs " +
             std::to_string(n_in) + " incoming");
    for (std::size_t i = 0; i < m.components.size(); ++i) {
        bool outgoing = m.components[i].polarity == Polarity::outgoing;
        int uses = outgoing ? out_used[i] : in_used[i];
        if (uses == 0)
            fail("component " + component_name(static_cast<int>(i)) + " (" +
                 (outgoing ? "outgoing" : "incoming") + ") is unmatched");
        else if (uses > 1)
            fail("component " + component_name(static_cast<int>(i)) + " is matched " +
                 std::to_string(uses) + " times");
    }

    for (const auto& sr : spec.surgeries) {
        if (std::gcd(sr.p, sr.q) != 1)
            fail("surgery on " + sr.vertex_name + ": meridian " + std::to_string(sr.p) + "," +
                 std::to_string(sr.q) + " is not coprime");
        if (sr.p == 0)
            fail("surgery on " + sr.vertex_name +
                 ": meridian equals the longitude of the vertical orbit");
    }

    val.pass = val.failures.empty();
    return val;
}

GlobalPoint apply_gluing(const AssembledManifold& m, const GluingMatch& match, GlobalPoint p) {
    double k_out = m.components[match.out_component].k;
    double k_in = m.components[match.in_component].k;
    double xi = p.u / (k_out * kPi), eta = p.v;
    double u = (match.a * xi + match.b * eta) * k_in * kPi + match.s;
    double v = match.c * xi + match.d * eta + match.t;
    double period = k_in * kPi;
    u -= period * std::floor(u / period);
    if (u >= period) u = 0;
    return {u, wrap01(v)};
}

GlobalPoint apply_gluing_inverse(const AssembledManifold& m, const GluingMatch& match,
                                 GlobalPoint p) {
    double k_out = m.components[match.out_component].k;
    double k_in = m.components[match.in_component].k;
    long long det = match.a * match.d - match.b * match.c;  // +-1, so inv = det * adj
    long long ia = det * match.d, ib = -det * match.b;
    long long ic = -det * match.c, id = det * match.a;
    double xi = (p.u - match.s) / (k_in * kPi), eta = p.v - match.t;
    double u = (ia * xi + ib * eta) * k_out * kPi;
    double v = ic * xi + id * eta;
    double period = k_out * kPi;
    u -= period * std::floor(u / period);
    if (u >= period) u = 0;
    return {u, wrap01(v)};
}

const GluingMatch& match_of_outgoing(const GluingSpec& spec, int component) {
    for (const auto& gm : spec.matches)
        if (gm.out_component == component) return gm;
    throw ClosureError("component " + component_name(component) + " is not in the matching");
}

const GluingMatch& match_of_incoming(const GluingSpec& spec, int component) {
    for (const auto& gm : spec.matches)
        if (gm.in_component == component) return gm;
    throw ClosureError("component " + component_name(component) + " is not in the matching");
}

FlowClass classify_flow(const AssembledManifold& m, const GluingSpec& spec) {
    auto val = validate_gluing(m, spec);
    if (!val.pass) {
        std::string msg = "gluing spec rejected:";
        for (const auto& f : val.failures) msg += "\n  - " + f;
        throw ClosureError(msg);
    }

    FlowClass fc;
    bool any_one = false, all_two = true;
    for (const auto& vo : m.vertical_orbits) {
        if (vo.p == 1) any_one = true;
        if (vo.p != 2) {
            all_two = false;
            fc.singular.push_back(vo);
        }
    }
    fc.kind = any_one    ? FlowKind::one_prong
              : all_two ? FlowKind::anosov
                        : FlowKind::pseudo_anosov;

    // circle blueprint: connected, every vertex of valence 2
    bool circle = !m.bp.vertices.empty();
    for (std::size_t v = 0; v < m.bp.vertices.size() && circle; ++v)
        if (m.bp.valence(static_cast<int>(v)) != 2) circle = false;
    if (circle) {
        std::vector<int> root(m.bp.vertices.size());
        for (std::size_t i = 0; i < root.size(); ++i) root[i] = static_cast<int>(i);
        std::function<int(int)> find = [&](int x) {
            return root[x] == x ? x : root[x] = find(root[x]);
        };
        for (const auto& e : m.bp.edges)
            root[find(m.bp.half_edges[e.he[0]].vertex)] = find(m.bp.half_edges[e.he[1]].vertex);
        for (std::size_t v = 0; v < root.size() && circle; ++v)
            if (find(static_cast<int>(v)) != find(0)) circle = false;
    }
    if (circle) fc.note = "closed manifold is a torus bundle over the circle";
    return fc;
}

SurgeryRecord surgery_record(const AssembledManifold& m, const std::string& vertex_name,
                             long long p, long long q) {
    SurgeryRecord sr;
    sr.vertex_name = vertex_name;
    sr.vertex = resolve_vertex(m, vertex_name, 0);
    sr.p = p;
    sr.q = q;
    if (std::gcd(p, q) != 1)
        throw ClosureError("surgery meridian " + std::to_string(p) + "," + std::to_string(q) +
                           " is not coprime");
    if (p == 0)
        throw ClosureError("surgery meridian equals the longitude of the vertical orbit");
    return sr;
}

}  // namespace paflow
