#pragma once

#include "paflow/assembly.hpp"

namespace paflow {

struct ClosureError : std::runtime_error {
    explicit ClosureError(const std::string& msg) : std::runtime_error(msg) {}
};

// Component naming for gluing files: "c<i>" where i is the cycle index
// (cycles are canonically ordered by smallest contained side id).
std::string component_name(int cycle);

// One `match` line: transverse gluing of an outgoing torus onto an incoming
// one, linear in the lattice bases ((k pi, 0), (0, 1)) with L = [[a,b],[c,d]]
// plus a real translation (s in radians, t in turns).
struct GluingMatch {
    std::string out_name, in_name;
    int out_component = -1, in_component = -1;  // resolved cycle indices
    long long a = 1, b = 0, c = 0, d = 1;
    double s = 0, t = 0;
};

struct SurgeryRecord {
    std::string vertex_name;
    int vertex = -1;
    long long p = 1, q = 0;  // meridian in the (meridian_0, longitude) basis
};

struct GluingSpec {
    std::vector<GluingMatch> matches;
    std::vector<SurgeryRecord> surgeries;
};

// Grammar: `match <out> <in> L=a,b,c,d shift=s,t` (shift optional, 0,0),
//          `surgery <vertex> m=p,q`, '#' comments. Unknown names throw.
GluingSpec parse_gluing(const std::string& text, const AssembledManifold& m);

struct GluingValidation {
    bool pass = false;
    std::vector<std::string> failures;
};

GluingValidation validate_gluing(const AssembledManifold& m, const GluingSpec& spec);

// A and A^{-1} on universal-cover coordinates, reduced to the fundamental
// domain [0, k pi) x [0, 1) of the target torus.
GlobalPoint apply_gluing(const AssembledManifold& m, const GluingMatch& match, GlobalPoint p);
GlobalPoint apply_gluing_inverse(const AssembledManifold& m, const GluingMatch& match,
                                 GlobalPoint p);

// locate the match a component participates in (by cycle index); throws when
// the component is not in the matching
const GluingMatch& match_of_outgoing(const GluingSpec& spec, int component);
const GluingMatch& match_of_incoming(const GluingSpec& spec, int component);

enum class FlowKind { anosov, pseudo_anosov, one_prong };

inline const char* to_string(FlowKind k) {
    switch (k) {
        case FlowKind::anosov: return "Anosov";
        case FlowKind::pseudo_anosov: return "pseudo-Anosov";
        default: return "one-prong pseudo-Anosov";
    }
}

struct FlowClass {
    FlowKind kind = FlowKind::anosov;
    std::vector<VerticalOrbit> singular;  // all orbits with p != 2
    std::string note;                     // set for circle blueprints
};

// Requires a passing validation (throws ClosureError otherwise).
FlowClass classify_flow(const AssembledManifold& m, const GluingSpec& spec);

// Standalone surgery bookkeeping; throws on non-coprime meridian or the
// longitude class (0, +-1).
SurgeryRecord surgery_record(const AssembledManifold& m, const std::string& vertex_name,
                             long long p, long long q);

}  // namespace paflow
