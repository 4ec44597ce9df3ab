#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace paflow {

struct TreeError : std::runtime_error {
    explicit TreeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Reference to a point of the unrolled tree: base point index plus the cell
// (period index) it lives in. Aperiodic presentations only use cell 0.
struct PointRef {
    int base = -1;
    long long cell = 0;

    bool operator==(const PointRef& o) const { return base == o.base && cell == o.cell; }
};

struct TreeSegment {
    std::string id;
    std::vector<PointRef> points;  // cells are offsets relative to the cell stamped
};

// Witness that a and b are non-separated: they close off the same prong,
// presented as the shared segment sigma with both tips attached at one end.
struct NonsepWitness {
    PointRef a, b;
    int via_segment = -1;
};

// Finite presentation of a non-Hausdorff tree. Periodic presentations
// describe one cell of a Z-cover: point references may carry +k/-k cell
// offsets and the `periodic shift` directive names the deck generator.
struct NHTree {
    std::vector<std::string> points;
    std::vector<TreeSegment> segments;
    std::vector<NonsepWitness> witnesses;
    bool periodic = false;
    std::vector<int> shift_map;  // deck generator on base points (offset +1)

    int point_index(const std::string& id) const;
};

// Parse + mandatory validation (segment overlap consistency, witness shape,
// separation axiom). Invalid presentations never construct.
NHTree parse_tree(const std::string& text);

// Radius-R instantiation of the unrolling: cells -R..R, dropping segments and
// witnesses that reach outside. Aperiodic trees always get the single cell.
// Points near the window boundary lose structure; callers pick R generously.
struct TreeWindow {
    NHTree tree;
    long long radius = 0;
    std::vector<PointRef> pts;
    std::vector<std::string> labels;              // "id" or "id@cell"
    std::vector<std::vector<int>> adj;            // segment adjacency (pure)
    std::vector<std::array<int, 2>> wires;        // witness tip pairs
    std::vector<int> wire_merge_at;               // sigma end point per wire
    std::vector<std::vector<int>> seg_instances;  // ordered window point indices
    std::vector<int> seg_instance_base;           // originating base segment

    int index_of(const PointRef& p) const;      // -1 when outside the window
    int find(const std::string& label) const;   // by label, -1 when absent
};

TreeWindow make_window(const NHTree& tree, long long radius);

// Connected components of the window minus one point, witness pairs staying
// wired together; their number is the prong count at that point.
struct ComponentsResult {
    std::vector<std::vector<int>> components;
    int prongs = 0;
};
ComponentsResult components_minus_point(const TreeWindow& w, int point);

// The closed block [x, y]: x, y plus every point separating them, split into
// maximal closed segments; consecutive segments meet at a non-separated pair
// and d(x, y) = number of segments - 1.
struct BlockResult {
    std::vector<std::vector<int>> segments;
    int d = 0;
};
BlockResult block(const TreeWindow& w, int x, int y);

// gamma(p@i) = base_map[p]@(i+offset); offset 0 for aperiodic trees.
struct TreeAutomorphism {
    std::vector<int> base_map;
    long long offset = 0;
};

// Format: `offset <n>` once, then `map <a> > <b>` per base point.
TreeAutomorphism parse_automorphism(const std::string& text, const NHTree& tree);

// Exhaustive structure check on the window: bijection, segments carried to
// segments (up to reversal), witness pairs carried to witness pairs.
void validate_automorphism(const TreeWindow& w, const TreeAutomorphism& g);

TreeAutomorphism inverse(const TreeAutomorphism& g);

// Image window index of point under g^power, -1 when it leaves the window.
int apply(const TreeWindow& w, const TreeAutomorphism& g, int point, int power = 1);

struct FixSets {
    std::vector<int> fix;         // gamma(x) = x
    std::vector<int> fix_approx;  // gamma(x) = x or a witnessed gamma(x) ~ x
};
FixSets fix_sets(const TreeWindow& w, const TreeAutomorphism& g);

// Fundamental axis {x : gamma(x) in [x, gamma^2(x)]} over the window, with
// the checkable properties evaluated alongside. Points whose short orbit
// leaves the window are reported undecidable rather than guessed.
struct AxisResult {
    std::vector<int> points;
    std::vector<int> undecidable;
    bool inconclusive = false;     // nothing certified inside this window
    bool matches_inverse = false;  // axis of gamma^-1 agrees where decidable
    bool gamma_invariant = false;
    bool union_formula_ok = false;  // blocks [gamma^i x, gamma^{i+1} x] stay inside
};
AxisResult axis(const TreeWindow& w, const TreeAutomorphism& g);

}  // namespace paflow
