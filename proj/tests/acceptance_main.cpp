// Acceptance gate: twelve end-to-end checks, one [PASS]/[FAIL] line each,
// nonzero exit when anything fails. Usage:
//     acceptance [path-to-cli] [data-dir]
// (defaults ./paflow and ../data for in-tree runs).

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "paflow/assembly.hpp"
#include "paflow/block_flow.hpp"
#include "paflow/closure.hpp"
#include "paflow/lozenge.hpp"
#include "paflow/nhtree.hpp"
#include "paflow/return_map.hpp"
#include "paflow/rng.hpp"
#include "paflow/skew.hpp"

namespace fs = std::filesystem;
using namespace paflow;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2 * kPi;

std::string g_cli = "./paflow";
std::string g_data = "../data";

// ---- tiny check harness ----------------------------------------------------

struct Checker {
    bool ok = true;
    std::string why;

    void require(bool cond, const std::string& msg) {
        if (!cond && ok) {
            ok = false;
            why = msg;
        }
    }
    void close_to(double got, double want, double tol, const std::string& what) {
        std::ostringstream ss;
        ss << what << ": got " << got << ", want " << want << " (tol " << tol << ")";
        require(std::fabs(got - want) <= tol, ss.str());
    }
};

int g_failures = 0;

void criterion(int n, const std::string& name, double budget_s,
               const std::function<void(Checker&)>& body) {
    Checker c;
    auto t0 = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.require(false, std::string("exception: ") + e.what());
    }
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budget_s > 0 && dt > budget_s) {
        std::ostringstream ss;
        ss << "took " << dt << "s, budget " << budget_s << "s";
        c.require(false, ss.str());
    }
    std::ostringstream line;
    line << (c.ok ? "[PASS]" : "[FAIL]") << " " << n << ". " << name;
    line.setf(std::ios::fixed);
    line.precision(2);
    line << " (" << dt << "s)";
    if (!c.ok) line << "\n       " << c.why;
    std::cout << line.str() << "\n";
    if (!c.ok) ++g_failures;
}

// ---- shared fixtures ---------------------------------------------------------

std::string circle_text(int k) {
    std::ostringstream out;
    for (int i = 0; i < k; ++i)
        out << "vertex v" << i << ": p" << i << " q" << i << "\n";
    for (int i = 0; i < k; ++i)
        out << "edge e" << i << ": q" << i << " p" << (i + 1) % k << "\n";
    return out.str();
}

const char* kFig8Twisted =
    "vertex v0: a0 b0 a1 b1\n"
    "edge a: a0 a1 twist\n"
    "edge b: b0 b1 twist\n";

const char* kValence6 =
    "vertex v0: h0 h1 h2 h3 h4 h5\n"
    "vertex v1: h6 h7 h8 h9 h10 h11\n"
    "edge e0: h0 h2 twist\n"
    "edge e1: h1 h3 twist\n"
    "edge e2: h4 h6\n"
    "edge e3: h5 h7\n"
    "edge e4: h8 h10 twist\n"
    "edge e5: h9 h11 twist\n";

const char* kLadderTree = R"(
point x
point g
point y
point c
point d
segment rung: x g y
segment prong: c d
segment army: c d y
segment armx: c d x+1
nonsep y x+1 via prong
periodic shift: x>x+1 g>g+1 y>y+1 c>c+1 d>d+1
)";

AssembledManifold assemble_text(const std::string& text) {
    auto tb = load_blueprint(text);
    return assemble(tb.bp, tb.boundary);
}

GluingSpec circle2_spec(const AssembledManifold& m) {
    return parse_gluing("match c1 c0 L=1,1,1,2 shift=0,0\n", m);
}

bool mentions(const GluingValidation& v, const std::string& needle) {
    for (const auto& f : v.failures)
        if (f.find(needle) != std::string::npos) return true;
    return false;
}

double wrapped_diff(double a, double b, double period) { return std::remainder(a - b, period); }

TPoint generic_point(const AssembledManifold& m, const GluingSpec& spec, int component,
                     Rng& rng) {
    const auto& gm = match_of_outgoing(spec, component);
    double period = m.components[component].k * kPi;
    for (;;) {
        GlobalPoint p{rng.uniform(0, period), rng.uniform()};
        if (std::fabs(std::remainder(p.u, kPi)) < 5e-3) continue;
        GlobalPoint q = apply_gluing(m, gm, p);
        if (std::fabs(std::remainder(q.u, kPi)) < 5e-3) continue;
        return {component, p};
    }
}

int patch_degree(const FatTreePatch& patch, int pv) {
    int d = 0;
    for (int e : patch.vertices[pv].slot_edge) d += e >= 0;
    return d;
}

std::vector<int> bfs_distances(const TreeWindow& w, int from) {
    std::vector<int> dist(w.pts.size(), -1);
    std::queue<int> q;
    q.push(from);
    dist[from] = 0;
    while (!q.empty()) {
        int p = q.front();
        q.pop();
        for (int r : w.adj[p])
            if (dist[r] < 0) {
                dist[r] = dist[p] + 1;
                q.push(r);
            }
    }
    return dist;
}

TreeAutomorphism identity_shift(const NHTree& tree, long long offset) {
    TreeAutomorphism g;
    g.base_map.resize(tree.points.size());
    for (std::size_t p = 0; p < tree.points.size(); ++p) g.base_map[p] = static_cast<int>(p);
    g.offset = offset;
    return g;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// run the CLI, capture stdout, return the exit status (-1 on launch trouble)
int run_cli(const std::string& args, const fs::path& capture) {
    std::string cmd = g_cli + " " + args + " > " + capture.string() + " 2>&1";
    int rc = std::system(cmd.c_str());
    if (rc == -1) return -1;
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

// ---- the twelve criteria -----------------------------------------------------

void c1_block_closed_forms(Checker& c) {
    Rng rng(42);
    for (double lambda : {1.0, 5.0})
        for (int i = 0; i < 50; ++i) {
            double x = -1.4 + 2.8 * i / 49.0;
            BlockPoint p0{x, rng.uniform(), -kPi / 2};
            auto tr = integrate_orbit(p0, lambda, 1e-3);
            c.require(tr.outcome == OrbitOutcome::exited, "orbit failed to exit");
            c.close_to(tr.exit_time, transit_time(x), 1e-6, "transit time");
            auto f = exit_map(x, p0.y, lambda);
            c.require(circle_dist(tr.exit.y, f.y) <= 1e-6, "exit y off the landing map");
            c.require(tr.exit.x == x, "x drifted through the block");
        }
}

void c2_shear_bound(Checker& c) {
    for (double lambda : {0.5, 1.0, 5.0, 20.0}) {
        c.require(exit_shear(0, lambda) == 0, "a(0) != 0");
        for (int i = -40; i <= 40; ++i) {
            double x = i * (kPi / 2 - 1e-3) / 40;
            c.require(exit_shear_deriv(x, lambda) >= lambda * kPi / 2 - 1e-9,
                      "a'(x) under the shear floor");
        }
        for (int i = 1; i <= 50; ++i) {
            double x = 1.4 * i / 50.0;
            c.require(std::fabs(exit_shear(x, lambda) + exit_shear(-x, lambda)) <= 1e-12,
                      "a(-x) != -a(x)");
        }
    }
}

void c3_symmetries(Checker& c) {
    auto rep = check_symmetries(2.0, 100, 1234);
    c.require(rep.rotation == 0, "y-rotation invariance not exact");
    c.require(rep.flip <= 1e-12, "flip equivariance residual above 1e-12");
    c.require(rep.exit_flip <= 1e-12, "exit-map flip residual above 1e-12");
}

void c4_assembly_parity(Checker& c) {
    for (int k = 1; k <= 6; ++k) {
        auto m = assemble_text(circle_text(k));
        for (const auto& comp : m.components) {
            c.require(comp.k == k, "wrong block count in a component");
            c.require(comp.torus == (k % 2 == 0), "torus parity wrong at k=" + std::to_string(k));
        }
        c.require(m.orientable == (k % 2 == 0), "orientability parity wrong");

        // composing the k seam y-flips around the cycle is the identity iff k even
        double y = 0.3;
        for (int j = 0; j < k; ++j) y = wrap01(-y);
        c.require((circle_dist(y, 0.3) <= 1e-15) == (k % 2 == 0),
                  "seam-flip composition parity wrong at k=" + std::to_string(k));
    }

    // the two charts at a seam are identified by the y-flip
    auto m2 = assemble_text(circle_text(2));
    auto s = global_to_chart(m2.components[0], kPi, 0.2);
    c.require(s.on_seam && s.secondary.has_value(), "seam point not resolved to both charts");
    if (s.secondary)
        c.require(circle_dist(s.primary.y, wrap01(-s.secondary->y)) <= 1e-15,
                  "seam charts not identified by the y-flip");
}

void c5_closure_gate(Checker& c) {
    auto m = assemble_text(circle_text(2));

    auto good = validate_gluing(m, circle2_spec(m));
    c.require(good.pass, "valid closure rejected");

    auto vb = validate_gluing(m, parse_gluing("match c1 c0 L=1,0,5,1\n", m));
    c.require(!vb.pass && mentions(vb, "b = 0"), "b = 0 not rejected with its reason");

    auto vd = validate_gluing(m, parse_gluing("match c1 c0 L=2,1,2,2\n", m));
    c.require(!vd.pass && mentions(vd, "det"), "det != +-1 not rejected with its reason");

    auto m3 = assemble_text(circle_text(3));
    auto vk = validate_gluing(m3, GluingSpec{});
    c.require(!vk.pass && mentions(vk, "Klein bottle"), "Klein bottle not rejected");
}

void c6_classification(Checker& c) {
    for (int k : {2, 4}) {
        auto m = assemble_text(circle_text(k));
        auto fc = classify_flow(m, circle2_spec(m));
        c.require(fc.kind == FlowKind::one_prong, "circle flow not one-prong");
        c.require(static_cast<int>(fc.singular.size()) == k, "wrong one-prong orbit count");
        for (const auto& vo : fc.singular)
            c.require(vo.p == 1, "circle singular orbit not one-prong");
        c.require(fc.note.find("torus bundle") != std::string::npos, "missing bundle note");
    }

    auto m8 = assemble_text(kFig8Twisted);
    auto fc8 = classify_flow(m8, parse_gluing("match c1 c0 L=1,1,1,2\n", m8));
    c.require(fc8.kind == FlowKind::anosov && fc8.singular.empty(),
              "all-valence-4 flow not Anosov");

    auto m6 = assemble_text(kValence6);
    auto fc6 = classify_flow(m6, parse_gluing("match c1 c2 L=1,1,1,2\nmatch c3 c0 L=1,1,1,2\n", m6));
    c.require(fc6.kind == FlowKind::pseudo_anosov, "valence-6 flow not pseudo-Anosov");
    c.require(!fc6.singular.empty(), "valence-6 flow lost its singular orbits");
    for (const auto& vo : fc6.singular)
        c.require(vo.p == 3, "valence-6 singular orbit not 3-prong");
}

void c7_cone_certificate(Checker& c) {
    auto m = assemble_text(circle_text(2));
    auto spec = circle2_spec(m);

    auto l0 = estimate_lambda0(m, spec, 0.2);
    auto again = estimate_lambda0(m, spec, 0.2);
    c.require(l0.certifiable && again.certifiable, "bisection failed to certify");
    c.require(std::fabs(again.lambda0 - l0.lambda0) <= 0.01 * l0.lambda0,
              "bisection not reproducible to 1%");

    auto above = verify_cones(make_system(m, spec, 1.1 * l0.lambda0, 0.2), 200);
    c.require(above.contained && above.margin > 0, "no strict containment above lambda0");
    c.require(above.min_expansion >= 2, "expansion below 2 above lambda0");
    c.require(above.pass, "certificate fails above lambda0");
    auto below = verify_cones(make_system(m, spec, 0.9 * l0.lambda0, 0.2), 200);
    c.require(!below.pass, "certificate passes below 0.9 lambda0");

    // Jacobians against central finite differences at seeded generic points
    auto sys = make_system(m, spec, 1.0, 0.2);
    Rng rng(17);
    const double h = 1e-6;
    double period = m.components[1].k * kPi;
    auto eval = [&](double u, double v) {
        auto res = return_step(sys, {1, {u, v}});
        c.require(!res.terminated, "finite-difference probe hit the stable set");
        return res.out.p;
    };
    for (int trial = 0; trial < 20; ++trial) {
        TPoint p = generic_point(m, sys.spec, 1, rng);
        auto jr = return_jacobian(sys, p);
        c.require(!jr.near_singular, "seeded probe point flagged near-singular");

        GlobalPoint up = eval(p.p.u + h, p.p.v), um = eval(p.p.u - h, p.p.v);
        GlobalPoint vp = eval(p.p.u, p.p.v + h), vm = eval(p.p.u, p.p.v - h);
        Mat2 fd_uv{wrapped_diff(up.u, um.u, period) / (2 * h),
                   wrapped_diff(vp.u, vm.u, period) / (2 * h),
                   wrapped_diff(up.v, um.v, 1.0) / (2 * h),
                   wrapped_diff(vp.v, vm.v, 1.0) / (2 * h)};
        Mat2 fd{fd_uv.a, fd_uv.b / kTwoPi, kTwoPi * fd_uv.c, fd_uv.d};
        for (auto [got, want] : {std::pair{fd.a, jr.J.a},
                                 {fd.b, jr.J.b},
                                 {fd.c, jr.J.c},
                                 {fd.d, jr.J.d}})
            c.require(std::fabs(got - want) <= 1e-5 * std::max(1.0, std::fabs(want)),
                      "Jacobian disagrees with central differences past 1e-5");
    }
}

void c8_stable_curves(Checker& c) {
    auto m = assemble_text(circle_text(2));
    auto sys = make_system(m, circle2_spec(m), 1.0, 0.2);
    c.require(verify_cones(sys, 200).pass, "reference shear is not certified");

    auto fams = stable_curves(sys, 4);
    c.require(fams.size() == 5, "missing generations");
    for (const auto& fam : fams) {
        c.require(fam.all_graphs, "a generation stopped being a graph");
        c.require(!fam.pieces.empty(), "a generation came back empty");
        c.require(fam.max_slope < 1.0 / sys.kappa, "curve tangent entered the horizontal cone");
        for (const auto& piece : fam.pieces) {
            c.require(piece.pts.size() >= 2, "degenerate curve piece");
            for (size_t i = 1; i < piece.pts.size(); ++i)
                c.require(piece.pts[i].u > piece.pts[i - 1].u, "piece not a graph over u");
        }
    }

    auto dens = density_probe(sys, 0.1, 4, 4000);
    c.require(dens.fraction.size() == 5, "density probe lost generations");
    for (size_t i = 1; i < dens.fraction.size(); ++i)
        c.require(dens.fraction[i] >= dens.fraction[i - 1], "density fraction decreased");
}

void c9_skew(Checker& c) {
    Rng rng(20260815);
    auto random_orbit = [&rng]() {
        Rational d(static_cast<long long>(rng.index(19)) - 9,
                   1 + static_cast<long long>(rng.index(6)));
        Rational gap(1 + static_cast<long long>(rng.index(5)),
                     6 + static_cast<long long>(rng.index(5)));
        return make_skew_orbit(d, d + gap);
    };

    int connected_pairs = 0;
    for (int trial = 0; trial < 40; ++trial) {
        SkewOrbit a = random_orbit();

        for (int n = -3; n <= 3; ++n) {
            auto closed = skew_chain_connected(a, {a.d + n, a.c + n});
            c.require(closed.verdict == SkewVerdict::connected_even,
                      "diagonal shift pair not connected-even");
            c.require(closed.length == 2 * std::abs(n), "even chain length is not 2|n|");
        }

        std::vector<SkewOrbit> targets;
        for (int n = -3; n <= 3; ++n) targets.push_back({a.d + n, a.c + n});
        SkewOrbit f = a;
        for (int j = 0; j < 7; ++j) {
            f = skew_partner(f);
            if (j % 2 == 0) targets.push_back(f);
        }
        SkewOrbit g = a;
        for (int j = 0; j < 5; ++j) {
            g = skew_partner_inverse(g);
            targets.push_back(g);
        }
        targets.push_back(random_orbit());

        for (const SkewOrbit& b : targets) {
            auto closed = skew_chain_connected(a, b);
            int oracle = skew_chain_bfs(a, b);
            if (closed.verdict == SkewVerdict::not_connected || closed.length > 12) {
                c.require(oracle == -1, "oracle reached a pair the closed form rejects");
                continue;
            }
            ++connected_pairs;
            c.require(oracle == closed.length, "oracle and closed-form length disagree");
            c.require((closed.length % 2 == 0) == (closed.verdict == SkewVerdict::connected_even),
                      "verdict parity disagrees with the length");
        }
    }
    c.require(connected_pairs >= 40 * 13, "constructed partners went missing");
}

void c10_fat_tree(Checker& c) {
    // circle blueprint unfolds to a line
    auto line = build_fat_tree(load_blueprint(circle_text(2)).bp, 3);
    c.require(line.vertices.size() == 7 && line.edges.size() == 6, "circle patch is not a line");
    std::map<int, int> by_degree;
    for (size_t i = 0; i < line.vertices.size(); ++i) ++by_degree[patch_degree(line, i)];
    c.require(by_degree[1] == 2 && by_degree[2] == 5, "circle patch degrees are not a line's");

    // adjacency flags follow the cyclic order at the shared corner
    auto patch = build_fat_tree(load_blueprint(kFig8Twisted).bp, 2);
    std::vector<int> child(4, -1);
    for (int s = 0; s < 4; ++s) {
        int e = patch.vertices[0].slot_edge[s];
        c.require(e >= 0, "root slot not filled in the patch");
        child[s] = patch.edges[e].v[1];
    }
    auto c02 = chain_along_path(patch, {child[0], 0, child[2]});
    c.require(!c02.lozenges[1].adjacent_to_previous, "opposite slots flagged adjacent");
    auto c01 = chain_along_path(patch, {child[0], 0, child[1]});
    auto c12 = chain_along_path(patch, {child[1], 0, child[2]});
    auto c30 = chain_along_path(patch, {child[3], 0, child[0]});
    c.require(c01.lozenges[1].adjacent_to_previous && c12.lozenges[1].adjacent_to_previous &&
                  c30.lozenges[1].adjacent_to_previous,
              "consecutive slots not flagged adjacent");
    c.require(c01.lozenges[1].shared == patch.sector_type[0][0] &&
                  c12.lozenges[1].shared == patch.sector_type[0][1] &&
                  c01.lozenges[1].shared != c12.lozenges[1].shared,
              "shared side types do not mirror the sectors");

    // strings and scalloped chains exclude each other on random chains
    Rng rng(20260815);
    int scalloped_seen = 0, string_seen = 0;
    for (int trial = 0; trial < 100; ++trial) {
        LozengeChain chain;
        int len = 2 + static_cast<int>(rng.index(5));
        bool all_regular = rng.index(2) == 0;
        int adjacency_bias = 1 + static_cast<int>(rng.index(3));
        auto prong = [&] { return all_regular ? 2 : 1 + static_cast<int>(rng.index(3)); };
        int shared_corner = prong();
        for (int i = 0; i < len; ++i) {
            Lozenge lz;
            lz.corner1 = {i, shared_corner};
            shared_corner = prong();
            lz.corner2 = {i + 1, shared_corner};
            if (i > 0 && static_cast<int>(rng.index(4)) < adjacency_bias) {
                lz.adjacent_to_previous = true;
                lz.shared = rng.index(2) ? SideType::unstable : SideType::stable;
            }
            chain.lozenges.push_back(lz);
        }
        bool str = is_string(chain);
        ScallopClass sc = is_scalloped(chain);
        c.require(!(str && sc != ScallopClass::neither), "a chain was both string and scalloped");
        scalloped_seen += sc != ScallopClass::neither;
        string_seen += str;
    }
    c.require(scalloped_seen > 0 && string_seen > 0, "random chains never hit both verdicts");
}

void c11_nhtree(Checker& c) {
    // three invalid presentations, each rejected for its own reason
    auto rejects = [&c](const std::string& text, const std::string& needle,
                        const std::string& what) {
        try {
            parse_tree(text);
            c.require(false, what + " was accepted");
        } catch (const TreeError& e) {
            c.require(std::string(e.what()).find(needle) != std::string::npos,
                      what + " rejected for the wrong reason: " + e.what());
        }
    };
    rejects("point a\npoint b\npoint c\nsegment long: a b c\nsegment chord: a c\n",
            "overlap inconsistently", "inconsistent overlap");
    rejects("point a\npoint b\npoint c\npoint d\n"
            "segment s1: a b c\nsegment s2: c d\nsegment s3: d a\n",
            "separation axiom", "a cycle");
    rejects("point a\npoint b\npoint c\n"
            "segment s1: a b c\nnonsep a c via s1\n",
            "lies on the shared prong", "a witness tip on its own prong");

    // ladder: the block between opposite rung ends crosses one gap
    NHTree ladder = parse_tree(kLadderTree);
    TreeWindow w = make_window(ladder, 3);
    auto blk = block(w, w.find("x@0"), w.find("y@1"));
    c.require(blk.segments.size() == 2, "ladder block is not two maximal segments");
    c.require(blk.d == 1, "ladder block does not cross exactly one gap");

    // the rung-shift axis is exactly the rung union inside the window
    TreeAutomorphism rung_shift = identity_shift(ladder, 1);
    validate_automorphism(w, rung_shift);
    AxisResult ax = axis(w, rung_shift);
    c.require(!ax.inconclusive, "rung-shift axis inconclusive");
    c.require(ax.matches_inverse, "rung-shift axis differs from the inverse's axis");
    c.require(ax.gamma_invariant && ax.union_formula_ok, "rung-shift axis lost an invariant");
    std::set<std::string> got;
    for (int p : ax.points) got.insert(w.labels[p]);
    for (long long cell = -1; cell <= 1; ++cell)
        for (const char* base : {"x", "g", "y"}) {
            std::string want = std::string(base) + "@" + std::to_string(cell);
            c.require(got.count(want) == 1, "axis missing rung point " + want);
        }
    for (const auto& label : got)
        c.require(label[0] == 'x' || label[0] == 'g' || label[0] == 'y',
                  "axis contains the tail point " + label);

    // classical translation-axis oracle on random periodic simplicial trees
    for (unsigned seed = 1; seed <= 5; ++seed) {
        Rng rng{seed};
        int extras = 4 + static_cast<int>(rng.index(12));
        std::ostringstream text;
        text << "point n0\n";
        for (int i = 1; i <= extras; ++i) text << "point n" << i << "\n";
        text << "segment sp: n0 n0+1\n";
        for (int i = 1; i <= extras; ++i) {
            int parent = static_cast<int>(rng.index(static_cast<unsigned>(i)));
            text << "segment t" << i << ": n" << parent << " n" << i << "\n";
        }
        text << "periodic shift:";
        for (int i = 0; i <= extras; ++i) text << " n" << i << ">n" << i << "+1";
        text << "\n";

        NHTree tree = parse_tree(text.str());
        TreeWindow tw = make_window(tree, 4);
        TreeAutomorphism g = identity_shift(tree, 1);
        validate_automorphism(tw, g);
        AxisResult tax = axis(tw, g);
        c.require(tax.matches_inverse, "random tree: axis differs from the inverse's axis");
        c.require(!tax.inconclusive && tax.gamma_invariant && tax.union_formula_ok,
                  "random tree: axis invariants failed");

        int min_disp = -1;
        std::map<int, int> disp;
        for (int p = 0; p < static_cast<int>(tw.pts.size()); ++p) {
            if (std::llabs(tw.pts[p].cell) > 1) continue;
            int q = apply(tw, g, p);
            if (q < 0) continue;
            int d = bfs_distances(tw, p)[q];
            c.require(d > 0, "random tree: shift fixed a point");
            disp[p] = d;
            if (min_disp < 0 || d < min_disp) min_disp = d;
        }
        c.require(min_disp == 1, "random tree: spine does not realize displacement 1");
        std::set<int> oracle, mine;
        for (const auto& [p, d] : disp)
            if (d == min_disp) oracle.insert(p);
        for (int p : tax.points)
            if (std::llabs(tw.pts[p].cell) <= 1) mine.insert(p);
        c.require(oracle == mine, "axis disagrees with the min-displacement oracle");
    }
}

void c12_cli_determinism(Checker& c) {
    fs::path tmp = fs::temp_directory_path() / "paflow_acceptance";
    fs::remove_all(tmp);
    fs::create_directories(tmp);

    struct Job {
        std::string args;
        std::vector<std::string> artifacts;  // files under the shared --out dir
    };
    fs::path out = tmp / "out";
    std::vector<Job> jobs = {
        {"validate " + g_data + "/circle2.bp", {}},
        {"assemble " + g_data + "/circle2.bp", {}},
        {"classify " + g_data + "/circle2.bp " + g_data + "/circle2.glue", {}},
        {"cones " + g_data + "/circle2.bp " + g_data + "/circle2.glue --lambda 50 --kappa 0.2" +
             " --grid 60 --out " + out.string(),
         {"cones.csv"}},
        {"lambda0 " + g_data + "/circle2.bp " + g_data + "/circle2.glue --kappa 0.2", {}},
        {"curves " + g_data + "/circle2.bp " + g_data + "/circle2.glue --lambda 1 --gen 3" +
             " --out " + out.string(),
         {"curves.csv"}},
        {"orbit --lambda 5 --seed 9 --out " + out.string(), {"orbit.csv"}},
        {"fattree " + g_data + "/circle2.bp --radius 3", {}},
        {"skew 0 1/2 2 5/2", {}},
        {"nhtree " + g_data + "/ladder.tree " + g_data + "/ladder_rung_shift.auto --radius 3",
         {}},
    };

    int idx = 0;
    for (const auto& job : jobs) {
        fs::path cap1 = tmp / ("run" + std::to_string(idx) + "_a.txt");
        fs::path cap2 = tmp / ("run" + std::to_string(idx) + "_b.txt");
        ++idx;

        int rc1 = run_cli(job.args, cap1);
        std::map<std::string, std::string> first;
        for (const auto& name : job.artifacts) first[name] = slurp(out / name);
        int rc2 = run_cli(job.args, cap2);

        c.require(rc1 == 0 && rc2 == 0, "'" + job.args + "' exited nonzero");
        c.require(slurp(cap1) == slurp(cap2), "'" + job.args + "' reports differ across runs");
        for (const auto& name : job.artifacts)
            c.require(first[name] == slurp(out / name),
                      "'" + job.args + "' artifact " + name + " differs across runs");
        c.require(!slurp(cap1).empty(), "'" + job.args + "' produced no report");
    }
}

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) g_cli = argv[1];
    if (argc > 2) g_data = argv[2];

    criterion(1, "block transit and landing match the closed forms", 10, c1_block_closed_forms);
    criterion(2, "shear derivative floor, pinned zero, oddness", 0, c2_shear_bound);
    criterion(3, "rotation invariance exact, flip residual below 1e-12", 0, c3_symmetries);
    criterion(4, "component parity and seam-flip composition", 0, c4_assembly_parity);
    criterion(5, "closure gate itemizes b=0, det, Klein bottle", 0, c5_closure_gate);
    criterion(6, "classification across the example blueprints", 0, c6_classification);
    criterion(7, "cone certificate, bisection, Jacobian differences", 60, c7_cone_certificate);
    criterion(8, "stable curves stay graphs, density nondecreasing", 0, c8_stable_curves);
    criterion(9, "skew chains: closed form versus breadth-first oracle", 5, c9_skew);
    criterion(10, "fat-tree patches and chain classification", 0, c10_fat_tree);
    criterion(11, "non-Hausdorff tree validation, blocks, axes", 0, c11_nhtree);
    criterion(12, "command-line reports are byte-identical across runs", 0, c12_cli_determinism);

    if (g_failures == 0) {
        std::cout << "all 12 criteria passed\n";
        return 0;
    }
    std::cout << g_failures << " criteria failed\n";
    return 1;
}
