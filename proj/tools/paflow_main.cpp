#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "paflow/block_flow.hpp"
#include "paflow/closure.hpp"
#include "paflow/lozenge.hpp"
#include "paflow/nhtree.hpp"
#include "paflow/report.hpp"
#include "paflow/return_map.hpp"
#include "paflow/rng.hpp"
#include "paflow/skew.hpp"

namespace fs = std::filesystem;
using namespace paflow;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Files written under --out; every path lands in the report.
struct Outputs {
    std::string dir;
    std::vector<std::string> files;

    bool enabled() const { return !dir.empty(); }
    void write(const std::string& name, const std::string& content) {
        fs::create_directories(dir);
        fs::path p = fs::path(dir) / name;
        std::ofstream out(p, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
        out << content;
        files.push_back(p.generic_string());
    }
};

int finish(Report& rep, const Outputs& outs, bool pass) {
    for (const auto& f : outs.files) rep.put("output", f);
    rep.put("status", pass ? std::string("pass") : std::string("fail"));
    std::cout << rep.str();
    return pass ? 0 : 1;
}

Rational parse_rational(const std::string& tok) {
    auto slash = tok.find('/');
    try {
        if (slash == std::string::npos) return Rational(std::stoll(tok));
        return Rational(std::stoll(tok.substr(0, slash)), std::stoll(tok.substr(slash + 1)));
    } catch (const std::exception&) {
        throw std::runtime_error("malformed rational '" + tok + "' (want p or p/q)");
    }
}

std::string classification_sentence(const FlowClass& fc) {
    std::string s = to_string(fc.kind);
    std::map<int, int> by_p;
    for (const auto& o : fc.singular) ++by_p[o.p];
    if (by_p.empty()) {
        s += ", no singular orbits";
    } else {
        for (const auto& [p, n] : by_p) {
            s += ", " + std::to_string(n) + " ";
            s += p == 1 ? "one-prong" : std::to_string(p) + "-prong";
            s += n > 1 ? " orbits" : " orbit";
        }
    }
    if (!fc.note.empty()) s += ", torus bundle";
    return s;
}

std::string join_labels(const TreeWindow& w, const std::vector<int>& pts) {
    std::string out;
    for (int p : pts) {
        if (!out.empty()) out += ' ';
        out += w.labels[p];
    }
    return out.empty() ? "(none)" : out;
}

struct CommonInputs {
    std::string bp_path, glue_path;

    TracedBlueprint traced;
    AssembledManifold manifold;
    GluingSpec spec;

    void load(Report& rep, bool with_glue) {
        std::string bp_text = slurp(bp_path);
        rep.put("blueprint", bp_path);
        rep.put("blueprint digest", fnv1a64_hex(bp_text));
        traced = load_blueprint(bp_text);
        manifold = assemble(traced.bp, traced.boundary);
        if (with_glue) {
            std::string glue_text = slurp(glue_path);
            rep.put("gluing", glue_path);
            rep.put("gluing digest", fnv1a64_hex(glue_text));
            spec = parse_gluing(glue_text, manifold);
        }
    }

    // Itemize and stop on a failing gluing; classify/cones need it valid.
    bool gate_gluing(Report& rep) {
        GluingValidation gv = validate_gluing(manifold, spec);
        rep.put("gluing valid", gv.pass);
        for (const auto& f : gv.failures) rep.put("gluing failure", f);
        return gv.pass;
    }
};

int cmd_validate(const std::string& bp_path) {
    Report rep;
    Outputs outs;
    rep.put("command", "validate " + bp_path);
    std::string text = slurp(bp_path);
    rep.put("blueprint", bp_path);
    rep.put("blueprint digest", fnv1a64_hex(text));

    FatGraphBlueprint bp = parse_blueprint(text);
    BoundaryData bd = trace_boundary_cycles(bp);
    for (auto& [cyc, pol] : bp.polarity_directives) {
        if (cyc >= static_cast<int>(bd.cycles.size()))
            throw ParseError(0, "polarity directive references a missing cycle");
        bd.cycles[cyc].polarity = pol;
    }
    derive_polarity(bp, bd);
    ConditionReport cr = validate_conditions(bp, bd);

    rep.put("vertices", bp.vertices.size());
    rep.put("edges", bp.edges.size());
    rep.put("boundary cycles", bd.cycles.size());
    rep.put("euler characteristic", static_cast<long long>(euler_characteristic(bp)));
    rep.put("condition even valences", cr.condition1);
    rep.put("condition side separation", cr.condition2);
    rep.put("polarity assignable", cr.polarity_assignable);
    for (const auto& v : cr.violations) rep.put("violation", v);
    for (const auto& pr : prong_census(bp))
        rep.put("orbit " + bp.vertices[pr.vertex].id,
                std::to_string(pr.p) + "-prong (" + to_string(pr.cls) + ")");
    return finish(rep, outs, cr.pass);
}

int cmd_assemble(const std::string& bp_path) {
    Report rep;
    Outputs outs;
    rep.put("command", "assemble " + bp_path);
    CommonInputs in;
    in.bp_path = bp_path;
    in.load(rep, false);

    const AssembledManifold& m = in.manifold;
    rep.put("components", m.components.size());
    for (const auto& comp : m.components) {
        std::string desc = std::to_string(comp.k) + " blocks, " +
                           (comp.polarity == Polarity::outgoing ? "outgoing" : "incoming") +
                           ", " + (comp.torus ? "torus" : "Klein bottle");
        rep.put("component " + component_name(comp.cycle), desc);
    }
    rep.put("seams", m.seams.size());
    rep.put("vertical orbits", m.vertical_orbits.size());
    rep.put("orientable", m.orientable);
    rep.put("stable half-walls", m.stable_half_walls_used);
    rep.put("unstable half-walls", m.unstable_half_walls_used);
    return finish(rep, outs, true);
}

int cmd_classify(const std::string& bp_path, const std::string& glue_path) {
    Report rep;
    Outputs outs;
    rep.put("command", "classify " + bp_path + " " + glue_path);
    CommonInputs in;
    in.bp_path = bp_path;
    in.glue_path = glue_path;
    in.load(rep, true);
    if (!in.gate_gluing(rep)) return finish(rep, outs, false);

    FlowClass fc = classify_flow(in.manifold, in.spec);
    rep.put("classification", classification_sentence(fc));
    for (const auto& o : fc.singular)
        rep.put("singular orbit", in.manifold.bp.vertices[o.vertex].id + " (" +
                                      std::to_string(o.p) + "-prong)");
    if (!fc.note.empty()) rep.put("note", fc.note);
    return finish(rep, outs, true);
}

int cmd_cones(const std::string& bp_path, const std::string& glue_path, double lambda,
              double kappa, int grid, Outputs outs) {
    Report rep;
    rep.put("command", "cones " + bp_path + " " + glue_path + " --lambda " + fmt_real(lambda) +
                           " --kappa " + fmt_real(kappa) + " --grid " + std::to_string(grid));
    CommonInputs in;
    in.bp_path = bp_path;
    in.glue_path = glue_path;
    in.load(rep, true);
    if (!in.gate_gluing(rep)) return finish(rep, outs, false);

    rep.put("lambda", lambda);
    rep.put("kappa", kappa);
    rep.put("kappa max", kappa_max(in.manifold, in.spec));
    rep.put("grid", grid);
    ReturnMapSystem sys = make_system(in.manifold, in.spec, lambda, kappa);
    ConeReport cones = verify_cones(sys, grid, outs.enabled());
    rep.put("samples checked", cones.checked);
    rep.put("contained", cones.contained);
    rep.put("margin (radians)", cones.margin);
    rep.put("min expansion", cones.min_expansion);
    rep.put("expansion threshold", 2.0);
    if (outs.enabled()) {
        std::string csv = "u,v,margin,expansion\n";
        for (const auto& s : cones.samples)
            csv += fmt_real(s.u) + "," + fmt_real(s.v) + "," + fmt_real(s.margin) + "," +
                   fmt_real(s.expansion) + "\n";
        outs.write("cones.csv", csv);
    }
    return finish(rep, outs, cones.pass);
}

int cmd_lambda0(const std::string& bp_path, const std::string& glue_path, double kappa,
                int grid) {
    Report rep;
    Outputs outs;
    rep.put("command", "lambda0 " + bp_path + " " + glue_path + " --kappa " + fmt_real(kappa) +
                           " --grid " + std::to_string(grid));
    CommonInputs in;
    in.bp_path = bp_path;
    in.glue_path = glue_path;
    in.load(rep, true);
    if (!in.gate_gluing(rep)) return finish(rep, outs, false);

    rep.put("kappa", kappa);
    rep.put("grid", grid);
    Lambda0Result res = estimate_lambda0(in.manifold, in.spec, kappa, grid);
    rep.put("certifiable", res.certifiable);
    if (res.certifiable) {
        rep.put("lambda0", res.lambda0);
        rep.put("lambda0 tolerance", "1% relative (log bisection)");
    }
    return finish(rep, outs, res.certifiable);
}

int cmd_curves(const std::string& bp_path, const std::string& glue_path, double lambda,
               double kappa, int gen, Outputs outs) {
    Report rep;
    rep.put("command", "curves " + bp_path + " " + glue_path + " --lambda " + fmt_real(lambda) +
                           " --kappa " + fmt_real(kappa) + " --gen " + std::to_string(gen));
    CommonInputs in;
    in.bp_path = bp_path;
    in.glue_path = glue_path;
    in.load(rep, true);
    if (!in.gate_gluing(rep)) return finish(rep, outs, false);

    rep.put("lambda", lambda);
    rep.put("kappa", kappa);
    rep.put("generations", gen);
    ReturnMapSystem sys = make_system(in.manifold, in.spec, lambda, kappa);
    auto families = stable_curves(sys, gen);

    bool all_graphs = true;
    for (const auto& fam : families) {
        std::string key = "generation " + std::to_string(fam.generation);
        rep.put(key + " pieces", static_cast<long long>(fam.pieces.size()));
        rep.put(key + " generated", fam.pieces_generated);
        rep.put(key + " sources", fam.sources_processed);
        rep.put(key + " graphs", fam.all_graphs);
        rep.put(key + " max slope", fam.max_slope);
        all_graphs = all_graphs && fam.all_graphs;
    }
    if (outs.enabled()) {
        std::string csv = "generation,component,curve_id,u,v\n";
        for (const auto& fam : families)
            for (const auto& piece : fam.pieces)
                for (const auto& pt : piece.pts)
                    csv += std::to_string(fam.generation) + "," + std::to_string(piece.component) +
                           "," + std::to_string(piece.curve_id) + "," + fmt_real(pt.u) + "," +
                           fmt_real(pt.v) + "\n";
        outs.write("curves.csv", csv);
    }
    return finish(rep, outs, all_graphs);
}

int cmd_orbit(double lambda, unsigned long long seed, Outputs outs) {
    Report rep;
    rep.put("command",
            "orbit --lambda " + fmt_real(lambda) + " --seed " + std::to_string(seed));
    rep.put("lambda", lambda);
    rep.put("seed", static_cast<long long>(seed));

    Rng rng{seed};
    BlockPoint p0{rng.uniform(-1.4, 1.4), rng.uniform(0.0, 1.0), -1.5707963267948966};
    rep.put("start x", p0.x);
    rep.put("start y", p0.y);
    rep.put("start z", p0.z);

    OrbitTrace tr = integrate_orbit(p0, lambda, 1e-3, 50.0, 25);
    rep.put("outcome", tr.outcome == OrbitOutcome::exited ? "exited" : "non-exiting");
    rep.put("samples", tr.samples.size());
    if (tr.outcome == OrbitOutcome::exited) {
        rep.put("transit time", tr.exit_time);
        rep.put("transit time closed form", transit_time(p0.x));
        rep.put("exit y", tr.exit.y);
        rep.put("exit y closed form", exit_map(p0.x, p0.y, lambda).y);
    }
    if (outs.enabled()) {
        std::string csv = "t,x,y,z\n";
        for (const auto& s : tr.samples)
            csv += fmt_real(s.t) + "," + fmt_real(s.p.x) + "," + fmt_real(s.p.y) + "," +
                   fmt_real(s.p.z) + "\n";
        outs.write("orbit.csv", csv);
    }
    return finish(rep, outs, true);
}

int cmd_fattree(const std::string& bp_path, int radius, Outputs outs) {
    Report rep;
    rep.put("command", "fattree " + bp_path + " --radius " + std::to_string(radius));
    std::string text = slurp(bp_path);
    rep.put("blueprint", bp_path);
    rep.put("blueprint digest", fnv1a64_hex(text));

    TracedBlueprint tb = load_blueprint(text);
    FatTreePatch patch = build_fat_tree(tb.bp, radius);
    rep.put("radius", radius);
    rep.put("patch vertices", patch.vertices.size());
    rep.put("patch edges", patch.edges.size());
    int leaves = 0;
    for (const auto& pv : patch.vertices) {
        int deg = 0;
        for (int e : pv.slot_edge)
            if (e >= 0) ++deg;
        if (deg <= 1) ++leaves;
    }
    rep.put("patch leaves", static_cast<long long>(leaves));
    std::string dump = export_fat_tree(patch);
    rep.put("patch digest", fnv1a64_hex(dump));
    if (outs.enabled()) outs.write("fattree.txt", dump);
    return finish(rep, outs, true);
}

int cmd_skew(const std::vector<std::string>& toks) {
    Report rep;
    Outputs outs;
    rep.put("command", "skew " + toks[0] + " " + toks[1] + " " + toks[2] + " " + toks[3]);
    SkewOrbit a = make_skew_orbit(parse_rational(toks[0]), parse_rational(toks[1]));
    SkewOrbit b = make_skew_orbit(parse_rational(toks[2]), parse_rational(toks[3]));

    SkewConnectivity conn = skew_chain_connected(a, b);
    rep.put("verdict", to_string(conn.verdict));
    if (conn.verdict != SkewVerdict::not_connected)
        rep.put("chain length", static_cast<long long>(conn.length));
    int bfs = skew_chain_bfs(a, b, 12);
    rep.put("bfs length (depth 12)", static_cast<long long>(bfs));
    bool agree = conn.verdict == SkewVerdict::not_connected || conn.length > 12
                     ? bfs == -1
                     : bfs == conn.length;
    rep.put("bfs agrees", agree);
    return finish(rep, outs, agree);
}

int cmd_nhtree(const std::string& tree_path, const std::string& auto_path, long long radius) {
    Report rep;
    Outputs outs;
    std::string echo = "nhtree " + tree_path;
    if (!auto_path.empty()) echo += " " + auto_path;
    echo += " --radius " + std::to_string(radius);
    rep.put("command", echo);

    std::string text = slurp(tree_path);
    rep.put("tree", tree_path);
    rep.put("tree digest", fnv1a64_hex(text));
    NHTree tree = parse_tree(text);
    rep.put("points", tree.points.size());
    rep.put("segments", tree.segments.size());
    rep.put("witnesses", tree.witnesses.size());
    rep.put("periodic", tree.periodic);

    TreeWindow w = make_window(tree, radius);
    rep.put("window radius", w.radius);
    rep.put("window points", w.pts.size());
    rep.put("window wires", w.wires.size());

    if (!auto_path.empty()) {
        std::string auto_text = slurp(auto_path);
        rep.put("automorphism", auto_path);
        rep.put("automorphism digest", fnv1a64_hex(auto_text));
        TreeAutomorphism g = parse_automorphism(auto_text, tree);
        validate_automorphism(w, g);
        rep.put("offset", g.offset);

        FixSets fsets = fix_sets(w, g);
        rep.put("fixed points", join_labels(w, fsets.fix));
        rep.put("almost fixed points", join_labels(w, fsets.fix_approx));

        if (fsets.fix.empty()) {
            AxisResult ax = axis(w, g);
            rep.put("axis points", join_labels(w, ax.points));
            rep.put("axis undecided", ax.undecidable.size());
            rep.put("axis inconclusive", ax.inconclusive);
            rep.put("axis matches inverse", ax.matches_inverse);
            rep.put("axis invariant", ax.gamma_invariant);
            rep.put("axis union formula", ax.union_formula_ok);
        } else {
            rep.put("axis", "skipped (fixed points present)");
        }
    }
    return finish(rep, outs, true);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudo-Anosov flow toolkit"};
    app.require_subcommand(1);

    std::string bp_path, glue_path, tree_path, auto_path;
    double lambda = 1.0, kappa = 0.2;
    int grid = 200, gen = 4, radius = 2;
    long long tree_radius = 3;
    unsigned long long seed = 0;
    Outputs outs;
    std::vector<std::string> skew_toks;

    auto* validate = app.add_subcommand("validate", "check blueprint conditions");
    validate->add_option("blueprint", bp_path)->required();

    auto* assemble_cmd = app.add_subcommand("assemble", "chain blocks along boundary cycles");
    assemble_cmd->add_option("blueprint", bp_path)->required();

    auto* classify = app.add_subcommand("classify", "classify the glued flow");
    classify->add_option("blueprint", bp_path)->required();
    classify->add_option("gluing", glue_path)->required();

    auto* cones = app.add_subcommand("cones", "certify the invariant cone field");
    cones->add_option("blueprint", bp_path)->required();
    cones->add_option("gluing", glue_path)->required();
    cones->add_option("--lambda", lambda);
    cones->add_option("--kappa", kappa);
    cones->add_option("--grid", grid);
    cones->add_option("--out", outs.dir);

    auto* lambda0 = app.add_subcommand("lambda0", "bisect the certification threshold");
    lambda0->add_option("blueprint", bp_path)->required();
    lambda0->add_option("gluing", glue_path)->required();
    lambda0->add_option("--kappa", kappa);
    lambda0->add_option("--grid", grid);

    auto* curves = app.add_subcommand("curves", "pull back stable curves");
    curves->add_option("blueprint", bp_path)->required();
    curves->add_option("gluing", glue_path)->required();
    curves->add_option("--lambda", lambda);
    curves->add_option("--kappa", kappa);
    curves->add_option("--gen", gen);
    curves->add_option("--out", outs.dir);

    auto* orbit = app.add_subcommand("orbit", "integrate one block orbit");
    orbit->add_option("--lambda", lambda);
    orbit->add_option("--seed", seed);
    orbit->add_option("--out", outs.dir);

    auto* fattree = app.add_subcommand("fattree", "unfold the universal-cover patch");
    fattree->add_option("blueprint", bp_path)->required();
    fattree->add_option("--radius", radius);
    fattree->add_option("--out", outs.dir);

    auto* skew = app.add_subcommand("skew", "orbit-space chain connectivity");
    skew->add_option("orbits", skew_toks, "d1 c1 d2 c2 as rationals p/q")->expected(4);

    auto* nhtree = app.add_subcommand("nhtree", "validate a non-Hausdorff tree presentation");
    nhtree->add_option("tree", tree_path)->required();
    nhtree->add_option("automorphism", auto_path);
    nhtree->add_option("--radius", tree_radius);

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(bp_path);
        if (assemble_cmd->parsed()) return cmd_assemble(bp_path);
        if (classify->parsed()) return cmd_classify(bp_path, glue_path);
        if (cones->parsed()) return cmd_cones(bp_path, glue_path, lambda, kappa, grid, outs);
        if (lambda0->parsed()) return cmd_lambda0(bp_path, glue_path, kappa, grid);
        if (curves->parsed()) return cmd_curves(bp_path, glue_path, lambda, kappa, gen, outs);
        if (orbit->parsed()) return cmd_orbit(lambda, seed, outs);
        if (fattree->parsed()) return cmd_fattree(bp_path, radius, outs);
        if (skew->parsed()) return cmd_skew(skew_toks);
        if (nhtree->parsed()) return cmd_nhtree(tree_path, auto_path, tree_radius);
    } catch (const std::exception& e) {
        std::istringstream ss(e.what());
        std::string line;
        while (std::getline(ss, line)) std::cout << "error: " << line << "\n";
        std::cout << "status: fail\n";
        return 1;
    }
    return 0;
}
