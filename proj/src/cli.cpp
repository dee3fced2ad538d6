#include "crnstab/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "crnstab/conjugacy.hpp"
#include "crnstab/diagnostics.hpp"
#include "crnstab/equilibrium.hpp"
#include "crnstab/error.hpp"
#include "crnstab/lcdcb1.hpp"
#include "crnstab/parse.hpp"
#include "crnstab/simulate.hpp"
#include "crnstab/structure.hpp"

namespace crnstab {

namespace {

using nlohmann::json;

constexpr int kExitRejected = 1;
constexpr int kExitParse = 2;
constexpr int kExitAnalysis = 3;
constexpr int kExitSimulation = 4;
constexpr int kExitVerification = 5;
constexpr int kExitUsage = 64;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string fmt_vec(const Vec& v) {
    std::string s = "(";
    for (std::size_t j = 0; j < v.size(); ++j) s += (j ? ", " : "") + fmt(v[j]);
    return s + ")";
}

Network load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_network(buf.str());
}

std::vector<Rational> parse_rational_list(const std::string& text, const char* what) {
    std::vector<Rational> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(parse_number(item));
    if (out.empty()) throw Error(std::string("empty list for ") + what);
    return out;
}

Vec parse_double_list(const std::string& text, const char* what) {
    std::vector<Rational> rs = parse_rational_list(text, what);
    Vec out;
    for (const Rational& r : rs) out.push_back(r.to_double());
    return out;
}

/// "const:5,1" or "expr:sin(s)+1,cos(s)+1" (commas split at paren depth 0).
HistoryFunction parse_history(const std::string& spec) {
    auto split_top = [](const std::string& s) {
        std::vector<std::string> parts{""};
        int depth = 0;
        for (char c : s) {
            if (c == '(') ++depth;
            if (c == ')') --depth;
            if (c == ',' && depth == 0) parts.emplace_back();
            else parts.back() += c;
        }
        return parts;
    };
    if (spec.rfind("const:", 0) == 0) {
        Vec v = parse_double_list(spec.substr(6), "history");
        return HistoryFunction::constant(v);
    }
    if (spec.rfind("expr:", 0) == 0)
        return HistoryFunction::expressions(split_top(spec.substr(5)));
    throw Error("history must start with 'const:' or 'expr:'");
}

void apply_delay_override(Network& net, const std::string& taus) {
    std::vector<Rational> ds = parse_rational_list(taus, "--tau");
    if (ds.size() != net.reaction_count())
        throw Error("--tau needs one delay per reaction (" +
                    std::to_string(net.reaction_count()) + ")");
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (ds[i].negative()) throw Error("negative delay in --tau");
        net.reactions[i].delay = ds[i];
    }
}

DiagonalMap parse_q(const std::string& text, std::size_t n) {
    std::vector<Rational> q = parse_rational_list(text, "--Q");
    if (q.size() != n)
        throw Error("--Q needs one entry per species (" + std::to_string(n) + ")");
    return DiagonalMap(std::move(q));
}

// ---------------------------------------------------------------- analyze

int cmd_analyze(const std::string& path, bool as_json, std::ostream& out) {
    Network net = load_network(path);
    StoichiometryAnalysis an = analyze_structure(net);

    std::optional<EquilibriumResult> eq;
    if (an.weakly_reversible) eq = find_complex_balanced_equilibrium(net);

    if (as_json) {
        json j;
        j["species"] = net.species;
        json cxs = json::array();
        for (const Complex& c : an.complexes) cxs.push_back(format_complex(net.species, c));
        j["complexes"] = cxs;
        j["linkage_classes"] = an.linkage_class_count;
        j["rank"] = an.rank;
        j["deficiency"] = an.deficiency;
        j["weakly_reversible"] = an.weakly_reversible;
        j["s_perp_basis"] = an.basis_S_perp;
        if (eq) {
            j["cb_equilibrium"] = eq->point;
            double mx = 0.0;
            for (double r : eq->residuals) mx = std::max(mx, std::abs(r));
            j["cb_max_residual"] = mx;
        }
        out << j.dump(2) << "\n";
        return 0;
    }

    out << "species: ";
    for (std::size_t j = 0; j < net.species.size(); ++j)
        out << (j ? ", " : "") << net.species[j];
    out << "\ncomplexes (" << an.complexes.size() << "): ";
    for (std::size_t c = 0; c < an.complexes.size(); ++c)
        out << (c ? ", " : "") << format_complex(net.species, an.complexes[c]);
    out << "\nlinkage classes: " << an.linkage_class_count;
    out << "\nrank: " << an.rank;
    out << "\ndeficiency: " << an.deficiency;
    out << "\nweakly reversible: " << (an.weakly_reversible ? "yes" : "no") << "\n";
    if (an.basis_S_perp.empty()) {
        out << "S^perp basis: (none)\n";
    } else {
        out << "S^perp basis:\n";
        for (const Vec& a : an.basis_S_perp) out << "  " << fmt_vec(a) << "\n";
    }
    if (eq) {
        double mx = 0.0;
        for (double r : eq->residuals) mx = std::max(mx, std::abs(r));
        out << "CB equilibrium: " << fmt_vec(eq->point) << "\n";
        out << "max balance residual: " << fmt(mx) << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------- realize

int cmd_realize(const std::string& path, const std::string& q_text,
                const std::string& out_path, std::ostream& out, std::ostream& err) {
    Network net = load_network(path);
    DiagonalMap q = parse_q(q_text, net.species_count());

    StoichiometryAnalysis an = analyze_structure(net);
    if (!(an.weakly_reversible && an.deficiency == 0))
        err << "warning: input is not weakly reversible with zero deficiency; "
               "it may not be complex balanced\n";

    RealizationResult res = construct_lcdcb(net, q);
    ConjugacyReport cert = check_linear_conjugacy(res.network, net, q);
    if (!cert.conjugate) {
        err << "internal error: realization failed its conjugacy certificate\n";
        for (const std::string& m : cert.mismatches) err << "  " << m << "\n";
        return kExitAnalysis;
    }

    std::string text = format_network(res.network);
    if (!out_path.empty()) {
        std::ofstream f(out_path);
        if (!f) throw Error("cannot write file: " + out_path);
        f << text;
    } else {
        out << text;
    }
    err << "conjugacy certificate: ok (" << res.network.reaction_count() << " reactions, "
        << res.pruned_reactions << " pruned companion" << (res.pruned_reactions == 1 ? "" : "s");
    if (res.split_reactions) err << ", " << res.split_reactions << " degenerate split";
    err << ")\n";
    return 0;
}

// ---------------------------------------------------------------- classify

int cmd_classify(const std::string& path, const std::string& against, bool allow_b,
                 bool as_json, std::ostream& out) {
    Network candidate = load_network(path);
    Network reference = load_network(against);
    Lcdcb1Result res = classify_lcdcb1(candidate, reference, allow_b);

    std::optional<Network> companion;
    if (res.accepted) companion = companion_dcb(candidate, res, reference);

    if (as_json) {
        json j;
        j["accepted"] = res.accepted;
        j["stability_applicable"] = res.stability_applicable;
        if (!res.rejection_reason.empty()) j["reason"] = res.rejection_reason;
        if (res.accepted) {
            j["pairing"] = res.pairing;
            json bs = json::array();
            for (const Rational& b : res.b) bs.push_back(b.str());
            j["b"] = bs;
            json delays = json::array();
            for (const Reaction& r : companion->reactions) delays.push_back(r.delay.str());
            j["companion_delays"] = delays;
        }
        out << j.dump(2) << "\n";
        return res.accepted ? 0 : kExitRejected;
    }

    if (!res.accepted) {
        out << "rejected: " << res.rejection_reason << "\n";
        return kExitRejected;
    }
    out << "accepted\n";
    if (!res.stability_applicable)
        out << "note: " << res.rejection_reason << "\n";
    out << "pairing:";
    for (std::size_t i = 0; i < res.pairing.size(); ++i)
        out << " " << (i + 1) << "->" << (res.pairing[i] + 1);
    out << "\nb =";
    for (const Rational& b : res.b) out << " " << b.str();
    out << "\ncompanion delays:";
    for (const Reaction& r : companion->reactions) out << " " << r.delay.str();
    out << "\n";
    return 0;
}

// ---------------------------------------------------------------- simulate / verify

struct SimOptions {
    std::string path;
    std::string tau;
    std::string history;
    double t_end = 100.0;
    std::string step = "1/100";
    double sample_every = 0.1;
    std::string out_path;
};

struct VerifyOptions {
    std::string lyapunov;   // "ref=x1,x2,..." or empty
    bool conserved = false;
    std::string q;          // with --against: V_L / h_a mode
    std::string against;
};

int run_simulation(const SimOptions& sim, const VerifyOptions* verify, std::ostream& out,
                   std::ostream& err) {
    Network net = load_network(sim.path);
    if (!sim.tau.empty()) apply_delay_override(net, sim.tau);
    HistoryFunction history = parse_history(sim.history);
    Rational step = parse_number(sim.step);

    Trajectory traj = simulate(net, history, sim.t_end, step);

    // Optional verification functionals.
    std::optional<LyapunovSpec> lyap;
    std::vector<ConservedFunctional> conserved;
    std::vector<std::string> conserved_names;
    if (verify) {
        std::optional<Network> reference;
        std::optional<DiagonalMap> qmap;
        if (!verify->q.empty()) {
            if (verify->against.empty())
                throw Error("--q needs --against (the reference network the diagonal maps to)");
            Network ref_raw = load_network(verify->against);
            reference = reordered_network(ref_raw, net.species);
            qmap = parse_q(verify->q, net.species_count());
        }
        if (!verify->lyapunov.empty()) {
            std::string spec = verify->lyapunov;
            if (spec.rfind("ref=", 0) == 0) spec = spec.substr(4);
            Vec ref_point = parse_double_list(spec, "--lyapunov");
            if (ref_point.size() != net.species_count())
                throw Error("--lyapunov reference needs one entry per species");
            lyap = qmap ? make_lyapunov_conjugate(*reference, *qmap, ref_point)
                        : make_lyapunov(net, ref_point);
        }
        if (verify->conserved) {
            const Network& basis_net = qmap ? *reference : net;
            StoichiometryAnalysis an = analyze_structure(basis_net);
            int k = 0;
            for (const Vec& a : an.basis_S_perp) {
                if (qmap) {
                    // h_a directions live in (Q^-1)^T S~-perp.
                    Vec dir(a.size());
                    for (std::size_t j = 0; j < a.size(); ++j)
                        dir[j] = a[j] / qmap->q[j].to_double();
                    conserved.push_back(make_h_a(*reference, *qmap, dir));
                    conserved_names.push_back("h_a" + std::to_string(++k));
                } else {
                    conserved.push_back(make_c_a(net, a));
                    conserved_names.push_back("c_a" + std::to_string(++k));
                }
            }
            if (conserved.empty())
                err << "note: S^perp is trivial; no conserved functionals to track\n";
        }
    }

    std::ofstream file;
    std::ostream* csv = &out;
    if (!sim.out_path.empty()) {
        file.open(sim.out_path);
        if (!file) throw Error("cannot write file: " + sim.out_path);
        csv = &file;
    }

    *csv << "t";
    for (const std::string& s : net.species) *csv << ",x_" << s;
    if (lyap) *csv << ",V";
    for (const std::string& name : conserved_names) *csv << "," << name;
    *csv << "\n";

    std::vector<double> v_series;
    std::vector<Vec> c_series(conserved.size());
    for (double t = 0.0; t <= sim.t_end + 1e-9; t += sim.sample_every) {
        double tc = std::min(t, sim.t_end);
        Vec x = traj.lookup(tc);
        *csv << fmt(tc);
        for (double xi : x) *csv << "," << fmt(xi);
        if (lyap) {
            double v = eval_lyapunov(*lyap, traj, tc);
            v_series.push_back(v);
            *csv << "," << fmt(v);
        }
        for (std::size_t k = 0; k < conserved.size(); ++k) {
            double c = conserved[k].eval(traj, tc);
            c_series[k].push_back(c);
            *csv << "," << fmt(c);
        }
        *csv << "\n";
        if (sim.sample_every <= 0.0) break;
    }

    if (!verify) return 0;

    bool failed = false;
    if (lyap && v_series.size() > 1) {
        double maxfd = max_forward_difference(v_series);
        double tol = 1e-7 * (1.0 + std::abs(v_series.front()));
        bool ok = maxfd <= tol;
        failed = failed || !ok;
        err << "dissipation: " << (ok ? "PASS" : "FAIL") << " (max forward difference "
            << fmt(maxfd) << ", tolerance " << fmt(tol) << ")\n";
    }
    for (std::size_t k = 0; k < conserved.size(); ++k) {
        double c0 = c_series[k].front();
        double drift = 0.0;
        for (double c : c_series[k]) drift = std::max(drift, std::abs(c - c0));
        double rel = drift / std::max(1e-300, std::abs(c0));
        bool ok = rel <= 1e-6;
        failed = failed || !ok;
        err << "conservation[" << conserved_names[k] << "]: " << (ok ? "PASS" : "FAIL")
            << " (relative drift " << fmt(rel) << ", tolerance 1e-06)\n";
    }
    return failed ? kExitVerification : 0;
}

// ---------------------------------------------------------------- conjugate

int cmd_conjugate(const std::string& path, const std::string& against,
                  const std::string& q_text, bool as_json, std::ostream& out) {
    Network a = load_network(path);
    Network b = load_network(against);

    if (!q_text.empty()) {
        DiagonalMap q = parse_q(q_text, b.species_count());
        ConjugacyReport rep = check_linear_conjugacy(a, b, q);
        if (as_json) {
            json j;
            j["conjugate"] = rep.conjugate;
            j["mismatches"] = rep.mismatches;
            out << j.dump(2) << "\n";
        } else if (rep.conjugate) {
            out << "linear conjugate under the given Q\n";
        } else {
            out << "not linear conjugate under the given Q:\n";
            for (const std::string& m : rep.mismatches) out << "  " << m << "\n";
        }
        return rep.conjugate ? 0 : kExitRejected;
    }

    ConjugacySolve sol = solve_conjugacy(a, b);
    if (as_json) {
        json j;
        j["feasible"] = sol.feasible;
        j["detail"] = sol.detail;
        if (sol.feasible) j["q"] = sol.q;
        out << j.dump(2) << "\n";
    } else {
        out << (sol.feasible ? "conjugate: " : "not conjugate for any diagonal Q: ")
            << sol.detail << "\n";
    }
    return sol.feasible ? 0 : kExitRejected;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"delayed mass-action reaction network analysis"};
    app.require_subcommand(1);

    // analyze
    std::string an_path;
    bool an_json = false;
    CLI::App* analyze = app.add_subcommand("analyze", "structural report and CB equilibrium");
    analyze->add_option("file", an_path, "network file (.crn)")->required();
    analyze->add_flag("--json", an_json, "machine-readable output");

    // realize
    std::string re_path, re_q, re_out;
    CLI::App* realize = app.add_subcommand("realize", "construct a conjugate realization");
    realize->add_option("file", re_path)->required();
    realize->add_option("--Q", re_q, "diagonal entries q1,q2,...")->required();
    realize->add_option("-o,--output", re_out, "output network file");

    // classify
    std::string cl_path, cl_against;
    bool cl_allow = false, cl_json = false;
    CLI::App* classify = app.add_subcommand("classify", "match reaction vectors against a reference");
    classify->add_option("file", cl_path)->required();
    classify->add_option("--against", cl_against, "reference network")->required();
    classify->add_flag("--allow-b-greater-1", cl_allow,
                       "report the pairing even when some b exceeds 1");
    classify->add_flag("--json", cl_json);

    // simulate / verify
    SimOptions sim;
    VerifyOptions ver;
    CLI::App* simulate_cmd = app.add_subcommand("simulate", "integrate and emit CSV");
    CLI::App* verify_cmd = app.add_subcommand("verify", "simulate plus dissipation/conservation checks");
    for (CLI::App* c : {simulate_cmd, verify_cmd}) {
        c->add_option("file", sim.path)->required();
        c->add_option("--tau", sim.tau, "override delays positionally: t1,t2,...");
        c->add_option("--history", sim.history, "const:v1,v2,... or expr:e1,e2,...")->required();
        c->add_option("--t-end", sim.t_end, "integration horizon");
        c->add_option("--step", sim.step, "requested step (rational)");
        c->add_option("--sample-every", sim.sample_every, "CSV sampling interval");
        c->add_option("-o,--output", sim.out_path, "CSV output file");
    }
    verify_cmd->add_option("--lyapunov", ver.lyapunov, "ref=x1,x2,...: track V and check dissipation");
    verify_cmd->add_flag("--conserved", ver.conserved, "track conserved functionals");
    verify_cmd->add_option("--q", ver.q, "diagonal for the Q-weighted functionals (needs --against)");
    verify_cmd->add_option("--against", ver.against, "reference network for the Q-weighted mode");

    // conjugate
    std::string co_path, co_against, co_q;
    bool co_json = false;
    CLI::App* conjugate = app.add_subcommand("conjugate", "check or solve for a diagonal conjugacy");
    conjugate->add_option("file", co_path)->required();
    conjugate->add_option("--against", co_against, "reference network")->required();
    conjugate->add_option("--Q", co_q, "check this diagonal; omit to solve for one");
    conjugate->add_flag("--json", co_json);

    std::vector<char*> argv;
    std::vector<std::string> storage = args;
    std::string prog = "crnstab";
    argv.push_back(prog.data());
    for (std::string& s : storage) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (*analyze) return cmd_analyze(an_path, an_json, out);
        if (*realize) return cmd_realize(re_path, re_q, re_out, out, err);
        if (*classify) return cmd_classify(cl_path, cl_against, cl_allow, cl_json, out);
        if (*simulate_cmd) return run_simulation(sim, nullptr, out, err);
        if (*verify_cmd) return run_simulation(sim, &ver, out, err);
        if (*conjugate) return cmd_conjugate(co_path, co_against, co_q, co_json, out);
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const SimulationError& e) {
        err << "simulation error: " << e.what() << "\n";
        return e.kind == SimulationError::Kind::bad_argument ? kExitAnalysis : kExitSimulation;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitAnalysis;
    }
    return kExitUsage;
}

}  // namespace crnstab
