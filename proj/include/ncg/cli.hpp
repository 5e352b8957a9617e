#pragma once

// Command-line front end. `run` parses argv-style arguments, dispatches to
// the library on the selected backend and writes one JSON document to `out`.
//
// Exit codes: 0 success, 1 usage/validation/domain error, 2 numerical,
// resource or consistency error, 3 a verification found a failing instance.

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <sstream>

#include "ncg/verify.hpp"

namespace ncg::cli {

using io::json;

enum ExitCode : int { kOk = 0, kUsage = 1, kNumeric = 2, kVerifyFailed = 3 };

struct RunConfig {
    std::string backend = "exact";
    std::string format = "json";
    double epsilon = 1e-9;
    uint64_t seed = 0;
    unsigned long long budget = 0;  // 0 keeps NCG_BUDGET or the default
    int max_l = -1;
    unsigned threads = 0;
};

struct Args {
    std::string a, b, element, n0, hom, vector, algebra, tensor, projection, complex;
    std::string path = "both", policy = "min";
    int l = 0;
    size_t max_degree = 4, g = 0, count = 25;
    std::vector<std::string> theorems;
    std::string theorem_list;
    std::string kind, blocks, group = "S3";
    size_t m = 1, size = 0, length = 3;
    bool with_class = false;
};

/// Restores process-wide settings when a run ends.
class SettingsGuard {
public:
    SettingsGuard()
        : eps_(settings().epsilon.load()), amb_(settings().max_ambient.load()), max_l_(settings().max_l.load()) {}
    ~SettingsGuard() {
        settings().epsilon = eps_;
        settings().max_ambient = amb_;
        settings().max_l = max_l_;
    }
    SettingsGuard(const SettingsGuard&) = delete;
    SettingsGuard& operator=(const SettingsGuard&) = delete;

private:
    double eps_;
    unsigned long long amb_;
    int max_l_;
};

inline std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) out.push_back(item);
    return out;
}

inline json need_file(const std::string& path, const char* flag) {
    if (path.empty()) throw ValidationError(std::string("missing required option ") + flag);
    return io::read_file(path);
}

template <class S>
N0Class<S> load_n0_or_element(const json& j) {
    if (j.contains("support")) return io::n0_from_json<S>(j);
    return n_class(io::normal_from_json<S>(j));
}

template <class S>
int emit_reports(const std::vector<verify::Report>& reps, const RunConfig& cfg, std::ostream& out) {
    bool ok = std::all_of(reps.begin(), reps.end(), [](const auto& r) { return r.ok(); });
    if (cfg.format == "text") {
        for (const auto& r : reps)
            out << r.theorem << ": " << r.passes << "/" << r.instances << (r.ok() ? " passed" : " FAILED") << "\n";
        return ok ? kOk : kVerifyFailed;
    }
    json doc;
    if (reps.size() == 1) {
        doc = io::with_schema(reps.front().to_json());
    } else {
        json list = json::array();
        for (const auto& r : reps) list.push_back(r.to_json());
        doc = io::with_schema(json{{"backend", scalar_traits<S>::name}, {"seed", cfg.seed}, {"ok", ok}, {"reports", list}});
    }
    out << doc.dump() << "\n";
    return ok ? kOk : kVerifyFailed;
}

template <class S>
std::vector<verify::Report> run_theorems(const std::vector<std::string>& names, const Args& a, const RunConfig& cfg) {
    verify::Options opt{cfg.seed, a.count, cfg.threads};
    std::vector<verify::Report> reps;
    for (const auto& n : names) reps.push_back(verify::run_theorem<S>(n, opt));
    return reps;
}

inline MultiMatrixAlgebra algebra_arg(const std::string& blocks) {
    std::vector<size_t> dims;
    for (const auto& s : split_csv(blocks)) {
        try {
            dims.push_back(std::stoul(s));
        } catch (...) {
            throw ValidationError("--blocks must be a comma-separated list of positive integers");
        }
    }
    return MultiMatrixAlgebra(dims);
}

template <class S>
int dispatch(const std::string& cmd, const Args& a, const RunConfig& cfg, std::ostream& out) {
    auto emit = [&](const json& j) {
        out << (cfg.format == "text" ? io::with_schema(j).dump(2) : io::with_schema(j).dump()) << "\n";
        return kOk;
    };

    // --- n0
    if (cmd == "n0 class") return emit(io::n0_to_json(n_class(io::normal_from_json<S>(need_file(a.element, "--element")))));
    if (cmd == "n0 eq") {
        auto x = load_n0_or_element<S>(need_file(a.a, "--a"));
        auto y = load_n0_or_element<S>(need_file(a.b, "--b"));
        return emit(json{{"equal", x == y}});
    }
    if (cmd == "n0 add") {
        auto x = load_n0_or_element<S>(need_file(a.a, "--a"));
        auto y = load_n0_or_element<S>(need_file(a.b, "--b"));
        return emit(io::n0_to_json(n0_add(x, y)));
    }
    if (cmd == "n0 h") {
        auto x = load_n0_or_element<S>(need_file(a.n0, "--n0"));
        auto j = io::k0c_to_json(h_map(x));
        j["algebra"] = io::algebra_to_json(x.algebra());
        return emit(j);
    }
    if (cmd == "n0 t") {
        auto j = need_file(a.vector, "--vector");
        auto alg = !a.algebra.empty() ? io::algebra_from_json(io::read_file(a.algebra)) : io::algebra_from_json(io::field(j, "algebra"));
        return emit(io::n0_to_json(t_map(io::k0c_from_json<S>(j), alg)));
    }
    if (cmd == "n0 push") {
        auto phi = io::hom_from_json<S>(need_file(a.hom, "--hom"));
        auto x = load_n0_or_element<S>(need_file(a.n0, "--n0"));
        return emit(io::n0_to_json(functorial_map(phi, x)));
    }

    // --- cyclic homology
    if (cmd == "hc dims") {
        auto alg = io::algebra_from_json(need_file(a.algebra, "--algebra"));
        return emit(json{{"algebra", io::algebra_to_json(alg)}, {"dims", hc_dimensions(alg, a.max_degree)}});
    }
    if (cmd == "hc class") return emit(io::hc_to_json(hc_class(io::tensor_from_json<S>(need_file(a.tensor, "--tensor")))));
    if (cmd == "hc trace") {
        auto t = trace_map(io::tensor_from_json<S>(need_file(a.tensor, "--tensor")));
        json j{{"trace", io::tensor_to_json(t)}};
        if (a.with_class) j["class"] = io::hc_to_json(hc_class(t));
        return emit(j);
    }

    // --- Chern character
    if (cmd == "chern") {
        auto p = io::element_from_json<S>(need_file(a.projection, "--projection"));
        return emit(io::hc_to_json(chern_projection(p, a.l)));
    }
    if (cmd == "gchern") {
        if (!a.n0.empty() == !a.element.empty()) throw ValidationError("gchern needs exactly one of --n0 or --element");
        if (!a.n0.empty()) return emit(io::hc_to_json(generalized_chern(load_n0_or_element<S>(io::read_file(a.n0)), a.l)));
        auto sf = io::normal_from_json<S>(io::read_file(a.element));
        TagPolicy pol = a.policy == "max" ? TagPolicy::Max : TagPolicy::Min;
        if (a.path == "direct") return emit(io::hc_to_json(T_direct(sf, a.l)));
        auto run = T_cover_run(sf, a.l, 12, pol);
        if (a.path == "cover") {
            auto j = io::hc_to_json(run.value);
            j["depth"] = run.depth;
            return emit(j);
        }
        auto direct = T_direct(sf, a.l);
        bool eq = direct == run.value;
        emit(json{{"direct", io::hc_to_json(direct)}, {"cover", io::hc_to_json(run.value)}, {"depth", run.depth}, {"equal", eq}});
        return eq ? kOk : kVerifyFailed;
    }

    // --- verification
    if (cmd == "verify" || cmd == "lefschetz verify") {
        std::vector<std::string> names = a.theorems;
        for (const auto& n : split_csv(a.theorem_list)) names.push_back(n);
        if (names.empty()) {
            if (cmd == "verify")
                names = verify::theorem_names();
            else
                names = {"th4", "th5", "acyclic"};
        }
        for (const auto& n : names)
            if (std::find(verify::theorem_names().begin(), verify::theorem_names().end(), n) == verify::theorem_names().end())
                throw ValidationError("unknown theorem '" + n + "'");
        return emit_reports<S>(run_theorems<S>(names, a, cfg), cfg, out);
    }

    // --- Lefschetz numbers
    if (cmd == "lefschetz validate") {
        auto c = io::complex_from_json<S>(need_file(a.complex, "--complex"));
        auto rep = validate_complex(c);
        return emit(json{{"valid", rep.ok()}, {"violations", rep.violations}});
    }
    if (cmd == "lefschetz l1" || cmd == "lefschetz l2" || cmd == "lefschetz gl1") {
        auto c = io::complex_from_json<S>(need_file(a.complex, "--complex"));
        require_valid(c);
        if (a.g >= c.group.order()) throw ValidationError("--g is out of range for the group");
        if (cmd == "lefschetz l1") {
            auto j = io::k0c_to_json(lefschetz_first(c, a.g));
            j["algebra"] = io::algebra_to_json(c.algebra);
            return emit(j);
        }
        if (cmd == "lefschetz l2") return emit(io::hc_to_json(lefschetz_second(c, a.g, a.l)));
        return emit(io::n0_to_json(generalized_lefschetz_group(c, a.g)));
    }

    // --- instance generation
    if (cmd == "generate") {
        Rng rng(verify::splitmix(cfg.seed));
        auto alg = a.blocks.empty() ? random_algebra<S>(rng, 2, 2) : algebra_arg(a.blocks);
        alg.validate();
        if (a.kind == "normal-element") {
            auto sf = random_spectral_form<S>(rng, alg, a.m, random_pool<S>(rng, a.size ? a.size : 3), 0.2);
            return emit(io::element_to_json(sf.reconstruct()));
        }
        if (a.kind == "n0class") return emit(io::n0_to_json(random_n0<S>(rng, alg, a.size ? a.size : 4)));
        if (a.kind == "projection-family") {
            size_t total = a.m * alg.dimension();
            size_t n = a.size ? a.size : std::min<size_t>(3, total);
            json fam = json::array();
            for (const auto& p : random_orthogonal_family<S>(rng, alg, a.m, n)) fam.push_back(io::element_to_json(p));
            return emit(json{{"family", fam}});
        }
        if (a.kind == "ga-complex") {
            auto g = FiniteGroup::by_name(a.group);
            return emit(io::complex_to_json(random_complex(rng, alg, g, IrrepTable<S>::builtin(g), a.length,
                                                           a.size ? a.size : 2)));
        }
        throw ValidationError("unknown instance kind '" + a.kind + "'");
    }
    throw ValidationError("unknown command '" + cmd + "'");
}

inline std::string command_path(const CLI::App& app) {
    std::string path;
    const CLI::App* cur = &app;
    while (true) {
        auto subs = cur->get_subcommands();
        if (subs.empty()) break;
        cur = subs.front();
        path += (path.empty() ? "" : " ") + cur->get_name();
    }
    return path;
}

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    Args a;
    CLI::App app{"Desk-scale N-theory for finite-dimensional C*-algebras", "ncg"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--backend", cfg.backend, "scalar backend")->check(CLI::IsMember({"exact", "float"}));
    app.add_option("--epsilon", cfg.epsilon, "float comparison tolerance")->check(CLI::PositiveNumber);
    app.add_option("--seed", cfg.seed, "random seed");
    app.add_option("--budget", cfg.budget, "max enumerated tensor dimension")->check(CLI::PositiveNumber);
    app.add_option("--max-l", cfg.max_l, "override the Chern degree limit");
    app.add_option("--threads", cfg.threads, "verification threads (0 = all cores)");
    app.add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"json", "text"}));

    auto file = [](CLI::App* s, const char* name, std::string& dst, const char* what) { s->add_option(name, dst, what); };

    auto* n0 = app.add_subcommand("n0", "N-group operations");
    n0->require_subcommand(1);
    file(n0->add_subcommand("class", "class of a normal element"), "--element", a.element, "element or spectral form");
    for (const char* name : {"eq", "add"}) {
        auto* s = n0->add_subcommand(name, name == std::string("eq") ? "compare two classes" : "sum of two classes");
        file(s, "--a", a.a, "class or element");
        file(s, "--b", a.b, "class or element");
    }
    file(n0->add_subcommand("h", "image under h in K0 (x) C"), "--n0", a.n0, "class or element");
    auto* t = n0->add_subcommand("t", "coset representative t(v)");
    file(t, "--vector", a.vector, "K0 (x) C vector");
    file(t, "--algebra", a.algebra, "algebra (if not in the vector file)");
    auto* push = n0->add_subcommand("push", "functorial image under a *-homomorphism");
    file(push, "--hom", a.hom, "homomorphism");
    file(push, "--n0", a.n0, "class or element");

    auto* hc = app.add_subcommand("hc", "cyclic homology");
    hc->require_subcommand(1);
    auto* dims = hc->add_subcommand("dims", "dimensions of HC_0..HC_n");
    file(dims, "--algebra", a.algebra, "algebra");
    dims->add_option("--max-degree", a.max_degree, "largest degree");
    file(hc->add_subcommand("class", "homology class of a cycle"), "--tensor", a.tensor, "tensor");
    auto* tr = hc->add_subcommand("trace", "trace map M_r(A)^(n+1) -> A^(n+1)");
    file(tr, "--tensor", a.tensor, "tensor");
    tr->add_flag("--class", a.with_class, "also report the class of the image");

    auto* ch = app.add_subcommand("chern", "Chern character of a projection");
    file(ch, "--projection", a.projection, "projection");
    ch->add_option("--l", a.l, "degree");
    auto* gch = app.add_subcommand("gchern", "generalized Chern character");
    file(gch, "--n0", a.n0, "class");
    file(gch, "--element", a.element, "normal element or spectral form");
    gch->add_option("--l", a.l, "degree");
    gch->add_option("--path", a.path, "evaluation route")->check(CLI::IsMember({"cover", "direct", "both"}));
    gch->add_option("--policy", a.policy, "cover tag policy")->check(CLI::IsMember({"min", "max"}));

    auto add_verify_opts = [&](CLI::App* s) {
        s->add_option("ids", a.theorems, "theorem ids");
        s->add_option("--theorems", a.theorem_list, "comma-separated theorem ids");
        s->add_option("--count", a.count, "instances per theorem");
    };
    add_verify_opts(app.add_subcommand("verify", "seeded verification batches"));

    auto* lf = app.add_subcommand("lefschetz", "equivariant Lefschetz numbers");
    lf->require_subcommand(1);
    for (const char* name : {"l1", "l2", "gl1", "validate"}) {
        auto* s = lf->add_subcommand(name, std::string("Lefschetz ") + name);
        file(s, "--complex", a.complex, "G-A complex");
        if (std::string(name) != "validate") {
            s->add_option("--g", a.g, "group element index");
            s->add_option("--l", a.l, "degree for l2");
        }
    }
    add_verify_opts(lf->add_subcommand("verify", "seeded th4/th5 batches"));

    auto* gen = app.add_subcommand("generate", "deterministic random instances");
    gen->add_option("kind", a.kind, "instance kind")
        ->required()
        ->check(CLI::IsMember({"normal-element", "n0class", "projection-family", "ga-complex"}));
    gen->add_option("--blocks", a.blocks, "algebra blocks, e.g. 1,2");
    gen->add_option("--m", a.m, "amplification")->check(CLI::PositiveNumber);
    gen->add_option("--size", a.size, "spectrum size, support size, family size or max module rank");
    gen->add_option("--group", a.group, "Zn or S3");
    gen->add_option("--length", a.length, "complex length");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kUsage;
    }

    SettingsGuard guard;
    settings().epsilon = cfg.epsilon;
    settings().max_l = cfg.max_l;
    if (cfg.budget) settings().max_ambient = cfg.budget;

    const std::string cmd = command_path(app);
    try {
        if (cfg.backend == "float") return dispatch<Float>(cmd, a, cfg, out);
        return dispatch<ExactComplex>(cmd, a, cfg, out);
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << "\n";
        return kUsage;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << "\n";
        return kUsage;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << "\n";
        return kNumeric;
    } catch (const ResourceError& e) {
        err << "resource error: " << e.what() << "\n";
        return kNumeric;
    } catch (const ConsistencyError& e) {
        err << "consistency error: " << e.what() << "\n";
        return kNumeric;
    } catch (const io::json::exception& e) {
        err << "validation error: malformed JSON content: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kNumeric;
    }
}

}  // namespace ncg::cli
