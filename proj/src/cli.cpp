#include "separatrix/cli.hpp"

#include <filesystem>
#include <fstream>

#include "CLI11.hpp"
#include "separatrix/emit.hpp"
#include "separatrix/errors.hpp"

namespace separatrix {

namespace {

namespace fs = std::filesystem;

struct Options {
    std::string f_text;
    int pmax = 4096;
    std::string out = "-";
    std::string outdir = ".";
    std::string format = "csv";
    int threads = 0;
    bool deterministic = true;
    bool strict = false;
    int p_lo = 0;          // 0 = auto: max(100, pmax/100)
    double A = 2.0;
    double B = 0.9;
    double delta = 0.0;    // 0 = auto: delta rule from the spectrum
    std::string config_path;
};

/* ---- flat config files ----------------------------------------------------
 * CLI11 only reads config files on the root app, and ours lives entirely in
 * subcommands, so the flat `key = value` file is handled here: keys mirror
 * the active subcommand's long flags and explicit flags always win.        */

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string unquote(std::string v) {
    if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') ||
                          (v.front() == '\'' && v.back() == '\'')))
        return v.substr(1, v.size() - 2);
    return v;
}

int cfg_int(const std::string& key, const std::string& v, int lo, int hi) {
    std::size_t pos = 0;
    long n = 0;
    try {
        n = std::stol(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != v.size()) throw error("config", "'" + key + "': expected an integer, got '" + v + "'");
    if (n < lo || n > hi)
        throw error("config", "'" + key + "': " + v + " is outside [" + std::to_string(lo) +
                                  ", " + std::to_string(hi) + "]");
    return int(n);
}

double cfg_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != v.size()) throw error("config", "'" + key + "': expected a number, got '" + v + "'");
    return x;
}

bool cfg_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw error("config", "'" + key + "': expected true or false, got '" + v + "'");
}

void cfg_apply(Options& o, const std::string& key, const std::string& v) {
    if (key == "f")
        o.f_text = v;
    else if (key == "pmax")
        o.pmax = cfg_int(key, v, 2, 1000000);
    else if (key == "out")
        o.out = v;
    else if (key == "outdir")
        o.outdir = v;
    else if (key == "format") {
        if (v != "csv" && v != "json")
            throw error("config", "'format': expected csv or json, got '" + v + "'");
        o.format = v;
    } else if (key == "threads")
        o.threads = cfg_int(key, v, 0, 256);
    else if (key == "deterministic")
        o.deterministic = cfg_bool(key, v);
    else if (key == "strict")
        o.strict = cfg_bool(key, v);
    else if (key == "p-lo")
        o.p_lo = cfg_int(key, v, 0, 1000000);
    else if (key == "A")
        o.A = cfg_double(key, v);
    else if (key == "B")
        o.B = cfg_double(key, v);
    else if (key == "delta")
        o.delta = cfg_double(key, v);
    else
        throw error("config", "'" + key + "' cannot be set from a config file");
}

void read_config(Options& o, CLI::App* sub) {
    std::ifstream in(o.config_path);
    if (!in) throw error("io", "cannot read config file '" + o.config_path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        std::string at = o.config_path + ":" + std::to_string(lineno);
        std::size_t eq = s.find('=');
        if (eq == std::string::npos) throw error("config", at + ": expected key = value");
        std::string key = trim(s.substr(0, eq));
        std::string val = unquote(trim(s.substr(eq + 1)));
        if (key.empty()) throw error("config", at + ": empty key");
        if (key == "config" || sub->get_option_no_throw("--" + key) == nullptr)
            throw error("config",
                        at + ": '" + key + "' is not a flag of subcommand '" + sub->get_name() + "'");
        if (sub->count("--" + key) > 0) continue;  // explicit flag wins
        cfg_apply(o, key, val);
    }
}

struct Run {
    Poly f_raw;
    Kernels kernels;
    RunMeta meta;
    EngineOptions eopt;
};

Run make_run(const Options& o) {
    Run r;
    r.f_raw = parse_poly(o.f_text);
    r.kernels = build_kernels(r.f_raw);
    r.meta = make_meta(r.f_raw, r.kernels, o.pmax, o.deterministic);
    r.eopt.threads = o.threads;
    r.eopt.deterministic = o.deterministic;
    return r;
}

std::ostream& open_out(const std::string& path, std::ofstream& file, std::ostream& stdout_os) {
    if (path == "-") return stdout_os;
    file.open(path, std::ios::binary);
    if (!file) throw error("io", "cannot open '" + path + "' for writing");
    return file;
}

template <class Writer>
void write_file(const fs::path& dir, const char* name, Writer&& writer) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw error("io", "cannot open '" + (dir / name).string() + "' for writing");
    writer(f);
}

const char* verdict_text(Assumption3 a) {
    return a == Assumption3::Holds ? "holds" : a == Assumption3::Fails ? "fails" : "boundary";
}

// non-fatal assumption verdicts become exit 2 only under --strict
int strict_spectrum_gate(const Options& o, const Spectrum& s, std::ostream& err) {
    if (o.strict && s.assumption3 != Assumption3::Holds) {
        err << "error: assumption: assumption 3 " << verdict_text(s.assumption3)
            << " (max Re over nonunit roots crosses 0)\n";
        return 2;
    }
    return 0;
}

/* ---- subcommands --------------------------------------------------------- */

int cmd_kernels(const Options& o, std::ostream& out, std::ostream& err) {
    Run r = make_run(o);
    PositivityResult pos = check_positivity(r.kernels.f1);
    std::ofstream file;
    std::ostream& os = open_out(o.out, file, out);
    if (o.format == "json")
        write_kernels_json(os, r.meta, r.kernels, pos);
    else
        write_kernels_csv(os, r.meta, r.kernels, pos);
    if (o.strict && !pos.passed) {
        err << "error: assumption: f1 is not positive on [0,1] (min " << pos.min_value
            << " near x = " << pos.min_location << ")\n";
        return 2;
    }
    return 0;
}

int cmd_seq(const Options& o, std::ostream& out, std::ostream&) {
    Run r = make_run(o);
    SequenceTable t = compute_sequence(r.kernels, o.pmax, r.eopt);
    std::ofstream file;
    write_seq_csv(open_out(o.out, file, out), r.meta, t);
    return 0;
}

int cmd_spectrum(const Options& o, std::ostream& out, std::ostream& err) {
    Run r = make_run(o);
    Spectrum s = build_spectrum(r.kernels);
    std::ofstream file;
    write_spectrum_json(open_out(o.out, file, out), r.meta, s);
    return strict_spectrum_gate(o, s, err);
}

int cmd_limit(const Options& o, std::ostream& out, std::ostream& err) {
    Run r = make_run(o);
    SequenceTable t = compute_sequence(r.kernels, o.pmax, r.eopt);
    Spectrum s = build_spectrum(r.kernels);
    LimitEstimate e = estimate_a_inf(t, s);
    std::ofstream file;
    std::ostream& os = open_out(o.out, file, out);
    if (o.format == "json")
        write_limit_json(os, r.meta, e);
    else
        write_limit_csv(os, r.meta, e);
    return strict_spectrum_gate(o, s, err);
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
    Run r = make_run(o);
    Spectrum s = build_spectrum(r.kernels);
    double delta = o.delta;
    if (delta <= 0.0) {
        if (!s.delta)
            throw assumption_error(
                "sigma1 >= 0 leaves no admissible delta; pass --delta explicitly");
        delta = *s.delta;
    }
    SequenceTable t = compute_sequence(r.kernels, o.pmax, r.eopt);
    VerificationReport rep = verify_inductive(t, o.A, o.B, delta);
    std::ofstream file;
    write_verify_json(open_out(o.out, file, out), r.meta, rep);
    if (o.strict && !rep.passed) {
        err << "error: assumption: inductive inequalities violated first at p = "
            << rep.violations.front().p << "\n";
        return 2;
    }
    return strict_spectrum_gate(o, s, err);
}

int cmd_fit(const Options& o, std::ostream&, std::ostream& err) {
    Run r = make_run(o);
    SequenceTable t = compute_sequence(r.kernels, o.pmax, r.eopt);
    Spectrum s = build_spectrum(r.kernels);
    AsymptoticFit fit = fit_log_periodic(t, s, o.p_lo);
    fs::path dir(o.outdir);
    fs::create_directories(dir);
    write_file(dir, "fit.csv", [&](std::ostream& os) { write_fit_csv(os, r.meta, t, fit); });
    write_file(dir, "fit.json", [&](std::ostream& os) { write_fit_json(os, r.meta, fit); });
    return strict_spectrum_gate(o, s, err);
}

int cmd_report(const Options& o, std::ostream&, std::ostream& err) {
    Run r = make_run(o);
    SequenceTable t = compute_sequence(r.kernels, o.pmax, r.eopt);
    Spectrum s = build_spectrum(r.kernels);
    ResidualSeries lin = residual_linearized(t, r.kernels);
    ResidualSeries arec = residual_a_recurrence(t, r.kernels);
    LimitEstimate lim = estimate_a_inf(t, s);

    fs::path dir(o.outdir);
    fs::create_directories(dir);
    write_file(dir, "seq.csv", [&](std::ostream& os) { write_seq_csv(os, r.meta, t); });
    write_file(dir, "spectrum.json",
               [&](std::ostream& os) { write_spectrum_json(os, r.meta, s); });
    write_file(dir, "residuals.csv",
               [&](std::ostream& os) { write_residuals_csv(os, r.meta, lin, arec); });
    write_file(dir, "limit.json", [&](std::ostream& os) { write_limit_json(os, r.meta, lim); });
    write_file(dir, "plot_a.gp", [&](std::ostream& os) { write_plot_a(os, r.meta); });
    write_file(dir, "plot_pb.gp", [&](std::ostream& os) { write_plot_pb(os, r.meta); });
    try {
        AsymptoticFit fit = fit_log_periodic(t, s, o.p_lo);
        write_file(dir, "fit.csv", [&](std::ostream& os) { write_fit_csv(os, r.meta, t, fit); });
        write_file(dir, "fit.json",
                   [&](std::ostream& os) { write_fit_json(os, r.meta, fit); });
        write_file(dir, "plot_fit.gp", [&](std::ostream& os) { write_plot_fit(os, r.meta); });
    } catch (const degenerate_fit& e) {
        // the report survives a degenerate fit; the status lands in fit.json
        write_file(dir, "fit.json",
                   [&](std::ostream& os) { write_fit_degenerate_json(os, r.meta, e.what()); });
    }
    return strict_spectrum_gate(o, s, err);
}

}  // namespace

/* ---- entry point ----------------------------------------------------------- */

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"separating solutions of the quadratic convolution recurrence"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    Options o;
    auto add_common = [&](CLI::App* sub) {
        // --f is required, but only after the config file has had its say,
        // so the check lives after parse rather than in CLI11
        sub->add_option("--f", o.f_text,
                        "kernel polynomial: \"6x^2-10x+4\" or \"coeffs:4,-10,6\" (required)");
        sub->add_option("--config", o.config_path, "flat key = value file mirroring the flags");
        sub->add_option("--pmax", o.pmax, "table length")
            ->check(CLI::Range(2, 1000000))
            ->capture_default_str();
        sub->add_option("--threads", o.threads, "worker threads (0 = auto)")
            ->check(CLI::Range(0, 256))
            ->capture_default_str();
        sub->add_flag("--deterministic,!--no-deterministic", o.deterministic,
                      "fixed-shape reductions (outputs identical across thread counts)");
        sub->add_flag("--strict", o.strict, "exit 2 when an assumption verdict is not Holds");
        return sub;
    };
    auto add_out = [&](CLI::App* sub) {
        sub->add_option("--out", o.out, "output file, '-' = stdout")->capture_default_str();
    };
    auto add_outdir = [&](CLI::App* sub) {
        sub->add_option("--outdir", o.outdir, "output directory")->capture_default_str();
    };
    auto add_format = [&](CLI::App* sub) {
        sub->add_option("--format", o.format, "csv | json")
            ->check(CLI::IsMember({"csv", "json"}))
            ->capture_default_str();
    };

    CLI::App* kernels = add_common(app.add_subcommand(
        "kernels", "derive and print f, f1, f2, f3, K and the positivity verdict"));
    add_out(kernels);
    add_format(kernels);

    CLI::App* seq = add_common(
        app.add_subcommand("seq", "run the recurrence and write the sequence table CSV"));
    add_out(seq);

    CLI::App* spectrum = add_common(app.add_subcommand(
        "spectrum", "characteristic roots, sigma-prime, assumption 3 verdict (JSON)"));
    add_out(spectrum);

    CLI::App* limit =
        add_common(app.add_subcommand("limit", "estimate a_inf (raw and extrapolated)"));
    add_out(limit);
    add_format(limit);

    CLI::App* verify = add_common(app.add_subcommand(
        "verify", "check B <= a_p and |a_p - a_{p-1}| <= A/p^(2+delta) (JSON)"));
    add_out(verify);
    verify->add_option("--A", o.A, "decay constant, > 1")->capture_default_str();
    verify->add_option("--B", o.B, "lower bound, in (0,1)")->capture_default_str();
    verify->add_option("--delta", o.delta, "decay exponent offset (0 = rule from spectrum)")
        ->capture_default_str();

    CLI::App* fit = add_common(app.add_subcommand(
        "fit", "log-periodic fit of the rescaled b_p; writes fit.csv and fit.json"));
    add_outdir(fit);
    fit->add_option("--p-lo", o.p_lo, "fit window start (0 = max(100, pmax/100))")
        ->check(CLI::Range(0, 1000000))
        ->capture_default_str();

    CLI::App* report = add_common(app.add_subcommand(
        "report", "run everything: seq.csv, spectrum.json, residuals.csv, fit.csv, "
                  "limit.json and plot scripts"));
    add_outdir(report);
    report->add_option("--p-lo", o.p_lo, "fit window start (0 = max(100, pmax/100))")
        ->check(CLI::Range(0, 1000000))
        ->capture_default_str();

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("separatrix");
    for (const std::string& a : args) argv.push_back(a.c_str());

    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: usage: " << e.what() << "\n";
        return 1;
    }

    try {
        CLI::App* sub = app.get_subcommands().at(0);
        if (!o.config_path.empty()) read_config(o, sub);
        if (o.f_text.empty()) throw error("usage", "--f is required");
        if (sub == kernels) return cmd_kernels(o, out, err);
        if (sub == seq) return cmd_seq(o, out, err);
        if (sub == spectrum) return cmd_spectrum(o, out, err);
        if (sub == limit) return cmd_limit(o, out, err);
        if (sub == verify) return cmd_verify(o, out, err);
        if (sub == fit) return cmd_fit(o, out, err);
        return cmd_report(o, out, err);
    } catch (const assumption_error& e) {
        err << "error: " << e.code() << ": " << e.what() << "\n";
        return 2;
    } catch (const inconclusive_error& e) {
        err << "error: " << e.code() << ": " << e.what() << "\n";
        return 2;
    } catch (const numeric_error& e) {
        err << "error: " << e.code() << ": " << e.what() << "\n";
        return 3;
    } catch (const error& e) {  // parse, precondition, kernel, io
        err << "error: " << e.code() << ": " << e.what() << "\n";
        return 1;
    } catch (const fs::filesystem_error& e) {  // unusable --out / --outdir
        err << "error: io: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: internal: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace separatrix
