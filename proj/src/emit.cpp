#include "separatrix/emit.hpp"

#include <cmath>
#include <cstdio>

#include "json.hpp"

namespace separatrix {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string f17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const char* variant_name(KernelVariant v) {
    return v == KernelVariant::Symmetrized ? "symmetrized" : "plain_f";
}

const char* verdict_name(Assumption3 a) {
    switch (a) {
        case Assumption3::Holds: return "holds";
        case Assumption3::Fails: return "fails";
        default: return "boundary";
    }
}

constexpr const char* kDeltaRule = "min(1/4, -sigma1/2)";

void meta_comments(std::ostream& os, const RunMeta& m) {
    os << "# separatrix " << kVersion << "\n";
    os << "# kernel: " << m.kernel << "\n";
    os << "# f: " << m.f << "\n";
    os << "# K: " << f17(m.K) << "\n";
    os << "# variant: " << m.variant << "\n";
    os << "# pmax: " << m.pmax << "\n";
    os << "# deterministic: " << (m.deterministic ? "true" : "false") << "\n";
    os << "# delta_rule: " << kDeltaRule << "\n";
}

ordered_json meta_json(const RunMeta& m) {
    ordered_json j;
    j["version"] = kVersion;
    j["kernel"] = m.kernel;
    j["f"] = m.f;
    j["K"] = m.K;
    j["variant"] = m.variant;
    j["pmax"] = m.pmax;
    j["deterministic"] = m.deterministic;
    j["delta_rule"] = kDeltaRule;
    return j;
}

void dump(std::ostream& os, const ordered_json& j) { os << j.dump(2) << "\n"; }

ordered_json complex_json(std::complex<double> z) {
    ordered_json j;
    j["re"] = z.real();
    j["im"] = z.imag();
    return j;
}

}  // namespace

RunMeta make_meta(const Poly& f_raw, const Kernels& k, int pmax, bool deterministic) {
    RunMeta m;
    m.kernel = render(f_raw);
    m.f = render(k.f);
    m.K = k.K;
    m.variant = variant_name(k.variant);
    m.pmax = pmax;
    m.deterministic = deterministic;
    return m;
}

/* ---- CSV ----------------------------------------------------------------- */

void write_seq_csv(std::ostream& os, const RunMeta& m, const SequenceTable& t) {
    meta_comments(os, m);
    os << "p,log_lambda,a,b\n";
    for (int p = 1; p <= t.pmax; ++p) {
        os << p << ',' << f17(t.log_lambda[std::size_t(p)]) << ',' << f17(t.a[std::size_t(p)])
           << ',';
        if (p >= 2) os << f17(t.b[std::size_t(p)]);
        os << '\n';
    }
}

void write_residuals_csv(std::ostream& os, const RunMeta& m, const ResidualSeries& lin,
                         const ResidualSeries& arec) {
    meta_comments(os, m);
    os << "# fit_lo: " << lin.fit_lo << "\n";
    os << "# decay_exponent_linearized: " << f17(lin.fitted_decay_exponent) << "\n";
    os << "# decay_exponent_a_recurrence: " << f17(arec.fitted_decay_exponent) << "\n";
    os << "p,residual_linearized,residual_a_recurrence\n";
    for (int p = lin.p_lo; p <= lin.p_hi; ++p)
        os << p << ',' << f17(lin.r[std::size_t(p)]) << ',' << f17(arec.r[std::size_t(p)])
           << '\n';
}

void write_fit_csv(std::ostream& os, const RunMeta& m, const SequenceTable& t,
                   const AsymptoticFit& fit) {
    meta_comments(os, m);
    os << "# p_lo: " << fit.p_lo << "\n";
    os << "# sigma: " << f17(fit.sigma.real()) << (fit.sigma.imag() < 0 ? "" : "+")
       << f17(fit.sigma.imag()) << "i\n";
    os << "# amplitude: " << f17(fit.amplitude) << "\n";
    os << "# phase: " << f17(fit.phase) << "\n";
    os << "# rms_error: " << f17(fit.rms_error) << "\n";
    os << "# zero_interlacing: " << (fit.zero_interlacing ? "true" : "false") << "\n";
    os << "p,b_rescaled,cos_ref\n";
    const double nu = std::fabs(fit.sigma.imag());
    for (int p = fit.p_lo; p <= fit.p_hi; ++p) {
        double lp = std::log(double(p));
        double resc = t.b[std::size_t(p)] * std::pow(double(p), -fit.sigma.real());
        double ref = std::cos(nu * lp);
        os << p << ',' << f17(resc) << ',' << f17(ref) << '\n';
    }
}

/* ---- kernels / limit stdout forms ----------------------------------------- */

void write_kernels_csv(std::ostream& os, const RunMeta& m, const Kernels& k,
                       const PositivityResult& pos) {
    meta_comments(os, m);
    os << "key,value\n";
    os << "K," << f17(k.K) << '\n';
    os << "f," << render(k.f) << '\n';
    os << "f1," << render(k.f1) << '\n';
    os << "f2," << render(k.f2) << '\n';
    os << "f3," << render(k.f3) << '\n';
    os << "positivity_min," << f17(pos.min_value) << '\n';
    os << "positivity_at," << f17(pos.min_location) << '\n';
    os << "positivity_passed," << (pos.passed ? "true" : "false") << '\n';
}

void write_kernels_json(std::ostream& os, const RunMeta& m, const Kernels& k,
                        const PositivityResult& pos) {
    ordered_json j;
    j["meta"] = meta_json(m);
    j["K"] = k.K;
    j["f"] = render(k.f);
    j["f1"] = render(k.f1);
    j["f2"] = render(k.f2);
    j["f3"] = render(k.f3);
    j["positivity"] = {{"min", pos.min_value}, {"at", pos.min_location}, {"passed", pos.passed}};
    dump(os, j);
}

void write_limit_csv(std::ostream& os, const RunMeta& m, const LimitEstimate& e) {
    meta_comments(os, m);
    os << "raw,extrapolated,uncertainty,sigma_re,sigma_im,window_lo,window_hi,oscillatory\n";
    os << f17(e.raw) << ',' << f17(e.extrapolated) << ',' << f17(e.uncertainty) << ','
       << f17(e.sigma.real()) << ',' << f17(e.sigma.imag()) << ',' << e.window_lo << ','
       << e.window_hi << ',' << (e.oscillatory_model ? "true" : "false") << '\n';
}

void write_limit_json(std::ostream& os, const RunMeta& m, const LimitEstimate& e) {
    ordered_json j;
    j["meta"] = meta_json(m);
    j["raw"] = e.raw;
    j["extrapolated"] = e.extrapolated;
    j["uncertainty"] = e.uncertainty;
    j["oscillatory_model"] = e.oscillatory_model;
    j["sigma"] = complex_json(e.sigma);
    j["window"] = {e.window_lo, e.window_hi};
    dump(os, j);
}

/* ---- JSON reports ---------------------------------------------------------- */

void write_spectrum_json(std::ostream& os, const RunMeta& m, const Spectrum& s) {
    ordered_json j;
    j["meta"] = meta_json(m);
    j["char_poly"] = ordered_json::array();
    for (double c : s.characteristic.coeffs()) j["char_poly"].push_back(c);
    j["roots"] = ordered_json::array();
    for (const RootInfo& r : s.all_roots) {
        ordered_json rj = complex_json(r.value);
        rj["multiplicity"] = r.multiplicity;
        rj["residual"] = r.residual;
        j["roots"].push_back(std::move(rj));
    }
    j["sigma_prime"] = ordered_json::array();
    for (std::complex<double> v : s.sigma_prime) j["sigma_prime"].push_back(complex_json(v));
    j["sigma1"] = s.sigma1;
    if (s.delta)
        j["delta"] = *s.delta;
    else
        j["delta"] = nullptr;
    j["assumption3"] = verdict_name(s.assumption3);
    dump(os, j);
}

void write_verify_json(std::ostream& os, const RunMeta& m, const VerificationReport& r) {
    ordered_json j;
    j["meta"] = meta_json(m);
    j["A"] = r.A;
    j["B"] = r.B;
    j["delta"] = r.delta;
    j["passed"] = r.passed;
    j["p0"] = r.p0;
    j["minimal_A"] = r.minimal_A;
    j["violations"] = ordered_json::array();
    for (const Violation& v : r.violations) {
        ordered_json vj;
        vj["p"] = v.p;
        vj["which"] = v.which == ViolationKind::LowerBoundB ? "lower_bound_B" : "decay_A";
        vj["lhs"] = v.lhs;
        vj["rhs"] = v.rhs;
        j["violations"].push_back(std::move(vj));
    }
    dump(os, j);
}

void write_fit_json(std::ostream& os, const RunMeta& m, const AsymptoticFit& fit) {
    ordered_json j;
    j["meta"] = meta_json(m);
    j["status"] = "ok";
    j["sigma"] = complex_json(fit.sigma);
    j["amplitude"] = fit.amplitude;
    j["phase"] = fit.phase;
    j["rms_error"] = fit.rms_error;
    j["zero_interlacing"] = fit.zero_interlacing;
    j["window"] = {fit.p_lo, fit.p_hi};
    dump(os, j);
}

void write_fit_degenerate_json(std::ostream& os, const RunMeta& m, const std::string& reason) {
    ordered_json j;
    j["meta"] = meta_json(m);
    j["status"] = "degenerate";
    j["reason"] = reason;
    dump(os, j);
}

/* ---- plot scripts ----------------------------------------------------------- */

void write_plot_a(std::ostream& os, const RunMeta& m) {
    meta_comments(os, m);
    os << "set datafile separator ','\n"
          "set logscale x\n"
          "set xlabel 'p'\n"
          "set ylabel 'a_p'\n"
          "plot 'seq.csv' every ::1 using 1:3 with lines title 'a_p'\n";
}

void write_plot_pb(std::ostream& os, const RunMeta& m) {
    meta_comments(os, m);
    os << "set datafile separator ','\n"
          "set logscale x\n"
          "set xlabel 'p'\n"
          "set ylabel 'p b_p'\n"
          "plot 'seq.csv' every ::1 using 1:($1*$4) with lines title 'p b_p'\n";
}

void write_plot_fit(std::ostream& os, const RunMeta& m) {
    meta_comments(os, m);
    os << "set datafile separator ','\n"
          "set logscale x\n"
          "set xlabel 'p'\n"
          "set ylabel 'rescaled b_p'\n"
          "plot 'fit.csv' every ::1 using 1:2 with points title 'b_p p^{-Re sigma}', \\\n"
          "     'fit.csv' every ::1 using 1:3 with lines title 'cos({/Symbol n} ln p)'\n";
}

}  // namespace separatrix
