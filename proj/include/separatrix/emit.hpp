#pragma once

#include <ostream>
#include <string>

#include "separatrix/asymptotics.hpp"

namespace separatrix {

inline constexpr const char* kVersion = "0.1.0";

/* What every output file records about the run it came from.  Deliberately
 * excludes thread count and output paths so that outputs are byte-identical
 * across schedules and relocatable across directories. */
struct RunMeta {
    std::string kernel;  // canonical form of the raw input polynomial
    std::string f;       // canonical form of the normalized kernel
    double K = 1;
    std::string variant = "symmetrized";
    int pmax = 0;
    bool deterministic = true;
};

RunMeta make_meta(const Poly& f_raw, const Kernels& k, int pmax, bool deterministic);

// CSV: '#'-comment metadata block, header row, then one row per p with
// numbers at 17 significant digits ("%.17g", C locale).
void write_seq_csv(std::ostream& os, const RunMeta& m, const SequenceTable& t);
void write_residuals_csv(std::ostream& os, const RunMeta& m, const ResidualSeries& lin,
                         const ResidualSeries& arec);
void write_fit_csv(std::ostream& os, const RunMeta& m, const SequenceTable& t,
                   const AsymptoticFit& fit);

// stdout forms of the `kernels` subcommand ("csv" = key,value rows)
void write_kernels_csv(std::ostream& os, const RunMeta& m, const Kernels& k,
                       const PositivityResult& pos);
void write_kernels_json(std::ostream& os, const RunMeta& m, const Kernels& k,
                        const PositivityResult& pos);

void write_limit_csv(std::ostream& os, const RunMeta& m, const LimitEstimate& e);
void write_limit_json(std::ostream& os, const RunMeta& m, const LimitEstimate& e);

void write_spectrum_json(std::ostream& os, const RunMeta& m, const Spectrum& s);
void write_verify_json(std::ostream& os, const RunMeta& m, const VerificationReport& r);
void write_fit_json(std::ostream& os, const RunMeta& m, const AsymptoticFit& fit);
// report's stand-in when the fit is degenerate (sigma_prime empty etc.)
void write_fit_degenerate_json(std::ostream& os, const RunMeta& m, const std::string& reason);

// plain-text gnuplot scripts referencing the CSVs by bare relative name
void write_plot_a(std::ostream& os, const RunMeta& m);
void write_plot_pb(std::ostream& os, const RunMeta& m);
void write_plot_fit(std::ostream& os, const RunMeta& m);

}  // namespace separatrix
