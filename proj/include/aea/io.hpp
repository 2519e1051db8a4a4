#pragma once

#include <cstdint>
#include <ostream>
#include <string>

#include "aea/arbitrage.hpp"
#include "aea/engine.hpp"
#include "aea/ergodic.hpp"
#include "aea/ldp.hpp"
#include "aea/utility.hpp"
#include "aea/verify.hpp"

namespace aea {

inline constexpr const char* kToolName = "aea-lab";
inline constexpr const char* kToolVersion = "0.1.0";

/// Shortest round-trip decimal form ("%.17g"); "inf", "-inf", "nan" otherwise.
std::string format_number(double v);

/// "# aea-lab <version> seed=<seed>"
void write_preamble(std::ostream& os, std::uint64_t seed);

// Every CSV below starts with the preamble and a header row.

void write_ensemble_csv(std::ostream& os, const PathEnsemble& ensemble);
void write_ergodic_csv(std::ostream& os, const ErgodicReport& report, std::uint64_t seed);
void write_histogram_csv(std::ostream& os, const InvariantHistogram& hist, std::uint64_t seed);
void write_scgf_csv(std::ostream& os, const ScgfCurve& curve, std::uint64_t seed);
void write_rate_csv(std::ostream& os, const RateFunction& rate, std::uint64_t seed);
void write_gdpf_csv(std::ostream& os, const GdpfReport& report, std::uint64_t seed);
void write_gdpf_summary(std::ostream& os, const GdpfReport& report, std::uint64_t seed);
/// Two columns "t log_p" for the non-zero estimates; gnuplot-ready.
void write_gdpf_plot(std::ostream& os, const GdpfReport& report, std::uint64_t seed);
void write_utility_csv(std::ostream& os, const UtilityReport& report, std::uint64_t seed);
void write_utility_summary(std::ostream& os, const UtilityReport& report, std::uint64_t seed);
void write_margin_csv(std::ostream& os, const DriftCertificate& cert, std::uint64_t seed);
void write_certificate_summary(std::ostream& os, const DriftCertificate& cert,
                               std::uint64_t seed);

/// Human-readable assumption audit.
void write_assumption_report(std::ostream& os, const AssumptionReport& report,
                             const std::string& model_name);

}  // namespace aea
