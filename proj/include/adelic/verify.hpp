#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "adelic/config.hpp"
#include "adelic/heat_kernel.hpp"

namespace adelic {

struct CheckResult {
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    nlohmann::json detail;
};

// Names accepted by run_check, in execution order.
const std::vector<std::string>& verification_checks();

// Throws UsageError for an unknown name.
CheckResult run_check(const std::string& name, const RunConfig& cfg);

// Runs cfg.checks (all checks when empty). {"schema_version": 1, "checks": [...], "passed": bool}
nlohmann::json run_verification(const RunConfig& cfg);

nlohmann::json to_json(const CheckResult& r);

// Z at ||x|| = p^m on Q_p summed sphere by sphere with powers of p, without
// the filtration machinery.
double padic_kernel_bruteforce(unsigned p, double alpha, int m, double t);

// Z at ||x|| = e^{psi(m)} as sum_n E_n int_{S_n} chi(-xi x) dxi.
double sphere_decomposition_kernel(const HeatKernelFin& kernel, int m, double t);

// Max deviation, relative to the largest expected value, between the FFT
// inverse of exp(-t e^{alpha psi(n)}) 1_{S_n} and the scaled eigenfunction.
struct EigenpairError {
    double max_abs = 0.0;
    double max_expected = 0.0;
    std::size_t dimension = 0;
};
EigenpairError eigenpair_fft_error(const FiltrationPtr& f, int n, double alpha, double t);

}  // namespace adelic
