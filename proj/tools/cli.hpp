#pragma once

// Command-line front end: run configs, reports and verification suites.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "io.hpp"

namespace tyurin::cli {

// Input that parses but fails a mathematical requirement: exit code 2.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::filesystem::path curve, bundle, divisor, divisor_alt, germs, tangents, output;
    std::filesystem::path fixtures;
    std::optional<double> tol, fd_step;
    int resolution = 0;                // Gauss-Legendre order override; 0 keeps the curve file's
    Json options = Json::object();     // command-specific settings
};

// Lazily loaded inputs of one run.
class Session {
public:
    explicit Session(RunConfig cfg) : cfg_(std::move(cfg)) {}

    const RunConfig& config() const { return cfg_; }
    const CurveContext& ctx();
    NormalForm bundle();
    DivisorSpec divisor();
    std::optional<DivisorSpec> divisor_alt();
    Germs germs(int n);  // empty without a germ file
    std::vector<ConnectionTangent> tangents(int n, std::size_t at_least);
    double fd_step(double fallback) const { return cfg_.fd_step.value_or(fallback); }

private:
    static std::filesystem::path require(const std::filesystem::path& p, const char* what);

    RunConfig cfg_;
    std::unique_ptr<CurveContext> ctx_;
};

// Named checks against bounds; the run passes iff every check passes.
class Report {
public:
    Report(std::string kind, std::string name, std::optional<double> tol_override = {});

    Json results = Json::object();

    // value <= bound; a tolerance override replaces the bound.
    void below(const std::string& name, double value, double bound);
    // value >= bound (not affected by the override).
    void above(const std::string& name, double value, double bound);
    void positive(const std::string& name, double value);
    void equal(const std::string& name, long value, long expected);
    void error(const std::string& name, const std::exception& e);

    bool pass() const { return pass_; }
    Json json() const;

private:
    void add(Json check, bool ok);

    std::string kind_, name_;
    std::optional<double> tol_;
    Json checks_ = Json::array();
    bool pass_ = true;
};

const std::vector<std::string>& suite_names();
// Runs the invariants of one module on the reference fixtures.
Report verify_suite(const std::string& name, const std::filesystem::path& fixtures, int resolution = 0);

// Returns the process exit code: 0 all checks pass, 2 validation failure, 1 usage error.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tyurin::cli
