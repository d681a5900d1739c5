#include "cli_app.hpp"

#include <atomic>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "indefspec/indefspec.hpp"

#ifndef INDEFSPEC_VERSION
#define INDEFSPEC_VERSION "unknown"
#endif

namespace indefspec::cli {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) {
        return s;
    }
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolverFailure : std::runtime_error {
    SolverFailure(ModeIndex index, const std::string& what)
        : std::runtime_error("solver error at " + detail::mode_label(index.n, index.m) + ": " +
                             what) {}
};

std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

std::string json_complex(cplx z) {
    return "{\"re\": " + format_double(z.real()) + ", \"im\": " + format_double(z.imag()) + "}";
}

std::string iso_timestamp() {
    std::time_t t = 0;
    if (const char* env = std::getenv("SOURCE_DATE_EPOCH"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        errno = 0;
        const long long v = std::strtoll(env, &end, 10);
        if (errno != 0 || *end != '\0' || v < 0) {
            throw UsageError("SOURCE_DATE_EPOCH must be a non-negative integer");
        }
        t = static_cast<std::time_t>(v);
    } else {
        t = std::time(nullptr);
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

unsigned thread_cap() {
    const char* env = std::getenv("INDEFSPEC_THREADS");
    long v = 0;
    if (env != nullptr && *env != '\0') {
        char* end = nullptr;
        v = std::strtol(env, &end, 10);
        if (*end != '\0' || v < 0) {
            throw UsageError("INDEFSPEC_THREADS must be a non-negative integer");
        }
    }
    if (v == 0) {
        return std::max(1u, std::thread::hardware_concurrency());
    }
    return static_cast<unsigned>(v);
}

struct Context {
    std::string command;
    SolverConfig config;
    std::ostream* out = nullptr;
    std::ostream* err = nullptr;
};

// "manifest": {...} body with the given indent for its fields.
std::string manifest_json(const Context& ctx, const std::string& pad) {
    const SolverConfig& c = ctx.config;
    std::string grids;
    for (std::size_t i = 0; i < c.fd_grid_sizes.size(); ++i) {
        grids += (i ? ", " : "") + std::to_string(c.fd_grid_sizes[i]);
    }
    const std::string p2 = pad + "  ";
    const std::string p3 = p2 + "  ";
    std::ostringstream os;
    os << "{\n"
       << p2 << "\"command\": " << json_string(ctx.command) << ",\n"
       << p2 << "\"config\": {\n"
       << p3 << "\"residual_tol\": " << format_double(c.residual_tol) << ",\n"
       << p3 << "\"polish_residual_tol\": " << format_double(c.polish_residual_tol) << ",\n"
       << p3 << "\"bracket_width_tol\": " << format_double(c.bracket_width_tol) << ",\n"
       << p3 << "\"quad_rel_tol\": " << format_double(c.quad_rel_tol) << ",\n"
       << p3 << "\"pole_exclusion\": " << format_double(c.pole_exclusion) << ",\n"
       << p3 << "\"fd_grid_sizes\": [" << grids << "],\n"
       << p3 << "\"continuation_steps\": " << c.continuation_steps << ",\n"
       << p3 << "\"max_step_halvings\": " << c.max_step_halvings << "\n"
       << p2 << "},\n"
       << p2 << "\"tool_version\": " << json_string(INDEFSPEC_VERSION) << ",\n"
       << p2 << "\"timestamp\": " << json_string(iso_timestamp()) << "\n"
       << pad << "}";
    return os.str();
}

// Writes `body` to --out or to the context's data stream.
void emit(const Context& ctx, const std::string& path, const std::string& body) {
    if (path.empty()) {
        *ctx.out << body;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw UsageError("cannot open output file " + path);
    }
    f << body;
    if (!f) {
        throw UsageError("failed writing " + path);
    }
}

// CSV outputs carry their manifest in a JSON sidecar (or on the diagnostic
// stream when writing to stdout).
void emit_csv_with_sidecar(const Context& ctx, const std::string& path, const std::string& csv,
                           const std::string& extra_json_fields = {}) {
    const std::string sidecar = "{\n  \"manifest\": " + manifest_json(ctx, "  ") +
                                extra_json_fields + "\n}\n";
    emit(ctx, path, csv);
    if (path.empty()) {
        *ctx.err << sidecar;
    } else {
        emit(ctx, path + ".manifest.json", sidecar);
    }
}

cplx checked_delta(double re, double im) {
    const cplx d(re, im);
    if (!std::isfinite(re) || !std::isfinite(im)) {
        throw UsageError("delta must be finite");
    }
    if (std::abs(d) > kMaxDelta) {
        throw UsageError(std::string(to_string(ErrorKind::DeltaOutOfRange)) + ": |delta| = " +
                         format_double(std::abs(d)) + " exceeds 0.38");
    }
    return d;
}

Eigenvalue solve_at(ModeIndex index, cplx delta, const SolverConfig& config) {
    try {
        const Eigenvalue e = solve_mode(index, config);
        if (delta == cplx(0.0, 0.0)) {
            return e;
        }
        return continue_to_delta(e, delta, config.continuation_steps, config);
    } catch (const Error& e) {
        throw SolverFailure(index, e.what());
    }
}

// ---------------------------------------------------------------- spectrum

struct SpectrumOptions {
    int n_max = 3;
    int m_max = 5;
    double delta_re = 0.0;
    double delta_im = 0.0;
    std::string format = "json";
    std::string out;
};

std::vector<Eigenvalue> spectrum_records(const SpectrumOptions& o, cplx delta,
                                         const SolverConfig& config) {
    std::vector<std::vector<Eigenvalue>> per_n(static_cast<std::size_t>(o.n_max));
    std::vector<std::exception_ptr> failures(per_n.size());
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < o.n_max; i = next++) {
            try {
                for (int m = -o.m_max; m <= o.m_max; ++m) {
                    per_n[i].push_back(solve_at({i + 1, m}, delta, config));
                }
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    const unsigned count = std::min<unsigned>(thread_cap(), static_cast<unsigned>(o.n_max));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < count; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::vector<Eigenvalue> records;
    for (std::size_t i = 0; i < per_n.size(); ++i) {
        if (failures[i]) std::rethrow_exception(failures[i]);
        records.insert(records.end(), per_n[i].begin(), per_n[i].end());
    }
    return records;
}

int cmd_spectrum(const Context& ctx, const SpectrumOptions& o) {
    const cplx delta = checked_delta(o.delta_re, o.delta_im);
    const auto records = spectrum_records(o, delta, ctx.config);
    std::ostringstream os;
    if (o.format == "csv") {
        os << "n,m,delta_re,delta_im,lambda_re,lambda_im,residual,source\n";
        for (const auto& r : records) {
            os << r.index.n << ',' << r.index.m << ',' << format_double(r.delta.real()) << ','
               << format_double(r.delta.imag()) << ',' << format_double(r.value.real()) << ','
               << format_double(r.value.imag()) << ',' << format_double(r.residual) << ','
               << csv_field(std::string(to_string(r.source))) << '\n';
        }
        emit_csv_with_sidecar(ctx, o.out, os.str());
        return kExitOk;
    }
    os << "{\n  \"manifest\": " << manifest_json(ctx, "  ") << ",\n  \"records\": [";
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        os << (i ? ",\n" : "\n") << "    {\"n\": " << r.index.n << ", \"m\": " << r.index.m
           << ", \"delta\": " << json_complex(r.delta) << ", \"lambda\": " << json_complex(r.value)
           << ", \"residual\": " << format_double(r.residual)
           << ", \"source\": " << json_string(std::string(to_string(r.source))) << "}";
    }
    os << (records.empty() ? "]\n}\n" : "\n  ]\n}\n");
    emit(ctx, o.out, os.str());
    return kExitOk;
}

// ------------------------------------------------------------------- modes

struct ModesOptions {
    int n = 1;
    int m = 0;
    double delta_re = 0.0;
    double delta_im = 0.0;
    int grid = 201;
    std::string out;
};

int cmd_modes(const Context& ctx, const ModesOptions& o) {
    const cplx delta = checked_delta(o.delta_re, o.delta_im);
    const ModeIndex index{o.n, o.m};
    const Eigenvalue e = solve_at(index, delta, ctx.config);
    ModeSpec spec;
    try {
        spec = make_mode_spec(e, ctx.config);
    } catch (const Error& ex) {
        throw SolverFailure(index, ex.what());
    }
    std::ostringstream os;
    os << "x,y,re,im\n";
    const int K = o.grid;
    for (int i = 0; i < K; ++i) {
        const double x = i == K - 1 ? 1.0 : -1.0 + 2.0 * i / (K - 1);
        for (int j = 0; j < K; ++j) {
            const double y = j == K - 1 ? 1.0 : static_cast<double>(j) / (K - 1);
            const cplx v = f2d(spec, x, y);
            os << format_double(x) << ',' << format_double(y) << ',' << format_double(v.real())
               << ',' << format_double(v.imag()) << '\n';
        }
    }
    std::ostringstream mode;
    mode << ",\n  \"mode\": {\"n\": " << o.n << ", \"m\": " << o.m
         << ", \"delta\": " << json_complex(delta) << ", \"lambda\": " << json_complex(e.value)
         << ", \"normalization\": " << json_complex(spec.normalization)
         << ", \"residual\": " << format_double(e.residual)
         << ", \"source\": " << json_string(std::string(to_string(e.source)))
         << ", \"grid\": " << K << "}";
    emit_csv_with_sidecar(ctx, o.out, os.str(), mode.str());
    return kExitOk;
}

// ------------------------------------------------------------------- trace

struct TraceOptions {
    int n = 1;
    int m = 1;
    std::string delta_path;
    std::vector<double> eta;
    std::vector<double> epsilon;
    std::string format = "csv";
    std::string out;
};

double parse_number(const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw UsageError("not a number: '" + text + "'");
    }
    while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
    if (used != text.size() || !std::isfinite(v)) {
        throw UsageError("not a number: '" + text + "'");
    }
    return v;
}

std::vector<cplx> parse_delta_path(const std::string& path) {
    std::vector<cplx> deltas;
    std::stringstream ss(path);
    std::string item;
    while (std::getline(ss, item, ';')) {
        if (item.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        const auto comma = item.find(',');
        if (comma == std::string::npos) {
            throw UsageError("delta-path entries are 're,im'; got '" + item + "'");
        }
        deltas.emplace_back(parse_number(item.substr(0, comma)),
                            parse_number(item.substr(comma + 1)));
    }
    return deltas;
}

int cmd_trace(const Context& ctx, const TraceOptions& o) {
    const int sources = static_cast<int>(!o.delta_path.empty()) + static_cast<int>(!o.eta.empty()) +
                        static_cast<int>(!o.epsilon.empty());
    if (sources != 1) {
        throw UsageError("give exactly one non-empty --delta-path, --eta-sequence or --epsilon-sequence");
    }
    std::vector<double> parameters;
    std::vector<cplx> deltas;
    if (!o.delta_path.empty()) {
        deltas = parse_delta_path(o.delta_path);
        for (cplx d : deltas) parameters.push_back(std::abs(d));
    } else if (!o.eta.empty()) {
        parameters = o.eta;
        for (double eta : o.eta) deltas.push_back(delta_from_eta(eta));
    } else {
        parameters = o.epsilon;
        for (double eps : o.epsilon) deltas.push_back(delta_from_epsilon(eps));
    }
    if (deltas.empty()) {
        throw UsageError("empty delta path");
    }
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        checked_delta(deltas[i].real(), deltas[i].imag());
        if (i > 0 && std::abs(deltas[i]) > std::abs(deltas[i - 1])) {
            throw UsageError("delta path must be non-increasing in |delta|");
        }
    }

    const ModeIndex index{o.n, o.m};
    std::vector<ConvergenceRow> rows;
    std::vector<double> psi_distance;
    Eigenvalue seed;
    try {
        seed = solve_mode(index, ctx.config);
        rows = convergence_study(index, deltas, ctx.config);
        const ModeSpec base = make_mode_spec(seed, ctx.config);
        for (const auto& row : rows) {
            const ModeSpec spec{index, row.delta, row.lambda_delta,
                                normalization_constant(index, row.lambda_delta, row.delta,
                                                       ctx.config)};
            psi_distance.push_back(eigenfunction_sup_distance(spec, base));
        }
    } catch (const Error& e) {
        throw SolverFailure(index, e.what());
    }

    std::ostringstream os;
    if (o.format == "json") {
        os << "{\n  \"manifest\": " << manifest_json(ctx, "  ") << ",\n  \"mode\": {\"n\": "
           << o.n << ", \"m\": " << o.m << ", \"lambda\": " << json_complex(seed.value)
           << "},\n  \"records\": [";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            os << (i ? ",\n" : "\n") << "    {\"parameter\": " << format_double(parameters[i])
               << ", \"delta\": " << json_complex(rows[i].delta)
               << ", \"lambda\": " << json_complex(rows[i].lambda_delta)
               << ", \"error\": " << format_double(rows[i].error)
               << ", \"psi_sup_distance\": " << format_double(psi_distance[i]) << "}";
        }
        os << "\n  ]\n}\n";
        emit(ctx, o.out, os.str());
        return kExitOk;
    }
    os << "parameter,delta_re,delta_im,lambda_re,lambda_im,error,psi_sup_distance\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        os << format_double(parameters[i]) << ',' << format_double(rows[i].delta.real()) << ','
           << format_double(rows[i].delta.imag()) << ','
           << format_double(rows[i].lambda_delta.real()) << ','
           << format_double(rows[i].lambda_delta.imag()) << ',' << format_double(rows[i].error)
           << ',' << format_double(psi_distance[i]) << '\n';
    }
    emit_csv_with_sidecar(ctx, o.out, os.str());
    return kExitOk;
}

// ---------------------------------------------------------------- validate

struct ValidateOptions {
    std::string level = "quick";
    std::string format = "text";
    std::string out;
};

int cmd_validate(const Context& ctx, const ValidateOptions& o) {
    const auto level = o.level == "full" ? ValidationLevel::Full : ValidationLevel::Quick;
    const auto results = run_validation(level, ctx.config);
    const bool all_passed = std::all_of(results.begin(), results.end(),
                                        [](const CheckResult& r) { return r.passed; });
    std::ostringstream os;
    if (o.format == "json") {
        os << "{\n  \"manifest\": " << manifest_json(ctx, "  ") << ",\n  \"level\": "
           << json_string(o.level) << ",\n  \"passed\": " << (all_passed ? "true" : "false")
           << ",\n  \"records\": [";
        for (std::size_t i = 0; i < results.size(); ++i) {
            const auto& r = results[i];
            os << (i ? ",\n" : "\n") << "    {\"id\": " << json_string(r.id)
               << ", \"name\": " << json_string(r.name)
               << ", \"passed\": " << (r.passed ? "true" : "false")
               << ", \"measured\": " << json_string(format_double(r.measured))
               << ", \"threshold\": " << format_double(r.threshold)
               << ", \"seconds\": " << format_double(r.seconds)
               << ", \"detail\": " << json_string(r.detail) << "}";
        }
        os << "\n  ]\n}\n";
    } else {
        os << "# indefspec " << INDEFSPEC_VERSION << " validate --level " << o.level << "\n"
           << "# command: " << ctx.command << "\n"
           << "# timestamp: " << iso_timestamp() << "\n";
        for (const auto& r : results) {
            char line[160];
            std::snprintf(line, sizeof line, "%-4s %-14s measured=%-13.6g threshold=%-10.3g %7.3fs  ",
                          r.passed ? "PASS" : "FAIL", r.id.c_str(), r.measured, r.threshold,
                          r.seconds);
            os << line << r.name << " [" << r.detail << "]\n";
        }
        os << (all_passed ? "all checks passed\n" : "some checks FAILED\n");
    }
    emit(ctx, o.out, os.str());
    return all_passed ? kExitOk : kExitValidationFailure;
}

void add_delta_flags(CLI::App* sub, double& re, double& im) {
    sub->add_option("--delta-re", re, "real part of delta")->capture_default_str();
    sub->add_option("--delta-im", im, "imaginary part of delta")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spectra and eigenfunctions of the indefinite Laplacian on (-1,1)x(0,1)",
                 "indefspec"};
    app.set_version_flag("--version", INDEFSPEC_VERSION);
    app.set_config("--config", "", "key=value config file; command-line flags take precedence");
    app.require_subcommand(1);
    app.fallthrough();

    Context ctx;
    ctx.out = &out;
    ctx.err = &err;
    SolverConfig& c = ctx.config;
    app.add_option("--residual-tol", c.residual_tol, "max |H| accepted at a root")
        ->capture_default_str();
    app.add_option("--polish-residual-tol", c.polish_residual_tol)->capture_default_str();
    app.add_option("--bracket-width-tol", c.bracket_width_tol)->capture_default_str();
    app.add_option("--quad-rel-tol", c.quad_rel_tol)->capture_default_str();
    app.add_option("--pole-exclusion", c.pole_exclusion)->capture_default_str();
    app.add_option("--fd-grid-sizes", c.fd_grid_sizes)->delimiter(',')->capture_default_str();
    app.add_option("--continuation-steps", c.continuation_steps)->capture_default_str();
    app.add_option("--max-step-halvings", c.max_step_halvings)->capture_default_str();

    SpectrumOptions so;
    auto* spectrum = app.add_subcommand("spectrum", "eigenvalue records sorted by (n, m)");
    spectrum->add_option("--n-max", so.n_max)->check(CLI::PositiveNumber)->capture_default_str();
    spectrum->add_option("--m-max", so.m_max)->check(CLI::NonNegativeNumber)->capture_default_str();
    add_delta_flags(spectrum, so.delta_re, so.delta_im);
    spectrum->add_option("--format", so.format)
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    spectrum->add_option("--out", so.out, "output path (default stdout)");

    ModesOptions mo;
    auto* modes = app.add_subcommand("modes", "sample f_{n,m} on a K x K grid");
    modes->add_option("--n", mo.n)->required()->check(CLI::PositiveNumber);
    modes->add_option("--m", mo.m)->required();
    add_delta_flags(modes, mo.delta_re, mo.delta_im);
    modes->add_option("--grid", mo.grid, "points per axis")
        ->check(CLI::Range(2, 4001))
        ->capture_default_str();
    modes->add_option("--out", mo.out, "CSV path; the manifest goes to PATH.manifest.json");

    TraceOptions to;
    auto* trace = app.add_subcommand("trace", "convergence of lambda_{n,m}(delta) as delta -> 0");
    trace->add_option("--n", to.n)->required()->check(CLI::PositiveNumber);
    trace->add_option("--m", to.m)->required();
    trace->add_option("--delta-path", to.delta_path, "\"re,im;re,im;...\"");
    trace->add_option("--eta-sequence", to.eta, "B_eta family: delta = i eta/(1 - i eta)")
        ->delimiter(',');
    trace->add_option("--epsilon-sequence", to.epsilon, "A_eps family: delta = eps")
        ->delimiter(',');
    trace->add_option("--format", to.format)
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    trace->add_option("--out", to.out, "output path (default stdout)");

    ValidateOptions vo;
    auto* validate = app.add_subcommand("validate", "run the invariant and oracle suite");
    validate->add_option("--level", vo.level)
        ->check(CLI::IsMember({"quick", "full"}))
        ->capture_default_str();
    validate->add_option("--format", vo.format)
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();
    validate->add_option("--out", vo.out, "report path (default stdout)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        if (!reversed.empty()) {
            reversed.pop_back();  // program name
        }
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    for (std::size_t i = 1; i < args.size(); ++i) {
        ctx.command += (i > 1 ? " " : "") + args[i];
    }

    try {
        ctx.config.validate();
        if (spectrum->parsed()) return cmd_spectrum(ctx, so);
        if (modes->parsed()) return cmd_modes(ctx, mo);
        if (trace->parsed()) return cmd_trace(ctx, to);
        return cmd_validate(ctx, vo);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const SolverFailure& e) {
        err << e.what() << "\n";
        return kExitSolver;
    } catch (const Error& e) {
        const bool usage = e.kind() == ErrorKind::InvalidConfig ||
                           e.kind() == ErrorKind::DeltaOutOfRange ||
                           e.kind() == ErrorKind::InvalidGrid;
        err << (usage ? "usage error: " : "solver error: ") << e.what() << "\n";
        return usage ? kExitUsage : kExitSolver;
    }
}

}  // namespace indefspec::cli
