// Batch front door for the tiltbound library. One command per process: parse
// flags (or a JSON experiment config), dispatch into the library, write any
// artifacts atomically, and print a single-line JSON summary to stdout.
//
// Exit statuses: 0 success; 1 I/O or parse failure; 2 domain error (e.g. a
// tilt outside the Kramer window); 3 mathematically legitimate "none found"
// or inconclusive outcomes, so shell pipelines can branch on them. Error
// detail goes to stderr as {"error": ...}.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tiltbound/cgf.hpp"
#include "tiltbound/convexity.hpp"
#include "tiltbound/csv.hpp"
#include "tiltbound/generating_function.hpp"
#include "tiltbound/gls.hpp"
#include "tiltbound/grid_function.hpp"
#include "tiltbound/grids.hpp"
#include "tiltbound/legendre.hpp"
#include "tiltbound/multivariate.hpp"
#include "tiltbound/random_source.hpp"

namespace {

using namespace tiltbound;
using ordered_json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;      // I/O or parse failure
constexpr int kExitDomain = 2;     // mathematically invalid request
constexpr int kExitNoneFound = 3;  // legitimate negative/indeterminate outcome

// Raised for malformed invocations and unreadable inputs; maps to exit 1.
// Library invalid_argument/domain_error exceptions map to exit 2 instead:
// those mean the request parsed fine but asked for something undefined.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void emit_error(const std::string& message) {
    std::cerr << ordered_json{{"error", message}}.dump() << "\n";
}

void emit_warning(const std::string& message) {
    std::cerr << ordered_json{{"warning", message}}.dump() << "\n";
}

void print_summary(const ordered_json& j) { std::cout << j.dump() << "\n"; }

// Modules that serialize their own results emit exactly that JSON line.
void print_raw(const std::string& line) { std::cout << line << "\n"; }

ordered_json json_number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return nullptr;
    return v > 0 ? ordered_json("infinity") : ordered_json("-infinity");
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string path_stem(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

// Spec strings (--grid, --phi, --tau, --tail, --method) are part of the
// command line, so malformed ones are parse failures (exit 1) even though the
// library reports them as invalid_argument.
std::vector<double> parse_grid_arg(const std::string& spec, const std::string& flag) {
    try {
        return parse_grid_spec(spec);
    } catch (const std::invalid_argument& e) {
        throw UsageError(flag + ": " + e.what());
    }
}

GeneratingFunction parse_phi_arg(const std::string& text) {
    try {
        return GeneratingFunction::parse(text);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--phi: ") + e.what());
    }
}

std::vector<double> parse_coeff_list(const std::string& text, const std::string& flag) {
    std::vector<double> coeffs;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        std::string item = text.substr(start, comma == std::string::npos ? comma : comma - start);
        std::size_t pos = 0;
        double v = 0;
        try {
            v = std::stod(item, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != item.size() || item.empty())
            throw UsageError(flag + ": bad coefficient '" + item + "'");
        coeffs.push_back(v);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return coeffs;
}

CgfMethod parse_method_arg(const std::string& name) {
    if (name == "closed_form") return CgfMethod::closed_form;
    if (name == "quadrature") return CgfMethod::quadrature;
    if (name == "monte_carlo") return CgfMethod::monte_carlo;
    throw UsageError("--method: expected closed_form, quadrature, or monte_carlo, got '" + name +
                     "'");
}

RandomSource load_scalar_source(const std::string& arg) {
    if (arg.empty()) throw UsageError("--source is required");
    return RandomSource::from_json(arg);
}

VectorSource load_vector_source(const std::string& arg) {
    if (arg.empty()) throw UsageError("--source is required");
    return VectorSource::from_json(arg);
}

struct SamplingFlags {
    std::string method;
    std::size_t n = 1'000'000;
    std::uint64_t seed = 42;
};

void add_sampling_flags(CLI::App* cmd, SamplingFlags& s, bool with_method = true) {
    if (with_method)
        cmd->add_option("--method", s.method,
                        "Force the evaluation method: closed_form, quadrature, or monte_carlo");
    cmd->add_option("--n", s.n, "Monte Carlo sample size (default 1000000)");
    cmd->add_option("--seed", s.seed, "Monte Carlo seed (default 42)");
}

CgfOptions make_cgf_options(const SamplingFlags& s) {
    CgfOptions opts;
    if (!s.method.empty()) opts.method = parse_method_arg(s.method);
    opts.n = s.n;
    opts.seed = s.seed;
    return opts;
}

// Default lambda grid: 81 points across 0.8 of the (effective) Kramer window,
// the same span the convexity certificates use.
std::vector<double> default_window_grid(const RandomSource& source) {
    double hi = 0.8 * source.effective_lambda0();
    return linspace(-hi, hi, 81);
}

// ---------------------------------------------------------------------------
// cgf: evaluate Delta and Phi = Delta/lambda on a grid, optionally to CSV.

struct CgfCmd {
    std::string source, grid, out;
    SamplingFlags sampling;
};

int run_cgf(const CgfCmd& c) {
    RandomSource source = load_scalar_source(c.source);
    std::vector<double> grid =
        c.grid.empty() ? default_window_grid(source) : parse_grid_arg(c.grid, "--grid");
    CgfEvaluation ev = evaluate_cgf(source, grid, make_cgf_options(c.sampling));
    ordered_json j{{"command", "cgf"},
                   {"source", source.kind_name()},
                   {"method", cgf_method_name(ev.method)},
                   {"points", ev.lambda_grid.size()}};
    if (!c.out.empty()) {
        atomic_write_file(c.out, ev.to_csv());
        j["out"] = c.out;
    }
    print_summary(j);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// tilt: one exponential change of measure; reports the tilted moments of a
// polynomial statistic and both sides of the Delta'' identity.

struct TiltCmd {
    std::string source;
    std::string tau = "0,1";  // coefficients, constant term first; default is tau(x) = x
    double lambda = 0;
    SamplingFlags sampling;
};

int run_tilt(const TiltCmd& c) {
    RandomSource source = load_scalar_source(c.source);
    PolynomialTau tau(parse_coeff_list(c.tau, "--tau"));
    CgfOptions opts = make_cgf_options(c.sampling);
    TiltedMeasure tilt(source, c.lambda, opts);
    ordered_json j{{"command", "tilt"},
                   {"source", source.kind_name()},
                   {"lambda", c.lambda},
                   {"log_normalizer", tilt.log_normalizer()},
                   {"tau_mean", tilt.mean(tau)},
                   {"tau_variance", tilt.variance(tau)},
                   {"delta_second_derivative", cgf_second_derivative(source, c.lambda, opts)},
                   {"delta_second_difference",
                    cgf_central_second_difference(source, c.lambda, opts)}};
    print_summary(j);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// conjugate: Young-Fenchel transform of a grid function or a sampled phi.

struct ConjugateCmd {
    std::string in, phi, grid, out_grid, out;
    bool declared_convex = false;
    bool bi = false;
};

int run_conjugate(const ConjugateCmd& c) {
    ConvexGridFunction f;
    if (!c.in.empty()) {
        f = ConvexGridFunction::from_csv(c.in, c.in + ".json");
    } else if (!c.phi.empty()) {
        if (c.grid.empty()) throw UsageError("conjugate: --phi needs --grid to sample on");
        f = parse_phi_arg(c.phi).sample_shape(parse_grid_arg(c.grid, "--grid"));
    } else {
        throw UsageError("conjugate: provide --in or --phi with --grid");
    }
    ConjugateResult res;
    if (c.bi) {
        res = biconjugate(f);
    } else {
        if (c.out_grid.empty()) throw UsageError("conjugate: --out-grid is required");
        res = conjugate(f, parse_grid_arg(c.out_grid, "--out-grid"), c.declared_convex);
    }
    ordered_json j{{"command", "conjugate"},
                   {"biconjugate", c.bi},
                   {"points", res.f.grid.size()},
                   {"hulled", res.hulled},
                   {"finite_lo", json_number(res.finite_lo)},
                   {"finite_hi", json_number(res.finite_hi)}};
    if (!c.out.empty()) {
        atomic_write_file(c.out, res.f.to_csv());
        atomic_write_file(c.out + ".json", res.f.sidecar_json());
        j["out"] = c.out;
    }
    print_summary(j);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// norm: the B(phi) norm of a source. --phi natural uses the source's own
// natural generating function, whose norm is 1 by construction.

struct NormCmd {
    std::string source;
    std::string phi = "phi2";
    std::string grid;
    SamplingFlags sampling;
};

int run_norm(const NormCmd& c) {
    RandomSource source = load_scalar_source(c.source);
    CgfOptions opts = make_cgf_options(c.sampling);
    std::vector<double> grid =
        c.grid.empty() ? default_norm_grid(source) : parse_grid_arg(c.grid, "--grid");
    GeneratingFunction phi =
        c.phi == "natural"
            ? GeneratingFunction::custom(natural_generating_function(source, grid, opts))
            : parse_phi_arg(c.phi);
    NormEstimate est = bphi_norm(source, phi, grid, opts);
    print_raw(est.to_json());
    return std::isfinite(est.value) ? kExitOk : kExitNoneFound;
}

// ---------------------------------------------------------------------------
// tailbound: forward mode evaluates the Young-Fenchel tail bound
// exp(-phi*(x/rho)); --invert recovers an MGF bound constant from a tail.

struct TailboundCmd {
    std::string phi = "phi2";
    std::string source, grid, x, out, tail, lambda_grid;
    double rho = 0;  // 0 means: estimate via bphi_norm of --source
    std::size_t conj_points = 4001;
    bool invert = false;
    SamplingFlags sampling;
};

TailModel parse_tail_arg(const std::string& text) {
    if (text.empty()) throw UsageError("--tail is required with --invert");
    std::size_t colon = text.find(':');
    std::string head = text.substr(0, colon);
    std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
    try {
        if (head == "zero") return TailModel::zero();
        if (head == "table") {
            if (rest.empty()) throw UsageError("--tail table: expected table:<csv path>");
            CsvTable csv = read_csv(rest);
            std::vector<double> t, p;
            for (const auto& row : csv.rows) {
                if (row.size() < 2) throw UsageError("--tail table: rows need two columns (t, p)");
                t.push_back(row[0]);
                p.push_back(row[1]);
            }
            return TailModel::table(t, p);
        }
        double d = 2, c1 = 1, sigma = 1;
        std::size_t start = 0;
        while (!rest.empty() && start <= rest.size()) {
            std::size_t comma = rest.find(',', start);
            std::string item =
                rest.substr(start, comma == std::string::npos ? comma : comma - start);
            std::size_t eq = item.find('=');
            if (eq == std::string::npos)
                throw UsageError("--tail: expected key=value, got '" + item + "'");
            std::string key = item.substr(0, eq);
            double value = std::stod(item.substr(eq + 1));
            if (key == "d")
                d = value;
            else if (key == "c1")
                c1 = value;
            else if (key == "sigma")
                sigma = value;
            else
                throw UsageError("--tail: unknown parameter '" + key + "'");
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (head == "weibull") return TailModel::weibull(d, c1);
        if (head == "gaussian") return TailModel::gaussian(sigma);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--tail: ") + e.what());
    }
    throw UsageError("--tail: expected weibull:..., gaussian:..., table:<path>, or zero");
}

// --x accepts either a grid spec or a single abscissa.
std::vector<double> parse_x_arg(const std::string& text) {
    if (text.empty()) throw UsageError("tailbound: --x is required");
    try {
        return parse_grid_spec(text);
    } catch (const std::invalid_argument&) {
    }
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(text, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != text.size()) throw UsageError("--x: expected a number or grid spec, got '" + text + "'");
    return {v};
}

int run_tailbound(const TailboundCmd& c) {
    GeneratingFunction phi = parse_phi_arg(c.phi);
    if (c.invert) {
        TailModel tail = parse_tail_arg(c.tail);
        std::vector<double> grid = c.lambda_grid.empty()
                                       ? linspace(0.25, 4.0, 16)
                                       : parse_grid_arg(c.lambda_grid, "--lambda-grid");
        MgfBoundResult res = mgf_bound_from_tail(tail, phi, grid);
        print_raw(res.to_json());
        return res.found ? kExitOk : kExitNoneFound;
    }
    double rho = c.rho;
    if (rho <= 0) {
        if (c.source.empty()) throw UsageError("tailbound: provide --rho or --source");
        RandomSource source = load_scalar_source(c.source);
        CgfOptions opts = make_cgf_options(c.sampling);
        std::vector<double> grid =
            c.grid.empty() ? default_norm_grid(source) : parse_grid_arg(c.grid, "--grid");
        NormEstimate est = bphi_norm(source, phi, grid, opts);
        if (!std::isfinite(est.value) || est.value <= 0) {
            emit_error("tailbound: the estimated norm is not finite and positive; no bound");
            return kExitNoneFound;
        }
        rho = est.value;
    }
    std::vector<double> xs = parse_x_arg(c.x);
    ordered_json j{{"command", "tailbound"}, {"phi", phi.name()}, {"rho", rho}};
    if (xs.size() == 1 && c.out.empty()) {
        j["x"] = xs[0];
        j["bound"] = tail_bound(phi, rho, xs[0], c.conj_points);
        print_summary(j);
        return kExitOk;
    }
    CsvTable table;
    table.header = {"x", "bound"};
    for (double x : xs) table.rows.push_back({x, tail_bound(phi, rho, x, c.conj_points)});
    j["points"] = xs.size();
    if (!c.out.empty()) {
        atomic_write_file(c.out, render_csv(table));
        j["out"] = c.out;
    }
    print_summary(j);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// classify: closed-form LC membership for the stitched family.

struct ClassifyCmd {
    double m = 0, gamma = 0;
};

int run_classify(const ClassifyCmd& c) {
    FamilyLcResult r = classify_family_lc(c.m, c.gamma);
    ordered_json j{{"verdict", r.verdict == LcClass::LC ? "LC" : "not_LC"}};
    if (r.boundary) j["boundary"] = true;
    print_summary(j);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// duality: tail/CGF/moment growth exponents from one seeded sample.

struct DualityCmd {
    std::string source, x_grid, lambda_grid;
    std::vector<double> p_list;
    std::size_t n = 1'000'000;
    std::uint64_t seed = 42;
};

int run_duality(const DualityCmd& c) {
    RandomSource source = load_scalar_source(c.source);
    DualityConfig cfg;
    cfg.n = c.n;
    cfg.seed = c.seed;
    cfg.p_list = c.p_list;
    if (!c.x_grid.empty()) cfg.x_grid = parse_grid_arg(c.x_grid, "--x-grid");
    if (!c.lambda_grid.empty()) cfg.lambda_grid = parse_grid_arg(c.lambda_grid, "--lambda-grid");
    DualityReport report = duality_exponents(source, cfg);
    print_raw(report.to_json());
    return kExitOk;
}

// ---------------------------------------------------------------------------
// certify: convexity certificates for OC (Delta), LC (Phi or phi/lambda),
// and LD (multivariate V along rays plus cross-ray midpoints).

struct CertifyCmd {
    std::string target, in, source, phi, grid;
    std::string radii = "0.25:8:64";
    double alpha = 0, tol = 0;
    std::size_t rays = 16, midpoints = 200, dim = 2;
    bool whiten = false;
    SamplingFlags sampling;
};

// Default grid for phi-based LC checks: log-spaced across the stitch point of
// a family, or across the top four decades of the window otherwise.
std::vector<double> default_phi_lc_grid(const GeneratingFunction& phi) {
    if (const auto* family = std::get_if<PhiFamily>(&phi.kind()))
        return logspace(std::log10(family->stitch / 4.0), std::log10(1e4 * family->stitch), 200);
    KramerWindow w = phi.window();
    double hi = w.finite ? 0.98 * w.lambda0 : 100.0;
    return logspace(std::log10(hi) - 4.0, std::log10(hi), 200);
}

int run_certify(const CertifyCmd& c) {
    std::string target = lower(c.target);
    ConvexityCertificate cert;
    if (target == "oc" || target == "lc") {
        ConvexityTarget t = target == "oc" ? ConvexityTarget::OC : ConvexityTarget::LC;
        if (!c.phi.empty() && t != ConvexityTarget::LC)
            throw UsageError("certify: --phi applies only to --target LC");
        if (!c.in.empty()) {
            ConvexGridFunction f = ConvexGridFunction::from_csv(c.in, c.in + ".json");
            cert = c.tol > 0 ? certify(f, t, c.tol) : certify(f, t);
        } else if (!c.phi.empty()) {
            GeneratingFunction phi = parse_phi_arg(c.phi);
            std::vector<double> grid =
                c.grid.empty() ? default_phi_lc_grid(phi) : parse_grid_arg(c.grid, "--grid");
            cert = lc_via_phi_over_lambda(phi, grid);
        } else {
            RandomSource source = load_scalar_source(c.source);
            std::vector<double> grid =
                c.grid.empty() ? std::vector<double>{} : parse_grid_arg(c.grid, "--grid");
            CgfOptions opts = make_cgf_options(c.sampling);
            cert = t == ConvexityTarget::OC ? certify_oc(source, grid, opts)
                                            : certify_lc(source, grid, opts);
        }
    } else if (target == "ld") {
        MvModel model =
            c.alpha > 0 ? MvModel::power_law(c.alpha, c.dim)
                        : MvModel::from_source(load_vector_source(c.source),
                                               MvOptions{c.sampling.n, c.sampling.seed, c.whiten});
        LdField field = build_ld_field(model, c.rays, parse_grid_arg(c.radii, "--radii"),
                                       c.midpoints, c.sampling.seed);
        cert = c.tol > 0 ? certify_ld(field, c.tol) : certify_ld(field);
    } else {
        throw UsageError("certify: --target must be one of OC, LC, LD");
    }
    print_raw(cert.to_json());
    return cert.verdict == Verdict::inconclusive ? kExitNoneFound : kExitOk;
}

// ---------------------------------------------------------------------------
// mv: evaluate ln Q and V on a planar ray grid, to CSV.

struct MvCmd {
    std::string source, out;
    std::string radii = "0.25:8:64";
    double alpha = 0;
    std::size_t rays = 16, dim = 2;
    bool whiten = false;
    std::size_t n = 1'000'000;
    std::uint64_t seed = 42;
};

int run_mv(const MvCmd& c) {
    MvModel model = c.alpha > 0
                        ? MvModel::power_law(c.alpha, c.dim)
                        : MvModel::from_source(load_vector_source(c.source),
                                               MvOptions{c.n, c.seed, c.whiten});
    if (model.dim() != 2)
        throw UsageError("mv: ray grids are planar; use certify --target LD for dimension " +
                         std::to_string(model.dim()));
    std::vector<std::vector<double>> points =
        ray_grid(unit_circle_rays(c.rays), parse_grid_arg(c.radii, "--radii"));
    MultivariateMgf mv = evaluate_multivariate(model, points);
    ordered_json j{{"command", "mv"},
                   {"dim", mv.dim},
                   {"points", mv.points.size()},
                   {"whitened", mv.whitened}};
    if (!c.out.empty()) {
        atomic_write_file(c.out, mv.to_csv());
        j["out"] = c.out;
    }
    print_summary(j);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// plot: merge evaluation artifacts into one long-format "series,x,y" CSV.
// No plotting library; any external tool can pivot on the series column.

struct PlotCmd {
    std::vector<std::string> in, series;
    std::string out;
};

struct PlotSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

std::string join_header(const std::vector<std::string>& header) {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out += ",";
        out += header[i];
    }
    return out;
}

int run_plot(const PlotCmd& c) {
    if (c.out.empty()) throw UsageError("plot: --out is required");
    if (c.series.size() > c.in.size())
        throw UsageError("plot: more --series names than --in files");
    std::vector<PlotSeries> series;
    for (std::size_t i = 0; i < c.in.size(); ++i) {
        CsvTable t = read_csv(c.in[i]);
        std::string base = i < c.series.size() ? c.series[i] : "";
        if (t.header == std::vector<std::string>{"lambda", "log_mgf", "phi"}) {
            // CGF artifact: the log_mgf column is the Delta curve, the phi
            // column rides along as a second series.
            std::string name = base.empty() ? "delta" : base;
            PlotSeries delta{name, {}}, phi{name + "_phi", {}};
            for (const auto& row : t.rows) {
                delta.points.emplace_back(row[0], row[1]);
                phi.points.emplace_back(row[0], row[2]);
            }
            series.push_back(std::move(delta));
            series.push_back(std::move(phi));
        } else if (t.header.size() >= 3 && t.header.back() == "v" &&
                   t.header[t.header.size() - 2] == "log_q") {
            // Multivariate artifact: use the radius |lambda| as abscissa.
            std::size_t l = t.header.size() - 2;
            std::string name = base.empty() ? path_stem(c.in[i]) : base;
            PlotSeries q{name + "_log_q", {}}, v{name + "_v", {}};
            for (const auto& row : t.rows) {
                double norm2 = 0;
                for (std::size_t k = 0; k < l; ++k) norm2 += row[k] * row[k];
                double r = std::sqrt(norm2);
                q.points.emplace_back(r, row[l]);
                v.points.emplace_back(r, row[l + 1]);
            }
            series.push_back(std::move(q));
            series.push_back(std::move(v));
        } else if (t.header.size() == 2) {
            // Generic two-column artifact (grid functions, tail bounds).
            PlotSeries s{base.empty() ? path_stem(c.in[i]) : base, {}};
            for (const auto& row : t.rows) s.points.emplace_back(row[0], row[1]);
            series.push_back(std::move(s));
        } else {
            throw UsageError("plot: unrecognized schema in '" + c.in[i] + "' (header: " +
                             join_header(t.header) + ")");
        }
    }
    for (const PlotSeries& s : series)
        if (s.name.find_first_of(",\"\n") != std::string::npos)
            throw UsageError("plot: series name '" + s.name + "' is not CSV-safe");
    std::set<std::string> used;
    for (PlotSeries& s : series) {
        if (used.count(s.name)) {
            std::size_t k = 2;
            std::string candidate;
            do {
                candidate = s.name + "_" + std::to_string(k++);
            } while (used.count(candidate));
            emit_warning("plot: duplicate series '" + s.name + "' renamed to '" + candidate + "'");
            s.name = candidate;
        }
        used.insert(s.name);
    }
    std::string csv = "series,x,y\n";
    std::size_t rows = 0;
    for (const PlotSeries& s : series)
        for (const auto& [x, y] : s.points) {
            csv += s.name + "," + format_double(x) + "," + format_double(y) + "\n";
            ++rows;
        }
    atomic_write_file(c.out, csv);
    std::vector<std::string> names;
    for (const PlotSeries& s : series) names.push_back(s.name);
    print_summary(
        ordered_json{{"command", "plot"}, {"series", names}, {"rows", rows}, {"out", c.out}});
    return kExitOk;
}

// ---------------------------------------------------------------------------
// Experiment configs: a JSON object {"command": ..., <flag>: <value>, ...} is
// lowered onto the exact same flag surface, so every flag documented in
// --help is also a config key (underscores for hyphens).

int run_args(std::vector<std::string> args, int depth);

std::string config_value_to_arg(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();  // numbers verbatim; objects become inline source JSON
}

int run_config(const std::string& path, int depth) {
    if (depth > 0) throw UsageError("config: nested --config is not allowed");
    nlohmann::json cfg;
    try {
        cfg = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw UsageError("config: " + std::string(e.what()));
    }
    if (!cfg.is_object()) throw UsageError("config: expected a JSON object");
    if (!cfg.contains("command") || !cfg["command"].is_string())
        throw UsageError("config: missing string field \"command\"");
    std::vector<std::string> args{cfg["command"].get<std::string>()};
    for (const auto& [key, value] : cfg.items()) {
        if (key == "command") continue;
        std::string flag = "--" + key;
        std::replace(flag.begin(), flag.end(), '_', '-');
        if (value.is_null()) continue;
        if (value.is_boolean()) {
            if (value.get<bool>()) args.push_back(flag);
            continue;
        }
        if (value.is_array()) {
            for (const auto& element : value) {
                args.push_back(flag);
                args.push_back(config_value_to_arg(element));
            }
            continue;
        }
        args.push_back(flag);
        args.push_back(config_value_to_arg(value));
    }
    return run_args(std::move(args), depth + 1);
}

int run_args(std::vector<std::string> args, int depth) {
    CLI::App app{
        "tiltbound: cumulant generating functions, exponential tilting, "
        "Young-Fenchel tail bounds, and convexity certificates"};
    app.require_subcommand(0, 1);
    app.set_version_flag("--version", "tiltbound 1.0.0");
    std::string config_path;
    app.add_option("--config", config_path,
                   "Run from a JSON experiment config instead of command-line flags");

    int code = kExitOk;

    CgfCmd cgf_cmd;
    CLI::App* cgf = app.add_subcommand(
        "cgf", "Evaluate Delta(lambda) = ln E exp(lambda xi) and Phi = Delta/lambda on a grid");
    cgf->add_option("--source", cgf_cmd.source, "Scalar source: JSON file path or inline JSON")
        ->required();
    cgf->add_option("--grid", cgf_cmd.grid,
                    "Lambda grid, a:b:n or logspace:a:b:n (default: 0.8 of the window, 81 points)");
    cgf->add_option("--out", cgf_cmd.out, "Write lambda,log_mgf,phi CSV here");
    add_sampling_flags(cgf, cgf_cmd.sampling);
    cgf->callback([&] { code = run_cgf(cgf_cmd); });

    TiltCmd tilt_cmd;
    CLI::App* tilt = app.add_subcommand(
        "tilt", "Tilt the source by exp(lambda xi) and report moments of a polynomial statistic");
    tilt->add_option("--source", tilt_cmd.source, "Scalar source: JSON file path or inline JSON")
        ->required();
    tilt->add_option("--lambda", tilt_cmd.lambda, "Tilt parameter")->required();
    tilt->add_option("--tau", tilt_cmd.tau,
                     "Polynomial statistic coefficients, constant first (default 0,1 = identity)");
    add_sampling_flags(tilt, tilt_cmd.sampling);
    tilt->callback([&] { code = run_tilt(tilt_cmd); });

    ConjugateCmd conj_cmd;
    CLI::App* conj =
        app.add_subcommand("conjugate", "Young-Fenchel conjugate of a convex grid function");
    conj->add_option("--in", conj_cmd.in, "Input grid-function CSV (sidecar <in>.json is honored)");
    conj->add_option("--phi", conj_cmd.phi,
                     "Sample a generating function instead: phi2, k*phi2, family:..., custom:...");
    conj->add_option("--grid", conj_cmd.grid, "Sampling grid for --phi");
    conj->add_option("--out-grid", conj_cmd.out_grid, "Slope grid for the conjugate");
    conj->add_option("--out", conj_cmd.out, "Write x,value CSV (+ .json sidecar) here");
    conj->add_flag("--declared-convex", conj_cmd.declared_convex,
                   "Trust the input to be convex; skip the hull pass");
    conj->add_flag("--biconjugate", conj_cmd.bi,
                   "Compute (f*)* on the input grid instead of the conjugate");
    conj->callback([&] { code = run_conjugate(conj_cmd); });

    NormCmd norm_cmd;
    CLI::App* norm = app.add_subcommand("norm", "B(phi) norm of a source");
    norm->add_option("--source", norm_cmd.source, "Scalar source: JSON file path or inline JSON")
        ->required();
    norm->add_option("--phi", norm_cmd.phi,
                     "Generating function spec, or 'natural' for the source's own (default phi2)");
    norm->add_option("--grid", norm_cmd.grid,
                     "Lambda grid for the supremum (default: log-spaced across the window)");
    add_sampling_flags(norm, norm_cmd.sampling);
    norm->callback([&] { code = run_norm(norm_cmd); });

    TailboundCmd tail_cmd;
    CLI::App* tail = app.add_subcommand(
        "tailbound", "Young-Fenchel tail bound exp(-phi*(x/rho)), or --invert for an MGF bound");
    tail->add_option("--phi", tail_cmd.phi, "Generating function spec (default phi2)");
    tail->add_option("--rho", tail_cmd.rho, "Norm to use; omit to estimate from --source");
    tail->add_option("--source", tail_cmd.source, "Source whose norm supplies rho");
    tail->add_option("--grid", tail_cmd.grid, "Lambda grid for the norm estimate");
    tail->add_option("--x", tail_cmd.x, "Threshold: a number or a grid spec");
    tail->add_option("--conj-points", tail_cmd.conj_points,
                     "Grid resolution for the conjugate (default 4001)");
    tail->add_option("--out", tail_cmd.out, "Write x,bound CSV here");
    tail->add_flag("--invert", tail_cmd.invert,
                   "Recover E exp(lambda beta) <= exp(phi(C lambda)) from a tail model");
    tail->add_option("--tail", tail_cmd.tail,
                     "Tail model for --invert: weibull:d=..,c1=.. | gaussian:sigma=.. | "
                     "table:<csv> | zero");
    tail->add_option("--lambda-grid", tail_cmd.lambda_grid,
                     "Certification grid for --invert (default 0.25:4:16)");
    add_sampling_flags(tail, tail_cmd.sampling);
    tail->callback([&] { code = run_tailbound(tail_cmd); });

    ClassifyCmd classify_cmd;
    CLI::App* classify =
        app.add_subcommand("classify", "Closed-form LC membership of the phi family (m, gamma)");
    classify->add_option("--m", classify_cmd.m, "Power of the family tail")->required();
    classify->add_option("--gamma", classify_cmd.gamma, "Log-power of the family tail")
        ->required();
    classify->callback([&] { code = run_classify(classify_cmd); });

    DualityCmd duality_cmd;
    CLI::App* duality = app.add_subcommand(
        "duality", "Tail, CGF, and moment growth exponents from one seeded sample");
    duality->add_option("--source", duality_cmd.source,
                        "Scalar source: JSON file path or inline JSON")
        ->required();
    duality->add_option("--x-grid", duality_cmd.x_grid, "Tail threshold grid (default: data-driven)");
    duality->add_option("--lambda-grid", duality_cmd.lambda_grid,
                        "CGF grid (default logspace:-1:2:25)");
    duality->add_option("--p-list", duality_cmd.p_list, "Moment orders (default 2,4,8,16,32)")
        ->delimiter(',');
    duality->add_option("--n", duality_cmd.n, "Sample size (default 1000000)");
    duality->add_option("--seed", duality_cmd.seed, "Sample seed (default 42)");
    duality->callback([&] { code = run_duality(duality_cmd); });

    CertifyCmd certify_cmd;
    CLI::App* certify = app.add_subcommand(
        "certify", "Second-difference convexity certificate for OC, LC, or LD");
    certify->add_option("--target", certify_cmd.target, "OC, LC, or LD")->required();
    certify->add_option("--in", certify_cmd.in, "Certify a grid-function CSV directly");
    certify->add_option("--source", certify_cmd.source,
                        "Scalar source (OC/LC) or vector source JSON (LD)");
    certify->add_option("--phi", certify_cmd.phi,
                        "LC only: certify phi(lambda)/lambda for a generating function spec");
    certify->add_option("--grid", certify_cmd.grid, "Lambda grid (default: target-appropriate)");
    certify->add_option("--alpha", certify_cmd.alpha,
                        "LD only: synthetic power-law model Q = |lambda|^alpha");
    certify->add_option("--dim", certify_cmd.dim, "LD only: dimension for --alpha (default 2)");
    certify->add_option("--rays", certify_cmd.rays, "LD only: ray count (default 16)");
    certify->add_option("--radii", certify_cmd.radii, "LD only: radius grid (default 0.25:8:64)");
    certify->add_option("--midpoints", certify_cmd.midpoints,
                        "LD only: cross-ray midpoint pairs (default 200)");
    certify->add_flag("--whiten", certify_cmd.whiten,
                      "LD only: divide by the covariance norm instead of the Euclidean norm");
    certify->add_option("--tol", certify_cmd.tol,
                        "Override the certificate tolerance (--in and LD paths)");
    add_sampling_flags(certify, certify_cmd.sampling);
    certify->callback([&] { code = run_certify(certify_cmd); });

    MvCmd mv_cmd;
    CLI::App* mv = app.add_subcommand(
        "mv", "Evaluate ln Q(lambda) and V = ln Q / |lambda| on a planar ray grid");
    mv->add_option("--source", mv_cmd.source, "Vector source: JSON file path or inline JSON");
    mv->add_option("--alpha", mv_cmd.alpha, "Synthetic power-law model Q = |lambda|^alpha");
    mv->add_option("--dim", mv_cmd.dim, "Dimension for --alpha (default 2)");
    mv->add_option("--rays", mv_cmd.rays, "Ray count (default 16)");
    mv->add_option("--radii", mv_cmd.radii, "Radius grid (default 0.25:8:64)");
    mv->add_flag("--whiten", mv_cmd.whiten,
                 "Divide by the covariance norm instead of the Euclidean norm");
    mv->add_option("--n", mv_cmd.n, "Monte Carlo sample size (default 1000000)");
    mv->add_option("--seed", mv_cmd.seed, "Monte Carlo seed (default 42)");
    mv->add_option("--out", mv_cmd.out, "Write lambda_1,...,log_q,v CSV here");
    mv->callback([&] { code = run_mv(mv_cmd); });

    PlotCmd plot_cmd;
    CLI::App* plot = app.add_subcommand(
        "plot", "Merge evaluation artifacts into one long-format series,x,y CSV");
    plot->add_option("--in", plot_cmd.in, "Input artifact CSVs (repeatable)");
    plot->add_option("--series", plot_cmd.series,
                     "Series name overrides, matched to --in by position (repeatable)");
    plot->add_option("--out", plot_cmd.out, "Output CSV path")->required();
    plot->callback([&] { code = run_plot(plot_cmd); });

    std::vector<const char*> argv{"tiltbound"};
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }
    if (!config_path.empty()) {
        if (!app.get_subcommands().empty())
            throw UsageError("config: do not combine --config with a subcommand");
        return run_config(config_path, depth);
    }
    if (app.get_subcommands().empty()) throw UsageError("no command given (try --help)");
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        return run_args(std::move(args), 0);
    } catch (const UsageError& e) {
        emit_error(e.what());
        return kExitUsage;
    } catch (const std::domain_error& e) {
        emit_error(e.what());
        return kExitDomain;
    } catch (const std::invalid_argument& e) {
        emit_error(e.what());
        return kExitDomain;
    } catch (const std::exception& e) {
        emit_error(e.what());
        return kExitUsage;
    }
}
