#include "tiltbound/generating_function.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace tiltbound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double parse_number(const std::string& text, const char* what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument(std::string("bad numeric value for ") + what + ": " + text);
    }
    if (used != text.size())
        throw std::invalid_argument(std::string("bad numeric value for ") + what + ": " + text);
    return v;
}

std::string format_param(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

}  // namespace

double PhiFamily::c0() const {
    double lz = std::log(stitch);
    return c1 * std::pow(stitch, m - 2.0) * std::pow(lz, gamma) * slow_at(lz);
}

GeneratingFunction::GeneratingFunction(Kind kind) : kind_(std::move(kind)) {
    if (const auto* p = std::get_if<SubgaussianPhi>(&kind_)) {
        if (!(p->scale > 0)) throw std::invalid_argument("phi2 scale must be positive");
    } else if (const auto* f = std::get_if<PhiFamily>(&kind_)) {
        if (!(f->m > 0)) throw std::invalid_argument("family: m must be positive");
        if (!(f->stitch > std::exp(1.0)))
            throw std::invalid_argument("family: stitch point Z must exceed e");
        if (!(f->c1 > 0)) throw std::invalid_argument("family: C1 must be positive");
    } else {
        const auto& shape = std::get<CustomPhi>(kind_).shape;
        for (double v : shape.values)
            if (!std::isfinite(v) || v < 0)
                throw std::invalid_argument("custom phi values must be finite and nonnegative");
    }
}

GeneratingFunction GeneratingFunction::phi2(double scale) {
    return GeneratingFunction(SubgaussianPhi{scale});
}

GeneratingFunction GeneratingFunction::family(double m, double gamma, double stitch, double c1,
                                              SlowlyVaryingHook slow) {
    return GeneratingFunction(PhiFamily{m, gamma, stitch, c1, std::move(slow)});
}

GeneratingFunction GeneratingFunction::custom(ConvexGridFunction shape) {
    return GeneratingFunction(CustomPhi{std::move(shape)});
}

GeneratingFunction GeneratingFunction::parse(const std::string& text) {
    std::string s = text;
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
            s.end());
    if (s == "phi2") return phi2();
    if (auto star = s.find("*phi2"); star != std::string::npos && star + 5 == s.size()) {
        double k = parse_number(s.substr(0, star), "phi2 multiplier");
        if (!(k > 0)) throw std::invalid_argument("phi2 multiplier must be positive");
        return phi2(0.5 * k);
    }
    if (s.rfind("family:", 0) == 0) {
        std::string body = s.substr(7);
        PhiFamily f;
        bool have_m = false, have_gamma = false;
        std::size_t pos = 0;
        while (pos < body.size()) {
            std::size_t comma = body.find(',', pos);
            std::string item = body.substr(pos, comma == std::string::npos ? comma : comma - pos);
            pos = comma == std::string::npos ? body.size() : comma + 1;
            std::size_t eq = item.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("family parameters must be key=value: " + item);
            std::string key = item.substr(0, eq), value = item.substr(eq + 1);
            if (key == "m") {
                f.m = parse_number(value, "m");
                have_m = true;
            } else if (key == "gamma") {
                f.gamma = parse_number(value, "gamma");
                have_gamma = true;
            } else if (key == "Z" || key == "z") {
                f.stitch = parse_number(value, "Z");
            } else if (key == "C1" || key == "c1") {
                f.c1 = parse_number(value, "C1");
            } else {
                throw std::invalid_argument("unknown family parameter: " + key);
            }
        }
        if (!have_m || !have_gamma)
            throw std::invalid_argument("family requires m=<v>,gamma=<v>");
        return GeneratingFunction(std::move(f));
    }
    if (s.rfind("custom:", 0) == 0) {
        std::string path = text.substr(text.find("custom:") + 7);
        // Strip surrounding whitespace only (the path may contain spaces).
        auto b = path.find_first_not_of(" \t");
        auto e = path.find_last_not_of(" \t");
        if (b == std::string::npos) throw std::invalid_argument("custom: missing csv path");
        path = path.substr(b, e - b + 1);
        return custom(ConvexGridFunction::from_csv(path, path + ".json"));
    }
    throw std::invalid_argument("unknown generating function spec: " + text);
}

std::string GeneratingFunction::name() const {
    if (const auto* p = std::get_if<SubgaussianPhi>(&kind_)) {
        if (p->scale == 0.5) return "phi2";
        return format_param(p->scale / 0.5) + "*phi2";
    }
    if (const auto* f = std::get_if<PhiFamily>(&kind_)) {
        return "family(m=" + format_param(f->m) + ",gamma=" + format_param(f->gamma) +
               ",Z=" + format_param(f->stitch) + ",C1=" + format_param(f->c1) + ")";
    }
    return "custom";
}

KramerWindow GeneratingFunction::window() const {
    KramerWindow w;
    w.lambda0 = kInf;
    w.finite = false;
    if (const auto* c = std::get_if<CustomPhi>(&kind_)) {
        const auto& shape = c->shape;
        if (shape.right_extension == Extension::plus_infinity_outside) {
            w.finite = true;
            w.lambda0 = shape.grid.back();
            if (shape.grid.front() < 0)
                w.lambda0 = std::min(w.lambda0, -shape.grid.front());
        }
    }
    return w;
}

double GeneratingFunction::raw(double x) const {
    if (const auto* p = std::get_if<SubgaussianPhi>(&kind_)) return p->scale * x * x;
    if (const auto* f = std::get_if<PhiFamily>(&kind_)) {
        if (x <= f->stitch) return f->c0() * x * x;
        double lx = std::log(x);
        return f->c1 * std::pow(x, f->m) * std::pow(lx, f->gamma) * f->slow_at(lx);
    }
    const auto& shape = std::get<CustomPhi>(kind_).shape;
    // One-sided even representations evaluate at |x|; full symmetric grids at x.
    double at = shape.grid.front() >= 0 ? std::abs(x) : x;
    if (at > shape.grid.back() && shape.right_extension == Extension::plus_infinity_outside)
        return kInf;
    return shape.interpolate(at);
}

double GeneratingFunction::envelope(double x) const {
    if (std::holds_alternative<SubgaussianPhi>(kind_)) return raw(x);
    if (const auto* f = std::get_if<PhiFamily>(&kind_)) {
        // The tail branch has at most one interior minimum, so the running max
        // over [0, x] is attained at the stitch or at x itself.
        if (x <= f->stitch) return raw(x);
        return std::max(raw(f->stitch), raw(x));
    }
    const auto& shape = std::get<CustomPhi>(kind_).shape;
    double best = raw(x);
    double lo = shape.grid.front() >= 0 ? shape.grid.front() : 0.0;
    for (std::size_t i = 0; i < shape.grid.size(); ++i) {
        double g = shape.grid[i];
        if (g < lo || g > x) continue;
        best = std::max(best, shape.values[i]);
    }
    return best;
}

double GeneratingFunction::inverse(double y) const {
    if (!(y > 0)) return 0.0;
    if (const auto* p = std::get_if<SubgaussianPhi>(&kind_)) return std::sqrt(y / p->scale);

    double lo = 0.0, hi;
    if (const auto* f = std::get_if<PhiFamily>(&kind_)) {
        double at_stitch = f->c0() * f->stitch * f->stitch;
        if (y <= at_stitch) return std::sqrt(y / f->c0());
        lo = f->stitch;
        hi = 2.0 * f->stitch;
        int guard = 0;
        while (envelope(hi) < y) {
            hi *= 2.0;
            if (++guard > 2000) return kInf;
        }
    } else {
        const auto& shape = std::get<CustomPhi>(kind_).shape;
        double edge = shape.grid.front() >= 0 ? shape.grid.back()
                                              : std::min(-shape.grid.front(), shape.grid.back());
        if (envelope(edge) >= y) {
            hi = edge;
        } else if (shape.right_extension == Extension::plus_infinity_outside) {
            return kInf;  // y exits the range of phi on the window
        } else {
            hi = std::max(edge, 1.0);
            int guard = 0;
            while (envelope(hi) < y) {
                hi *= 2.0;
                if (++guard > 2000) return kInf;
            }
        }
    }
    while (hi - lo > 1e-12 * std::max(1.0, hi)) {
        double mid = 0.5 * (lo + hi);
        (envelope(mid) >= y ? hi : lo) = mid;
    }
    return hi;
}

bool GeneratingFunction::inverse_uses_envelope() const {
    if (std::holds_alternative<SubgaussianPhi>(kind_)) return false;
    if (const auto* f = std::get_if<PhiFamily>(&kind_))
        return f->gamma < 0 && f->m * std::log(f->stitch) + f->gamma < 0;
    const auto& shape = std::get<CustomPhi>(kind_).shape;
    double scale = 0.0;
    for (double v : shape.values) scale = std::max(scale, std::abs(v));
    double lo = shape.grid.front() >= 0 ? shape.grid.front() : 0.0;
    double prev = -kInf;
    for (std::size_t i = 0; i < shape.grid.size(); ++i) {
        if (shape.grid[i] < lo) continue;
        if (shape.values[i] < prev - 1e-14 * std::max(scale, 1.0)) return true;
        prev = std::max(prev, shape.values[i]);
    }
    return false;
}

double GeneratingFunction::operator()(double lambda) const {
    KramerWindow w = window();
    if (w.finite && std::abs(lambda) > w.lambda0)
        throw std::domain_error("lambda outside the generating function window");
    return raw(std::abs(lambda));
}

ConvexGridFunction GeneratingFunction::sample_shape(const std::vector<double>& grid) const {
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) values[i] = (*this)(grid[i]);
    ConvexGridFunction g(grid, std::move(values));
    g.left_extension = Extension::plus_infinity_outside;
    g.right_extension = Extension::plus_infinity_outside;
    return g;
}

}  // namespace tiltbound
