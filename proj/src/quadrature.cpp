#include "smallball/quadrature.hpp"

#include "smallball/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace smallball {

namespace {

struct Panel {
    double a, b;
    double fa, fm, fb;
    double whole;
    double tolerance;
};

double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

}  // namespace

QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  const QuadratureOptions& options) {
    QuadratureResult result;
    if (a == b) return result;
    if (b < a) {
        QuadratureResult r = adaptive_simpson(f, b, a, options);
        r.value = -r.value;
        return r;
    }

    std::vector<double> cuts{a, b};
    for (double x : options.breakpoints) {
        if (x > a && x < b) cuts.push_back(x);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    const double length = b - a;
    std::vector<Panel> stack;
    // Panels are pushed in reverse so the stack pops them left to right; the
    // summation order is then fixed by position alone.
    std::vector<Panel> initial;
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double lo = cuts[s];
        const double hi = cuts[s + 1];
        const auto pieces = static_cast<std::size_t>(
            std::max(1.0, std::ceil(static_cast<double>(options.min_panels) * (hi - lo) / length)));
        const double h = (hi - lo) / static_cast<double>(pieces);
        for (std::size_t i = 0; i < pieces; ++i) {
            const double pa = lo + h * static_cast<double>(i);
            const double pb = i + 1 == pieces ? hi : lo + h * static_cast<double>(i + 1);
            const double pm = 0.5 * (pa + pb);
            Panel p{pa, pb, f(pa), f(pm), f(pb), 0.0, options.abs_tolerance * (pb - pa) / length};
            p.whole = simpson(p.a, p.b, p.fa, p.fm, p.fb);
            initial.push_back(p);
        }
    }
    stack.assign(initial.rbegin(), initial.rend());

    double total = 0.0;
    double compensation = 0.0;
    while (!stack.empty()) {
        const Panel p = stack.back();
        stack.pop_back();
        const double m = 0.5 * (p.a + p.b);
        const double lm = 0.5 * (p.a + m);
        const double rm = 0.5 * (m + p.b);
        const double flm = f(lm);
        const double frm = f(rm);
        const double left = simpson(p.a, m, p.fa, flm, p.fm);
        const double right = simpson(m, p.b, p.fm, frm, p.fb);
        const double delta = left + right - p.whole;
        if (std::abs(delta) <= 15.0 * p.tolerance || m <= p.a || m >= p.b) {
            const double piece = left + right + delta / 15.0;
            const double t = total + piece;
            compensation += std::abs(total) >= std::abs(piece) ? (total - t) + piece : (piece - t) + total;
            total = t;
            result.error_estimate += std::abs(delta) / 15.0;
            continue;
        }
        if (++result.subdivisions > options.max_subdivisions) {
            throw Error(ErrorCode::QuadratureNonConvergence,
                        "tolerance " + std::to_string(options.abs_tolerance) + " not met within " +
                            std::to_string(options.max_subdivisions) + " subdivisions on [" + std::to_string(a) +
                            ", " + std::to_string(b) + "]");
        }
        stack.push_back({m, p.b, p.fm, frm, p.fb, right, 0.5 * p.tolerance});
        stack.push_back({p.a, m, p.fa, flm, p.fm, left, 0.5 * p.tolerance});
    }
    result.value = total + compensation;
    return result;
}

}  // namespace smallball
