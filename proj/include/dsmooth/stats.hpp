#pragma once

#include <cmath>
#include <vector>

#include "dsmooth/error.hpp"

namespace dsmooth {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double stderr_slope = 0.0;
    double r2 = 0.0;
    int points = 0;
};

// Ordinary least squares y = a + b x.
inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y)
{
    require(x.size() == y.size(), "fit needs paired samples");
    require(x.size() >= 2, "fit needs at least two points");
    const double n = double(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    require(sxx > 0.0, "fit abscissae are degenerate");
    LineFit f;
    f.points = int(x.size());
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - f.intercept - f.slope * x[i];
        rss += r * r;
    }
    f.r2 = syy > 0.0 ? 1.0 - rss / syy : 1.0;
    f.stderr_slope = x.size() > 2 ? std::sqrt(rss / (n - 2.0) / sxx) : 0.0;
    return f;
}

inline double mean(const std::vector<double>& v)
{
    require(!v.empty(), "mean of an empty sample");
    double s = 0.0;
    for (double x : v) s += x;
    return s / double(v.size());
}

// Sample standard deviation (n - 1 denominator); 0 for a single value.
inline double sample_std(const std::vector<double>& v)
{
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / double(v.size() - 1));
}

} // namespace dsmooth
