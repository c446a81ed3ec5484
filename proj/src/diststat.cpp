#include "quarterlens/diststat.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qlens::diststat {

HueHistogram build_histogram(std::span<const color::HsvPixel> pixels, std::string label) {
    if (pixels.empty()) throw std::invalid_argument("build_histogram: empty pixel sequence");
    HueHistogram h;
    h.label = std::move(label);
    for (const color::HsvPixel& p : pixels) {
        const int bin = std::min(static_cast<int>(p.h), kHueBins - 1);
        h.bins[std::max(0, bin)]++;
    }
    h.total = pixels.size();
    return h;
}

void accumulate(HueHistogram& a, const HueHistogram& b) {
    for (int i = 0; i < kHueBins; ++i) a.bins[i] += b.bins[i];
    a.total += b.total;
}

FittedCurve fit_curve(const HueHistogram& h, double bandwidth) {
    if (bandwidth <= 0.0) throw std::invalid_argument("fit_curve: bandwidth must be > 0");
    if (h.total == 0) throw std::invalid_argument("fit_curve: histogram has zero total");

    // Wrapped Gaussian kernel tabulated over integer bin displacements. The
    // table is symmetrized so a spike yields a circularly symmetric curve, and
    // convolving by displacement keeps rotation equivariance bit-exact.
    const int wraps = static_cast<int>(std::ceil(8.0 * bandwidth / kHueBins)) + 1;
    const double inv2s2 = 1.0 / (2.0 * bandwidth * bandwidth);
    std::array<double, kHueBins> kernel{};
    for (int d = 0; d < kHueBins; ++d) {
        double w = 0.0;
        for (int m = -wraps; m <= wraps; ++m) {
            const double x = d + m * static_cast<double>(kHueBins);
            w += std::exp(-x * x * inv2s2);
        }
        kernel[d] = w;
    }
    for (int d = 1; d < kHueBins / 2; ++d) {
        const double sym = 0.5 * (kernel[d] + kernel[kHueBins - d]);
        kernel[d] = sym;
        kernel[kHueBins - d] = sym;
    }

    double kernel_mass = 0.0;
    for (double w : kernel) kernel_mass += w;
    const double norm = 1.0 / (static_cast<double>(h.total) * kernel_mass);

    FittedCurve curve;
    curve.bandwidth = bandwidth;
    for (int i = 0; i < kHueBins; ++i) {
        double acc = 0.0;
        for (int d = 0; d < kHueBins; ++d) {
            const int j = i - d < 0 ? i - d + kHueBins : i - d;
            acc += static_cast<double>(h.bins[j]) * kernel[d];
        }
        curve.samples[i] = acc * norm;
    }
    return curve;
}

double ks_statistic(const HueHistogram& a, const HueHistogram& b) {
    if (a.total == 0 || b.total == 0)
        throw std::invalid_argument("ks_statistic: histogram has zero total");

    const double total_a = static_cast<double>(a.total);
    const double total_b = static_cast<double>(b.total);
    std::uint64_t cum_a = 0, cum_b = 0;
    double best = 0.0;
    for (int i = 0; i < kHueBins; ++i) {
        cum_a += a.bins[i];
        cum_b += b.bins[i];
        const double diff =
            std::fabs(static_cast<double>(cum_a) / total_a - static_cast<double>(cum_b) / total_b);
        best = std::max(best, diff);
    }
    return best;
}

KsMatrix ks_matrix(const std::vector<HueHistogram>& hs) {
    if (hs.size() < 2) throw std::invalid_argument("ks_matrix: need at least 2 histograms");
    KsMatrix m;
    for (const HueHistogram& h : hs) m.labels.push_back(h.label);
    m.values.assign(hs.size(), std::vector<double>(hs.size(), 0.0));
    for (std::size_t i = 0; i < hs.size(); ++i) {
        for (std::size_t j = i + 1; j < hs.size(); ++j) {
            const double d = ks_statistic(hs[i], hs[j]);
            m.values[i][j] = d;
            m.values[j][i] = d;
        }
    }
    return m;
}

namespace {

double band_fraction(const HueHistogram& h, const HueBand& band) {
    std::uint64_t mass = 0;
    for (int i = band.lo; i <= band.hi; ++i) mass += h.bins[i];
    return static_cast<double>(mass) / static_cast<double>(h.total);
}

int sign_of(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

}  // namespace

FacadeShiftReport facade_shift_report(const HueHistogram& photo, const HueHistogram& street) {
    FacadeShiftReport report;
    report.ks = ks_statistic(photo, street);
    const HueBand bands[3] = {kWarmBand, kGreenBand, kBlueBand};
    for (int i = 0; i < 3; ++i) {
        BandShift s;
        s.band = bands[i].name;
        s.lo = bands[i].lo;
        s.hi = bands[i].hi;
        s.photo_fraction = band_fraction(photo, bands[i]);
        s.street_fraction = band_fraction(street, bands[i]);
        s.delta = s.photo_fraction - s.street_fraction;
        s.direction = sign_of(s.delta);
        report.bands[i] = s;
    }
    return report;
}

}  // namespace qlens::diststat
