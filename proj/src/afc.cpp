#include "afcxpm/afc.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <vector>

#include "afcxpm/errors.hpp"

namespace afcxpm {

namespace {

constexpr double kTwoLn2 = 2.0 * std::numbers::ln2;

// FFTW planning is not thread safe.
std::mutex& fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(fftw_complex* p) const { fftw_free(p); }
};

class Fft {
public:
    explicit Fft(std::size_t n) : n_(n), buf_(fftw_alloc_complex(n))
    {
        std::lock_guard lock(fftw_planner_mutex());
        fwd_ = fftw_plan_dft_1d(static_cast<int>(n), buf_.get(), buf_.get(), FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_1d(static_cast<int>(n), buf_.get(), buf_.get(), FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~Fft()
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
    }
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

    // In place; the backward transform is unnormalised.
    void forward(std::vector<std::complex<double>>& v) { run(fwd_, v); }
    void backward(std::vector<std::complex<double>>& v) { run(bwd_, v); }

private:
    void run(fftw_plan plan, std::vector<std::complex<double>>& v)
    {
        auto* buf = reinterpret_cast<std::complex<double>*>(buf_.get());
        std::copy_n(v.data(), n_, buf);
        fftw_execute(plan);
        std::copy_n(buf, n_, v.data());
    }

    std::size_t n_;
    std::unique_ptr<fftw_complex[], FftwFree> buf_;
    fftw_plan fwd_;
    fftw_plan bwd_;
};

std::size_t next_pow2(std::size_t n)
{
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace

double dephasing_factor(double finesse) { return std::exp(-kPi * kPi / (kTwoLn2 * finesse * finesse)); }

double recall_efficiency(double d, double finesse)
{
    if (!(d >= 0.0)) throw DomainError("optical depth must be >= 0");
    if (!(finesse > 0.0)) throw DomainError("finesse must be > 0");
    const double a = 1.0 - std::exp(-d / finesse);
    return a * a * dephasing_factor(finesse);
}

double recall_efficiency_with_background(double d, double finesse, double background_od)
{
    if (!(background_od >= 0.0)) throw DomainError("background optical depth must be >= 0");
    return recall_efficiency(d, finesse) * std::exp(-background_od);
}

double recall_efficiency_d_derivative(double d, double finesse)
{
    if (!(d >= 0.0)) throw DomainError("optical depth must be >= 0");
    if (!(finesse > 0.0)) throw DomainError("finesse must be > 0");
    const double e = std::exp(-d / finesse);
    return 2.0 * (1.0 - e) * e / finesse * dephasing_factor(finesse);
}

double probe_bandwidth_hz(const ProbePulse& probe)
{
    // Gaussian intensity FWHM τ  ↔  spectral intensity FWHM 2 ln2 / (π τ)
    return kTwoLn2 / (kPi * probe.duration);
}

EchoPrediction probe_echo_amplitude(const SpectralFeature& feature, const ProbePulse& probe)
{
    if (!(probe.duration > 0.0)) throw ConfigError("probe duration must be > 0");
    const CombParams& comb = feature.comb();
    const double t_m = storage_time(comb);
    const double band_hz = comb.band_width() / kTwoPi;
    const double probe_bw = probe_bandwidth_hz(probe);

    EchoPrediction out;
    out.bandwidth_warning = probe_bw > band_hz;

    // Sampled band covers the comb and > 6 probe linewidths; the record is
    // 64 storage times long so each tooth spans >= 64/F frequency bins.
    const double span_hz = std::max(band_hz + 8.0 * comb.delta_m / kTwoPi, 8.0 * probe_bw);
    const double dt = t_m / std::ceil(t_m * span_hz);  // t_m is a whole number of samples
    const std::size_t n = next_pow2(static_cast<std::size_t>(std::ceil(64.0 * t_m / dt)));
    const double total = dt * static_cast<double>(n);
    const double dnu = 1.0 / total;

    // OD on the FFT frequency bins; detuning δ = 2πν.
    std::vector<std::complex<double>> k(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double nu = (i < n / 2 ? static_cast<double>(i) : static_cast<double>(i) - static_cast<double>(n)) * dnu;
        k[i] = 0.5 * feature.optical_depth_at(kTwoPi * nu);
    }
    Fft fft(n);
    fft.backward(k);
    for (auto& v : k) v /= static_cast<double>(n);
    // causal kernel: keep t = 0, double t > 0, drop t < 0
    for (std::size_t i = 1; i < n / 2; ++i) k[i] *= 2.0;
    for (std::size_t i = n / 2 + 1; i < n; ++i) k[i] = 0.0;
    fft.forward(k);  // complex log-transfer ℓ(ν), Re ℓ = OD/2

    const double t0 = 5.0 * probe.duration;
    std::vector<std::complex<double>> in(n), field(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * dt - t0;
        in[i] = std::exp(-kTwoLn2 * t * t / (probe.duration * probe.duration));
    }
    field = in;
    fft.forward(field);
    for (std::size_t i = 0; i < n; ++i) field[i] *= std::exp(-k[i]) / static_cast<double>(n);
    fft.backward(field);

    double e_in = 0.0, e_echo = 0.0, e_trans = 0.0;
    std::complex<double> proj = 0.0;
    const auto shift = static_cast<std::ptrdiff_t>(std::llround(t_m / dt));  // exact by construction
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * dt - t0;
        e_in += std::norm(in[i]);
        const double p = std::norm(field[i]);
        if (t >= 0.5 * t_m && t < 1.5 * t_m) e_echo += p;
        if (t >= -0.5 * t_m && t < 0.5 * t_m) e_trans += p;
        const auto j = static_cast<std::ptrdiff_t>(i) - shift;
        if (j >= 0) proj += std::conj(in[static_cast<std::size_t>(j)]) * field[i];
    }
    out.efficiency = e_echo / e_in;
    out.transmitted = e_trans / e_in;
    out.amplitude = proj / e_in;
    return out;
}

}  // namespace afcxpm
