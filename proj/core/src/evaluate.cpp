#include <cmath>
#include <sstream>

#include "eisp/eval.hpp"
#include "eisp/parallel.hpp"

namespace eisp {
namespace {

MetricSummary mean_of(const std::vector<SceneMetrics>& rows) {
    MetricSummary m;
    if (rows.empty()) return m;
    for (const auto& r : rows) {
        m.mse_rel += r.mse_rel;
        m.ssim += r.ssim;
        m.psnr += r.psnr;
    }
    const auto n = static_cast<double>(rows.size());
    return {m.mse_rel / n, m.ssim / n, m.psnr / n};
}

double stddev(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    if (!std::isfinite(mean)) return std::isnan(mean) ? mean : 0.0;
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / static_cast<double>(v.size()));
}

MetricSummary std_of(const std::vector<SceneMetrics>& rows) {
    std::vector<double> a, b, c;
    for (const auto& r : rows) {
        a.push_back(r.mse_rel);
        b.push_back(r.ssim);
        c.push_back(r.psnr);
    }
    return {stddev(a), stddev(b), stddev(c)};
}

}  // namespace

MetricReport evaluate(const Dataset& dataset, const Predictor& predictor, const EvalOptions& options) {
    require(options.trials >= 1, Errc::invalid_argument, "trials must be >= 1");
    const int side = dataset.meta.m_inv;
    const std::size_t n = dataset.records.size();
    const bool redraw = options.trials > 1 || options.noise_ratio.has_value();
    const double ratio = options.noise_ratio.value_or(dataset.meta.noise_ratio);

    // values[trial][record]
    std::vector<std::vector<SceneMetrics>> values(static_cast<std::size_t>(options.trials),
                                                  std::vector<SceneMetrics>(n));
    std::vector<std::string> errors(n);
    for (int trial = 0; trial < options.trials; ++trial) {
        parallel_for(static_cast<int>(n), options.threads, [&](int i) {
            const auto& rec = dataset.records[static_cast<std::size_t>(i)];
            if (!errors[static_cast<std::size_t>(i)].empty()) return;
            try {
                const CRowMatrix measured =
                    redraw ? add_noise(rec.clean_measured, ratio, record_noise_seed(dataset.meta.seed, rec.id, trial))
                           : rec.measured;
                const RVector pred = predictor(rec, measured);
                require(pred.allFinite(), Errc::numerical_failure, "prediction is not finite");
                SceneMetrics m;
                m.scene_id = rec.id;
                m.mse_rel = mse_rel(pred, rec.permittivity);
                m.ssim = ssim(pred, rec.permittivity, side, options.ssim);
                m.psnr = psnr(pred, rec.permittivity, options.ssim.data_range);
                values[static_cast<std::size_t>(trial)][static_cast<std::size_t>(i)] = m;
            } catch (const Error& e) {
                errors[static_cast<std::size_t>(i)] = e.what();
            }
        });
    }

    MetricReport report;
    report.trials = options.trials;
    std::vector<std::vector<SceneMetrics>> per_trial(static_cast<std::size_t>(options.trials));
    for (std::size_t i = 0; i < n; ++i) {
        if (!errors[i].empty()) {
            report.failures.push_back({dataset.records[i].id, errors[i]});
            continue;
        }
        SceneMetrics avg;
        avg.scene_id = dataset.records[i].id;
        for (int t = 0; t < options.trials; ++t) {
            const auto& v = values[static_cast<std::size_t>(t)][i];
            avg.mse_rel += v.mse_rel;
            avg.ssim += v.ssim;
            avg.psnr += v.psnr;
            per_trial[static_cast<std::size_t>(t)].push_back(v);
        }
        avg.mse_rel /= options.trials;
        avg.ssim /= options.trials;
        avg.psnr /= options.trials;
        report.scenes.push_back(avg);
    }
    report.mean = mean_of(report.scenes);
    report.std = std_of(report.scenes);
    if (options.trials > 1) {
        std::vector<SceneMetrics> means;
        for (const auto& rows : per_trial) {
            const auto m = mean_of(rows);
            means.push_back({0, m.mse_rel, m.ssim, m.psnr});
        }
        report.trial_std = std_of(means);
    }
    report.metadata["noise_ratio"] = format_real(ratio);
    report.metadata["n_transmitters"] = std::to_string(dataset.n_transmitters());
    report.metadata["records"] = std::to_string(n);
    report.metadata["failures"] = std::to_string(report.failures.size());
    report.metadata["ssim"] = "uniform " + std::to_string(options.ssim.window) + "x" +
                              std::to_string(options.ssim.window) +
                              " window, population moments, k1=0.01, k2=0.03, data_range=max(gt)-1";
    report.metadata["psnr"] = "10 log10(range^2 / mse), range=max(gt)-1, inf on exact match";
    report.metadata["mse_rel"] = "sqrt(mean(((pred - gt) / gt)^2))";
    return report;
}

namespace {

void put(std::ostringstream& out, double v) { out << format_real(v); }

void put_row(std::ostringstream& out, const std::string& label, const MetricSummary& s) {
    out << label << ',';
    put(out, s.mse_rel);
    out << ',';
    put(out, s.ssim);
    out << ',';
    put(out, s.psnr);
    out << '\n';
}

}  // namespace

std::string report_csv(const MetricReport& report) {
    std::ostringstream out;
    out << "scene_id,mse_rel,ssim,psnr\n";
    for (const auto& s : report.scenes) put_row(out, std::to_string(s.scene_id), {s.mse_rel, s.ssim, s.psnr});
    put_row(out, "#mean", report.mean);
    put_row(out, "#std", report.std);
    if (report.trial_std) put_row(out, "#trial_std", *report.trial_std);
    return out.str();
}

}  // namespace eisp
