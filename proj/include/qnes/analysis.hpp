#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "qnes/runlog.hpp"

namespace qnes
{
    /// Multiplicative progress per iteration: factor at record i is
    /// gap[i-1] / gap[i]. Records where either gap is zero are skipped.
    struct ProgressSeries
    {
        std::vector<long> iteration;
        std::vector<double> factor;
    };

    ProgressSeries progress_factors(const RunLog &log);
    ProgressSeries progress_factors(std::span<const long> iterations, std::span<const double> gaps);

    double median(std::vector<double> values);

    struct RateSummary
    {
        double max_factor = 0.0;
        long max_factor_iteration = 0;
        double early_median = 0.0; ///< iterations [early_begin, early_end]
        double late_median = 0.0;  ///< last `late_count` factors
        std::size_t count = 0;

        /// late_median / early_median
        double acceleration() const { return late_median / early_median; }
    };

    RateSummary summarize_rate(const ProgressSeries &series, long early_begin = 50, long early_end = 100,
                               std::size_t late_count = 20);

    /// Columns: iter, evals, gap, f_mean, sigma, det_err, R, step_type, eta, segment.
    void write_csv(const RunLog &log, const std::filesystem::path &path);

    /// Parses the records of a CSV written by write_csv; metadata stays default.
    RunLog read_csv(const std::filesystem::path &path);
}
