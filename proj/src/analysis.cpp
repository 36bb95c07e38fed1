#include "qnes/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "qnes/error.hpp"

namespace qnes
{
    ProgressSeries progress_factors(std::span<const long> iterations, std::span<const double> gaps)
    {
        if (iterations.size() != gaps.size())
            throw InvalidInput("progress_factors: iteration and gap series differ in length");
        ProgressSeries out;
        for (std::size_t i = 1; i < gaps.size(); ++i)
        {
            if (!(gaps[i - 1] > 0.0) || !(gaps[i] > 0.0))
                continue;
            out.iteration.push_back(iterations[i]);
            out.factor.push_back(gaps[i - 1] / gaps[i]);
        }
        return out;
    }

    ProgressSeries progress_factors(const RunLog &log)
    {
        if (!log.gap_known)
            throw InvalidInput("progress_factors: the optimal value of '" + log.benchmark + "' is unknown");
        std::vector<long> its;
        std::vector<double> gaps;
        for (const auto &r : log.records)
        {
            its.push_back(r.iteration);
            gaps.push_back(r.gap);
        }
        return progress_factors(its, gaps);
    }

    double median(std::vector<double> values)
    {
        if (values.empty())
            return std::numeric_limits<double>::quiet_NaN();
        std::sort(values.begin(), values.end());
        const std::size_t n = values.size();
        return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
    }

    RateSummary summarize_rate(const ProgressSeries &series, long early_begin, long early_end, std::size_t late_count)
    {
        RateSummary s;
        s.count = series.factor.size();
        std::vector<double> early;
        for (std::size_t i = 0; i < series.factor.size(); ++i)
        {
            if (series.factor[i] > s.max_factor)
            {
                s.max_factor = series.factor[i];
                s.max_factor_iteration = series.iteration[i];
            }
            if (series.iteration[i] >= early_begin && series.iteration[i] <= early_end)
                early.push_back(series.factor[i]);
        }
        const std::size_t n_late = std::min(late_count, series.factor.size());
        s.early_median = median(std::move(early));
        s.late_median = median(std::vector<double>(series.factor.end() - n_late, series.factor.end()));
        return s;
    }

    namespace
    {
        constexpr const char *kHeader = "iter,evals,gap,f_mean,sigma,det_err,R,step_type,eta,segment";

        std::string sci(double v)
        {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17e", v);
            return buf;
        }

        std::vector<std::string> split_fields(const std::string &line)
        {
            std::vector<std::string> out;
            std::string field;
            std::istringstream in(line);
            while (std::getline(in, field, ','))
                out.push_back(field);
            if (!line.empty() && line.back() == ',')
                out.emplace_back();
            return out;
        }

        double parse_double(const std::string &s, const std::filesystem::path &path, std::size_t line)
        {
            try
            {
                std::size_t used = 0;
                const double v = std::stod(s, &used);
                if (used != s.size())
                    throw std::invalid_argument(s);
                return v;
            }
            catch (const std::exception &)
            {
                // stod rejects subnormal/overflow edge cases; strtod handles them.
                char *end = nullptr;
                const double v = std::strtod(s.c_str(), &end);
                if (s.empty() || end != s.c_str() + s.size())
                    throw InvalidInput(path.string() + ":" + std::to_string(line) + ": bad number '" + s + "'");
                return v;
            }
        }
    }

    void write_csv(const RunLog &log, const std::filesystem::path &path)
    {
        std::ofstream out(path);
        if (!out)
            throw std::runtime_error("cannot open '" + path.string() + "' for writing");
        out << kHeader << '\n';
        for (const auto &r : log.records)
        {
            out << r.iteration << ',' << r.evaluations << ',' << sci(r.gap) << ',' << sci(r.f_mean) << ','
                << sci(r.sigma) << ',' << sci(r.det_error) << ',' << (r.R ? sci(*r.R) : "") << ','
                << to_string(r.step_type) << ',' << (r.eta ? sci(*r.eta) : "") << ',' << r.segment << '\n';
        }
        out.flush();
        if (!out)
            throw std::runtime_error("write to '" + path.string() + "' failed");
    }

    RunLog read_csv(const std::filesystem::path &path)
    {
        std::ifstream in(path);
        if (!in)
            throw std::runtime_error("cannot open '" + path.string() + "' for reading");
        std::string line;
        if (!std::getline(in, line) || line != kHeader)
            throw InvalidInput(path.string() + ": missing or unexpected CSV header");

        RunLog log;
        std::size_t line_no = 1;
        while (std::getline(in, line))
        {
            ++line_no;
            if (line.empty())
                continue;
            const auto f = split_fields(line);
            if (f.size() != 10)
                throw InvalidInput(path.string() + ":" + std::to_string(line_no) + ": expected 10 fields");
            IterationRecord r;
            r.iteration = std::stol(f[0]);
            r.evaluations = std::stoll(f[1]);
            r.gap = parse_double(f[2], path, line_no);
            r.f_mean = parse_double(f[3], path, line_no);
            r.sigma = parse_double(f[4], path, line_no);
            r.det_error = parse_double(f[5], path, line_no);
            if (!f[6].empty())
                r.R = parse_double(f[6], path, line_no);
            r.step_type = parse_step_type(f[7]);
            if (!f[8].empty())
                r.eta = parse_double(f[8], path, line_no);
            r.segment = std::stoi(f[9]);
            log.records.push_back(r);
        }
        return log;
    }
}
