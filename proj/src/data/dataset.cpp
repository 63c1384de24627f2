#include "hnl/data/dataset.hpp"

#include "hnl/core/error.hpp"

#include <cmath>
#include <string>

namespace hnl::data {

const char* split_name(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::val: return "val";
        case Split::test: return "test";
    }
    return "?";
}

std::size_t AlignedDataset::split_begin(Split s) const {
    switch (s) {
        case Split::train: return 0;
        case Split::val: return train_end;
        case Split::test: return val_end;
    }
    return 0;
}

std::size_t AlignedDataset::split_end(Split s) const {
    switch (s) {
        case Split::train: return train_end;
        case Split::val: return val_end;
        case Split::test: return series.size();
    }
    return 0;
}

NormStats compute_stats(const RawSeries& s, std::size_t begin, std::size_t end) {
    if (end <= begin || end > s.size()) throw ValidationError("empty statistics range");
    auto moments = [&](auto get) {
        double m = 0.0;
        for (std::size_t i = begin; i < end; ++i) m += get(i);
        m /= static_cast<double>(end - begin);
        double v = 0.0;
        for (std::size_t i = begin; i < end; ++i) v += (get(i) - m) * (get(i) - m);
        v /= static_cast<double>(end - begin);
        double sd = std::sqrt(v);
        // a constant column normalizes to zero instead of dividing by zero
        if (!(sd > 1e-12)) sd = 1.0;
        return std::pair{m, sd};
    };
    NormStats st;
    std::tie(st.mean, st.std) = moments([&](std::size_t i) { return s.values[i]; });
    for (std::size_t e = 0; e < s.exog_count(); ++e) {
        const auto [m, sd] = moments([&](std::size_t i) { return s.exog(i, e); });
        st.exog_mean.push_back(m);
        st.exog_std.push_back(sd);
    }
    return st;
}

AlignedDataset align_dataset(RawSeries series, SplitFractions f) {
    if (!(f.train > 0.0) || f.val < 0.0 || f.train + f.val > 1.0 + 1e-12) {
        throw ValidationError("split fractions must satisfy train > 0, val >= 0, train + val <= 1");
    }
    if (series.size() == 0) throw ValidationError("dataset is empty");
    const auto day = static_cast<std::size_t>(std::llround(24.0 * series.resolution));
    const std::size_t days = series.size() / std::max<std::size_t>(day, 1);
    AlignedDataset d;
    if (days >= 1 && day >= 1) {
        const auto train_days = static_cast<std::size_t>(std::floor(f.train * static_cast<double>(days) + 1e-9));
        const auto val_days = static_cast<std::size_t>(std::floor((f.train + f.val) * static_cast<double>(days) + 1e-9));
        d.train_end = train_days * day;
        d.val_end = val_days * day;
        if (f.train + f.val >= 1.0 - 1e-12) d.val_end = series.size();
        if (f.train >= 1.0 - 1e-12) d.train_end = series.size();
    } else {
        d.train_end = static_cast<std::size_t>(f.train * static_cast<double>(series.size()));
        d.val_end = static_cast<std::size_t>((f.train + f.val) * static_cast<double>(series.size()));
    }
    if (d.train_end == 0) throw ValidationError("training split is empty");
    d.stats = compute_stats(series, 0, d.train_end);
    d.series = std::move(series);
    return d;
}

std::vector<WindowSample> build_windows(const AlignedDataset& d, double window_hours, double horizon_hours,
                                        double stride_hours) {
    const double res = d.series.resolution;
    const auto steps = [&](double hours, const char* what) {
        const double x = hours * res;
        const double r = std::round(x);
        if (!(hours > 0.0) || std::abs(x - r) > 1e-9) {
            throw ValidationError(std::string(what) + " of " + std::to_string(hours) +
                                  " h is not a positive whole number of steps");
        }
        return static_cast<std::size_t>(r);
    };
    const std::size_t W = steps(window_hours, "window");
    const std::size_t H = steps(horizon_hours, "horizon");
    const std::size_t S = steps(stride_hours, "stride");
    const std::size_t n = d.series.size();
    if (n < W + H) {
        throw ValidationError("series has " + std::to_string(n) + " steps, a single window needs " +
                              std::to_string(W + H) + " (short by " + std::to_string(W + H - n) + ")");
    }
    std::vector<WindowSample> out;
    for (std::size_t o = W; o + H <= n; o += S) {
        Split split{};
        bool inside = false;
        for (Split s : {Split::train, Split::val, Split::test}) {
            if (o - W >= d.split_begin(s) && o + H <= d.split_end(s)) {
                split = s;
                inside = true;
                break;
            }
        }
        if (!inside) continue;
        WindowSample w;
        w.origin = o;
        w.origin_time = d.series.timestamps[o - 1];
        w.split = split;
        w.history.assign(d.series.values.begin() + static_cast<std::ptrdiff_t>(o - W),
                         d.series.values.begin() + static_cast<std::ptrdiff_t>(o));
        w.target.assign(d.series.values.begin() + static_cast<std::ptrdiff_t>(o),
                        d.series.values.begin() + static_cast<std::ptrdiff_t>(o + H));
        w.exog = Matrix(H, d.series.exog_count());
        for (std::size_t i = 0; i < H; ++i) {
            for (std::size_t e = 0; e < d.series.exog_count(); ++e) w.exog(i, e) = d.series.exog(o + i, e);
        }
        out.push_back(std::move(w));
    }
    if (out.empty()) throw ValidationError("no window fits entirely inside a split");
    return out;
}

std::vector<WindowSample> select_split(const std::vector<WindowSample>& samples, Split split) {
    std::vector<WindowSample> out;
    for (const auto& s : samples) {
        if (s.split == split) out.push_back(s);
    }
    return out;
}

}  // namespace hnl::data
