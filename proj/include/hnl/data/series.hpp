#pragma once

#include "hnl/core/matrix.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace hnl::data {

/// Uniformly sampled target series with optional aligned exogenous columns.
/// A sample stamped t covers the interval (t - step, t].
struct RawSeries {
    std::vector<std::int64_t> timestamps;  ///< seconds since 1970-01-01 UTC
    std::vector<double> values;
    std::vector<std::string> exog_names;
    Matrix exog;                  ///< steps x exog_names.size()
    double resolution = 12.0;     ///< samples per hour
    std::size_t interpolated = 0; ///< cells filled by the missing-data policy

    std::size_t size() const noexcept { return values.size(); }
    std::size_t exog_count() const noexcept { return exog_names.size(); }
};

enum class MissingPolicy { error, interpolate };

struct CsvSchema {
    std::string timestamp_column = "timestamp";
    std::string value_column = "value";
    MissingPolicy missing = MissingPolicy::interpolate;
    std::size_t max_gap = 3;  ///< longest run of consecutive empty cells that may be filled
};

/// "YYYY-MM-DDTHH:MM:SS[Z|+00:00]" -> epoch seconds. Throws ValidationError.
std::int64_t parse_iso8601(const std::string& text);
std::string format_iso8601(std::int64_t epoch_seconds);

RawSeries read_csv(std::istream& in, const CsvSchema& schema = {});
RawSeries load_csv(const std::string& path, const CsvSchema& schema = {});

/// timestamp,value[,exog...] with shortest round-trip number formatting.
void write_csv(std::ostream& out, const RawSeries& series, const std::string& value_name = "value");

/// Block-mean downsampling of the target and every exogenous column.
RawSeries resample(const RawSeries& series, double target_resolution);

}  // namespace hnl::data
