#pragma once

#include <string>
#include <vector>

#include "mrp/errors.hpp"
#include "mrp/linalg.hpp"

namespace mrp {

/// T x M panel of log-prices. Row t is the observation at dates[t].
struct LogPriceSeries {
  std::vector<std::string> tickers;
  std::vector<std::string> dates;
  Matrix values;

  std::size_t length() const noexcept { return values.rows(); }
  std::size_t assets() const noexcept { return values.cols(); }

  /// Rows [begin, begin + count).
  LogPriceSeries slice(std::size_t begin, std::size_t count) const {
    if (begin + count > length()) throw Error(ErrorCode::WindowTooLong, "slice exceeds series length");
    LogPriceSeries out{tickers, {dates.begin() + begin, dates.begin() + begin + count}, Matrix(count, assets())};
    for (std::size_t t = 0; t < count; ++t) {
      auto src = values.row(begin + t);
      std::copy(src.begin(), src.end(), out.values.row(t).begin());
    }
    return out;
  }
};

}  // namespace mrp
