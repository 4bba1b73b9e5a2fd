#pragma once

// Tidy CSV for solver traces and datasets.

#include <string>
#include <vector>

#include "spdgeo/ecd.hpp"
#include "spdgeo/fixed_point.hpp"
#include "spdgeo/optim.hpp"

namespace spdgeo::io {

/// iter,cost,grad_norm,time_s
std::string trace_csv(const std::vector<TraceRow>& rows);

/// iter,delta_T_step,residual,m_dev,m_fro,alpha,cost,time_s
std::string trace_csv(const std::vector<FpTraceRow>& rows);

/// iter,cost,grad_norm,delta_T_step,time_s
std::string trace_csv(const std::vector<ecd::FitTraceRow>& rows);

/// Header x0..x{d-1}, one sample per line. Empty data gives the header only.
std::string dataset_csv(const ecd::Dataset& data);

/// Reads a dataset CSV (header optional).
ecd::Dataset parse_dataset_csv(const std::string& text);

}  // namespace spdgeo::io
