#include "spdgeo/trace_csv.hpp"

#include <sstream>

#include "spdgeo/matrix_io.hpp"

namespace spdgeo::io {

namespace {

template <typename Row, typename Fn>
std::string table(const char* header, const std::vector<Row>& rows, Fn&& fields) {
  std::ostringstream out;
  out << header << '\n';
  for (const Row& r : rows) {
    const std::vector<double> v = fields(r);
    out << r.iter;
    for (double x : v) out << ',' << format_double(x);
    out << '\n';
  }
  return out.str();
}

}  // namespace

std::string trace_csv(const std::vector<TraceRow>& rows) {
  return table("iter,cost,grad_norm,time_s", rows, [](const TraceRow& r) {
    return std::vector<double>{r.cost, r.grad_norm, r.time_s};
  });
}

std::string trace_csv(const std::vector<FpTraceRow>& rows) {
  return table("iter,delta_T_step,residual,m_dev,m_fro,alpha,cost,time_s", rows,
               [](const FpTraceRow& r) {
                 return std::vector<double>{r.delta_t_step, r.residual, r.m_dev, r.m_fro,
                                            r.alpha,        r.cost,     r.time_s};
               });
}

std::string trace_csv(const std::vector<ecd::FitTraceRow>& rows) {
  return table("iter,cost,grad_norm,delta_T_step,time_s", rows, [](const ecd::FitTraceRow& r) {
    return std::vector<double>{r.cost, r.grad_norm, r.delta_t_step, r.time_s};
  });
}

std::string dataset_csv(const ecd::Dataset& data) {
  std::vector<std::string> header;
  for (Index j = 0; j < data.d(); ++j) header.push_back("x" + std::to_string(j));
  return to_csv(data.rows(), header);
}

ecd::Dataset parse_dataset_csv(const std::string& text) {
  std::vector<std::string> header;
  const Mat rows = parse_csv(text, &header);
  if (rows.rows() == 0) {
    if (header.empty()) throw InvalidInput("dataset: empty file");
    return ecd::Dataset::empty(static_cast<Index>(header.size()));
  }
  return ecd::Dataset::from_rows(rows);
}

}  // namespace spdgeo::io
