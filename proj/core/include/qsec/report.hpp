#pragma once
// CSV emission for sweep results. One fixed column schema covers every sweep
// kind; cells that do not apply stay empty.

#include "qsec/dnn.hpp"
#include "qsec/security.hpp"

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace qsec::report {

struct SweepRow {
    std::optional<double> loss_db;
    std::optional<int> n;
    std::optional<double> mu;
    std::optional<double> gain;
    std::optional<double> f;
    std::optional<double> i_w_bits;
    std::optional<double> i_x_bits_k1;
    std::optional<double> i_x_bits_k2;
    std::optional<double> accuracy;
};

inline constexpr const char* kCsvHeader =
    "loss_db,N,mu,G,F,I_w_bits,I_x_bits_k1,I_x_bits_k2,accuracy";

SweepRow to_row(const security::LeakageReport& rep);
SweepRow to_row(const dnn::TradeoffPoint& pt);
SweepRow to_row(const dnn::AccuracyPoint& pt);

std::string format_double(double v);  // shortest round-trippable-ish, inf-aware

void write_csv(std::ostream& os, const std::vector<SweepRow>& rows);

}  // namespace qsec::report
