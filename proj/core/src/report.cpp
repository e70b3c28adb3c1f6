#include "qsec/report.hpp"

#include <cmath>
#include <cstdio>

namespace qsec::report {

SweepRow to_row(const security::LeakageReport& rep) {
    SweepRow row;
    row.loss_db = rep.loss_db;
    row.n = rep.modes;
    row.mu = rep.mu;
    row.gain = rep.gain;
    if (!rep.saturated) {
        row.i_w_bits = rep.weight_bits_per_symbol;
        row.i_x_bits_k1 = rep.data_bits_per_symbol_classical;
        row.i_x_bits_k2 = rep.data_bits_per_symbol_quantum;
    }
    return row;
}

SweepRow to_row(const dnn::TradeoffPoint& pt) {
    SweepRow row;
    row.mu = pt.mu;
    row.gain = pt.gain;
    row.f = pt.f;
    row.i_w_bits = pt.weight_bits;
    row.i_x_bits_k1 = pt.data_bits_classical;
    row.i_x_bits_k2 = pt.data_bits_quantum;
    row.accuracy = pt.accuracy;
    return row;
}

SweepRow to_row(const dnn::AccuracyPoint& pt) {
    SweepRow row;
    row.mu = pt.mu;
    row.gain = pt.gain;
    row.f = pt.f;
    row.accuracy = pt.accuracy;
    return row;
}

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << kCsvHeader << '\n';
    auto cell = [&](const auto& opt) {
        if (opt) os << format_double(static_cast<double>(*opt));
    };
    for (const auto& r : rows) {
        cell(r.loss_db);
        os << ',';
        cell(r.n);
        os << ',';
        cell(r.mu);
        os << ',';
        cell(r.gain);
        os << ',';
        cell(r.f);
        os << ',';
        cell(r.i_w_bits);
        os << ',';
        cell(r.i_x_bits_k1);
        os << ',';
        cell(r.i_x_bits_k2);
        os << ',';
        cell(r.accuracy);
        os << '\n';
    }
}

}  // namespace qsec::report
