#pragma once

// CSV with a header row, '.' decimal separator, LF line endings and
// round-trip number formatting. Comment lines starting with '#' may precede
// the header.

#include "gravdiff/errors.hpp"
#include "gravdiff/io/config.hpp"
#include "gravdiff/spectra.hpp"

#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

namespace gravdiff::io {

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw IoError("cannot open '" + path + "' for writing");
    }

    void comment(const std::string& text) { out_ << "# " << text << '\n'; }

    void header(const std::vector<std::string>& cols) {
        columns_ = cols.size();
        for (std::size_t i = 0; i < cols.size(); ++i) out_ << (i ? "," : "") << cols[i];
        out_ << '\n';
    }

    void row(const std::vector<double>& values) {
        if (columns_ && values.size() != columns_) throw IoError("csv row width does not match header");
        for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_double(values[i]);
        out_ << '\n';
    }

    void close() {
        out_.close();
        if (out_.fail()) throw IoError("write to '" + path_ + "' failed");
    }

    ~CsvWriter() {
        if (out_.is_open()) out_.close();
    }

private:
    std::string path_;
    std::ofstream out_;
    std::size_t columns_ = 0;
};

/// Spectrum CSV: omega_rad_s, S_total, S_grav_pos, S_grav_mom, S_thermal, S_cross.
inline void write_spectrum_csv(const std::string& path, const NoiseSpectrum& s) {
    CsvWriter w(path);
    w.comment("two-sided convention S(w) = int C(tau) exp(i w tau) dtau; units m^2 s");
    w.header({"omega_rad_s", "S_total", "S_grav_pos", "S_grav_mom", "S_thermal", "S_cross"});
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.has_components())
            w.row({s.omega[i], s.total[i], s.grav_position[i], s.grav_momentum[i], s.thermal[i], s.cross[i]});
        else
            w.row({s.omega[i], s.total[i], 0.0, 0.0, 0.0, 0.0});
    }
    w.close();
}

} // namespace gravdiff::io
