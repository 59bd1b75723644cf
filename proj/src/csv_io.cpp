#include "heatsig/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "heatsig/errors.hpp"

namespace heatsig {

std::string format_double(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc{}) throw std::invalid_argument("unformattable double");
    return std::string(buf, ptr);
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = line.find(',', pos);
        if (comma == std::string::npos) {
            cells.push_back(line.substr(pos));
            break;
        }
        cells.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return cells;
}

double parse_cell_double(const std::string& cell, int line_no,
                         const char* what) {
    double v = 0;
    const auto [ptr, ec] =
        std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
        throw ParseError("line " + std::to_string(line_no) + ": cannot parse " +
                         what + " from '" + cell + "'");
    }
    return v;
}

Day parse_cell_date(const std::string& cell, int line_no) {
    const auto d = parse_date(cell);
    if (!d) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": invalid date '" + cell + "'");
    }
    return *d;
}

// Returns data lines (header checked, CR stripped, trailing blank ignored).
struct CsvBody {
    std::vector<std::string> lines;
    int first_line_no; // line number of lines[0]
};

CsvBody read_body(std::istream& in, const std::string& expected_header,
                  const char* what) {
    std::string line;
    if (!std::getline(in, line)) {
        throw SchemaError(std::string(what) + ": empty file");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != expected_header) {
        throw SchemaError(std::string(what) + ": header must be '" +
                          expected_header + "', got '" + line + "'");
    }
    CsvBody body;
    body.first_line_no = 2;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            // allow a trailing newline, nothing else
            if (in.peek() != std::istream::traits_type::eof()) {
                throw ParseError("line " + std::to_string(line_no) +
                                 ": blank line inside data");
            }
            break;
        }
        body.lines.push_back(line);
    }
    if (body.lines.empty()) {
        throw ParseError(std::string(what) + ": no data rows");
    }
    return body;
}

// Enforces contiguous strictly-increasing daily dates.
void check_date_step(Day prev, Day cur, int line_no) {
    const auto step = (cur - prev).count();
    if (step <= 0) {
        throw OrderError("line " + std::to_string(line_no) +
                         ": dates must be strictly increasing (" +
                         format_date(cur) + " after " + format_date(prev) + ")");
    }
    if (step > 1) {
        throw GapInSeries("line " + std::to_string(line_no) + ": " +
                          std::to_string(step - 1) + " missing day(s) before " +
                          format_date(cur));
    }
}

} // namespace

HeatDemandSeries read_meter_csv(std::istream& in, std::string building_id,
                                std::optional<double> heated_area) {
    const CsvBody body = read_body(in, "date,heat_kwh", "meter csv");
    std::vector<double> phi;
    phi.reserve(body.lines.size());
    Day prev{};
    Day start{};
    for (std::size_t i = 0; i < body.lines.size(); ++i) {
        const int line_no = body.first_line_no + static_cast<int>(i);
        const auto cells = split_line(body.lines[i]);
        if (cells.size() != 2) {
            throw SchemaError("line " + std::to_string(line_no) +
                              ": expected 2 columns, got " +
                              std::to_string(cells.size()));
        }
        const Day d = parse_cell_date(cells[0], line_no);
        if (i == 0) {
            start = d;
        } else {
            check_date_step(prev, d, line_no);
        }
        prev = d;
        const double kwh = parse_cell_double(cells[1], line_no, "heat_kwh");
        if (!std::isfinite(kwh) || kwh < 0) {
            throw RangeError("line " + std::to_string(line_no) +
                             ": heat_kwh must be finite and >= 0, got " +
                             cells[1]);
        }
        phi.push_back(kwh / 24.0); // daily energy to mean power
    }
    const int n = static_cast<int>(phi.size());
    return HeatDemandSeries(DateIndex(start, n), std::move(phi),
                            std::move(building_id), heated_area);
}

HeatDemandSeries read_meter_csv(const std::filesystem::path& path,
                                std::optional<double> heated_area) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    return read_meter_csv(in, path.stem().string(), heated_area);
}

WeatherSeries read_weather_csv(std::istream& in) {
    const CsvBody body =
        read_body(in, "date,t_ambient_c,wind_ms,irradiance_wm2", "weather csv");
    std::vector<double> ta, ws, ig;
    Day prev{};
    Day start{};
    for (std::size_t i = 0; i < body.lines.size(); ++i) {
        const int line_no = body.first_line_no + static_cast<int>(i);
        const auto cells = split_line(body.lines[i]);
        if (cells.size() != 4) {
            throw SchemaError("line " + std::to_string(line_no) +
                              ": expected 4 columns, got " +
                              std::to_string(cells.size()));
        }
        const Day d = parse_cell_date(cells[0], line_no);
        if (i == 0) {
            start = d;
        } else {
            check_date_step(prev, d, line_no);
        }
        prev = d;
        const double t = parse_cell_double(cells[1], line_no, "t_ambient_c");
        const double w = parse_cell_double(cells[2], line_no, "wind_ms");
        const double s = parse_cell_double(cells[3], line_no, "irradiance_wm2");
        if (!std::isfinite(t)) {
            throw RangeError("line " + std::to_string(line_no) +
                             ": t_ambient_c must be finite");
        }
        if (!std::isfinite(w) || w < 0) {
            throw RangeError("line " + std::to_string(line_no) +
                             ": wind_ms must be finite and >= 0");
        }
        if (!std::isfinite(s) || s < 0) {
            throw RangeError("line " + std::to_string(line_no) +
                             ": irradiance_wm2 must be finite and >= 0");
        }
        ta.push_back(t);
        ws.push_back(w);
        ig.push_back(s);
    }
    const int n = static_cast<int>(ta.size());
    return WeatherSeries(DateIndex(start, n), std::move(ta), std::move(ws),
                         std::move(ig));
}

WeatherSeries read_weather_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    return read_weather_csv(in);
}

void write_meter_csv(std::ostream& out, const HeatDemandSeries& demand) {
    out << "date,heat_kwh\n";
    for (int t = 0; t < demand.size(); ++t) {
        out << format_date(demand.index().date(t)) << ','
            << format_double(demand.phi(t) * 24.0) << '\n';
    }
}

void write_weather_csv(std::ostream& out, const WeatherSeries& weather) {
    out << "date,t_ambient_c,wind_ms,irradiance_wm2\n";
    for (int t = 0; t < weather.size(); ++t) {
        out << format_date(weather.index().date(t)) << ','
            << format_double(weather.t_ambient(t)) << ','
            << format_double(weather.wind_speed(t)) << ','
            << format_double(weather.irradiance(t)) << '\n';
    }
}

void write_draws_csv(std::ostream& out, const PosteriorSamples& samples) {
    out << "chain";
    for (const auto& name : samples.names) out << ',' << name;
    out << '\n';
    for (int c = 0; c < samples.n_chains; ++c) {
        for (int d = 0; d < samples.n_draws; ++d) {
            out << c;
            for (int p = 0; p < samples.n_params(); ++p) {
                out << ',' << format_double(samples.value(c, d, p));
            }
            out << '\n';
        }
    }
}

void write_acf_csv(std::ostream& out, const std::vector<double>& acf_values) {
    out << "lag,value\n";
    for (std::size_t h = 0; h < acf_values.size(); ++h) {
        out << (h + 1) << ',' << format_double(acf_values[h]) << '\n';
    }
}

void write_r2_csv(std::ostream& out, const std::vector<double>& r2_draws) {
    out << "draw,value\n";
    for (std::size_t i = 0; i < r2_draws.size(); ++i) {
        out << i << ',' << format_double(r2_draws[i]) << '\n';
    }
}

void write_population_csv(std::ostream& out, const PopulationSummary& summary) {
    out << "model,series,median,mean,count\n";
    for (const auto& [key, s] : summary.series) {
        out << key.first << ',' << key.second << ',' << format_double(s.median)
            << ',' << format_double(s.mean) << ',' << s.values.size() << '\n';
    }
}

void write_population_hist_csv(std::ostream& out,
                               const PopulationSummary& summary) {
    out << "model,series,bin_left,bin_right,count\n";
    for (const auto& [key, s] : summary.series) {
        for (std::size_t b = 0; b < s.hist.counts.size(); ++b) {
            out << key.first << ',' << key.second << ','
                << format_double(s.hist.edges[b]) << ','
                << format_double(s.hist.edges[b + 1]) << ','
                << s.hist.counts[b] << '\n';
        }
    }
}

} // namespace heatsig
