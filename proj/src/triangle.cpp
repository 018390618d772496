#include "clmc/triangle.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "clmc/format.hpp"

namespace clmc {

namespace {

void check_cell(double v)
{
    if (!std::isfinite(v) || v < 0.0)
        throw std::invalid_argument("run-off cells must be finite and nonnegative");
}

std::vector<std::string> split_fields(const std::string& line)
{
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ','))
        fields.push_back(field);
    if (!line.empty() && line.back() == ',')
        fields.emplace_back();
    return fields;
}

bool is_blank(const std::string& s)
{
    return s.find_first_not_of(" \t\r") == std::string::npos;
}

std::vector<std::vector<std::string>> read_rows(std::istream& in)
{
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (is_blank(line))
            continue;
        rows.push_back(split_fields(line));
    }
    return rows;
}

} // namespace

RunOffTable::RunOffTable(std::size_t years, std::vector<double> cells)
    : years_(years), cells_(std::move(cells))
{
    if (years_ < 2)
        throw std::invalid_argument("run-off table needs at least two years");
    if (cells_.size() != years_ * years_)
        throw std::invalid_argument("run-off table must be square");
    for (double v : cells_)
        check_cell(v);
}

namespace {
std::vector<double> flatten(const std::vector<std::vector<double>>& rows)
{
    std::vector<double> flat;
    for (const auto& r : rows) {
        if (r.size() != rows.size())
            throw std::invalid_argument("run-off table must be square");
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return flat;
}
} // namespace

RunOffTable::RunOffTable(const std::vector<std::vector<double>>& rows)
    : RunOffTable(rows.size(), flatten(rows))
{
}

CumulativeTriangle::CumulativeTriangle(std::vector<std::vector<double>> rows) : rows_(std::move(rows))
{
    const std::size_t n = rows_.size();
    if (n < 2)
        throw std::invalid_argument("cumulative triangle needs at least two years");
    for (std::size_t i = 0; i < n; ++i) {
        if (rows_[i].size() != n - i)
            throw std::invalid_argument("cumulative triangle row " + std::to_string(i + 1) +
                                        " must hold " + std::to_string(n - i) + " values");
        for (std::size_t k = 0; k < rows_[i].size(); ++k) {
            check_cell(rows_[i][k]);
            if (k > 0 && rows_[i][k] < rows_[i][k - 1])
                throw std::invalid_argument("cumulative triangle rows must be non-decreasing");
        }
    }
}

CumulativeTriangle cumulate_upper(const RunOffTable& table)
{
    const std::size_t n = table.years();
    std::vector<std::vector<double>> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
        rows[i].resize(n - i);
        double acc = 0.0;
        for (std::size_t k = 0; k < n - i; ++k) {
            acc += table.at(i, k);
            rows[i][k] = acc;
        }
    }
    return CumulativeTriangle(std::move(rows));
}

ActualReserves actual_reserves(const RunOffTable& table)
{
    const std::size_t n = table.years();
    ActualReserves out;
    out.per_year.assign(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        double r = 0.0;
        for (std::size_t k = n - i; k < n; ++k)
            r += table.at(i, k);
        out.per_year[i] = r;
        out.total += r;
    }
    return out;
}

double upper_sum(const RunOffTable& table)
{
    const std::size_t n = table.years();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n - i; ++k)
            s += table.at(i, k);
    return s;
}

void write_csv(std::ostream& out, const RunOffTable& table)
{
    const std::size_t n = table.years();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k)
            out << (k ? "," : "") << format_number(table.at(i, k));
        out << '\n';
    }
}

void write_csv(std::ostream& out, const CumulativeTriangle& triangle)
{
    const std::size_t n = triangle.years();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            if (k)
                out << ',';
            if (k < n - i)
                out << format_number(triangle.at(i, k));
        }
        out << '\n';
    }
}

RunOffTable read_table_csv(std::istream& in)
{
    const auto fields = read_rows(in);
    std::vector<std::vector<double>> rows;
    for (const auto& r : fields) {
        std::vector<double> row;
        for (const auto& f : r)
            row.push_back(parse_number(f));
        rows.push_back(std::move(row));
    }
    return RunOffTable(rows);
}

CumulativeTriangle read_triangle_csv(std::istream& in)
{
    const auto fields = read_rows(in);
    const std::size_t n = fields.size();
    std::vector<std::vector<double>> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (fields[i].size() != n)
            throw std::invalid_argument("triangle CSV row " + std::to_string(i + 1) + " must have " +
                                        std::to_string(n) + " fields");
        for (std::size_t k = 0; k < n; ++k) {
            const bool known = k < n - i;
            if (known == is_blank(fields[i][k]))
                throw std::invalid_argument("triangle CSV: cell (" + std::to_string(i + 1) + "," +
                                            std::to_string(k + 1) +
                                            (known ? ") must be filled" : ") must be blank"));
            if (known)
                rows[i].push_back(parse_number(fields[i][k]));
        }
    }
    return CumulativeTriangle(std::move(rows));
}

} // namespace clmc
