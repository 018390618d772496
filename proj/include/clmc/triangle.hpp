#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace clmc {

/// Full I x I rectangle of incremental amounts S_ik (row = occurrence year,
/// column = development year, both 0-based). Cells with i + k >= I lie in the
/// future and are known only inside a simulation.
class RunOffTable {
public:
    RunOffTable(std::size_t years, std::vector<double> cells);
    explicit RunOffTable(const std::vector<std::vector<double>>& rows);

    std::size_t years() const noexcept { return years_; }
    double at(std::size_t i, std::size_t k) const { return cells_[i * years_ + k]; }
    std::span<const double> row(std::size_t i) const { return {cells_.data() + i * years_, years_}; }
    std::span<const double> cells() const noexcept { return cells_; }

private:
    std::size_t years_;
    std::vector<double> cells_;
};

/// Known cumulative amounts C_ik for i + k < I (0-based); row i holds I - i values.
/// Future cells are not representable, so anything built from this type sees the past only.
class CumulativeTriangle {
public:
    explicit CumulativeTriangle(std::vector<std::vector<double>> rows);

    std::size_t years() const noexcept { return rows_.size(); }
    double at(std::size_t i, std::size_t k) const { return rows_[i][k]; }
    std::span<const double> row(std::size_t i) const { return rows_[i]; }
    /// Last known (diagonal) value of occurrence year i.
    double latest(std::size_t i) const { return rows_[i].back(); }

private:
    std::vector<std::vector<double>> rows_;
};

CumulativeTriangle cumulate_upper(const RunOffTable& table);

struct ActualReserves {
    std::vector<double> per_year; ///< size I; entry 0 (oldest year) is always 0
    double total = 0.0;
};

/// Sum of the future cells of each row.
ActualReserves actual_reserves(const RunOffTable& table);

/// Sum of the incremental cells in the known (upper) part.
double upper_sum(const RunOffTable& table);

void write_csv(std::ostream& out, const RunOffTable& table);
void write_csv(std::ostream& out, const CumulativeTriangle& triangle);
RunOffTable read_table_csv(std::istream& in);
CumulativeTriangle read_triangle_csv(std::istream& in);

} // namespace clmc
