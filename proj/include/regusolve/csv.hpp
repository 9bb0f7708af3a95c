#pragma once

// Minimal numeric CSV I/O. Matrices are written row-major, one row per line,
// values formatted with 17 significant digits so they round-trip exactly.
// Lines starting with '#' and a leading non-numeric header line are skipped
// on input.

#include "regusolve/matcore.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace regusolve::csv {

inline std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::vector<std::string> split(const std::string& line, char sep = ',')
{
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, sep))
        out.push_back(field);
    if (!line.empty() && line.back() == sep)
        out.emplace_back();
    return out;
}

inline std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline bool parse_double(const std::string& text, double& out)
{
    const std::string t = trim(text);
    if (t.empty())
        return false;
    errno = 0;
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return errno == 0 && end == t.c_str() + t.size();
}

inline Matrix parse_matrix(std::istream& in, const std::string& origin)
{
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        const auto fields = split(t);
        std::vector<double> row;
        row.reserve(fields.size());
        bool numeric = true;
        for (const auto& f : fields) {
            double v = 0.0;
            if (!parse_double(f, v)) {
                numeric = false;
                break;
            }
            row.push_back(v);
        }
        if (!numeric) {
            if (rows.empty())
                continue;  // header
            throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": non-numeric field");
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": expected "
                                     + std::to_string(rows.front().size()) + " fields, got "
                                     + std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw std::runtime_error(origin + ": no numeric rows");

    Matrix M(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (Index i = 0; i < M.rows(); ++i)
        for (Index j = 0; j < M.cols(); ++j)
            M(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return M;
}

inline Matrix read_matrix(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    return parse_matrix(in, path);
}

/// Reads a vector stored either as one column or as one row.
inline Vector read_vector(const std::string& path)
{
    const Matrix M = read_matrix(path);
    if (M.cols() == 1)
        return M.col(0);
    if (M.rows() == 1)
        return M.row(0).transpose();
    throw std::runtime_error(path + ": expected a single row or column, got "
                             + std::to_string(M.rows()) + "x" + std::to_string(M.cols()));
}

/// Column `name` of a file whose first line is a header.
inline Vector read_column(const std::string& path, const std::string& name)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    std::string header;
    if (!std::getline(in, header))
        throw std::runtime_error(path + ": empty file");
    const auto names = split(trim(header));
    std::size_t col = names.size();
    for (std::size_t k = 0; k < names.size(); ++k)
        if (trim(names[k]) == name)
            col = k;
    if (col == names.size())
        throw std::runtime_error(path + ": no column named '" + name + "'");
    const Matrix M = parse_matrix(in, path);
    if (static_cast<std::size_t>(M.cols()) != names.size())
        throw std::runtime_error(path + ": header has " + std::to_string(names.size()) + " names but rows have "
                                 + std::to_string(M.cols()) + " fields");
    return M.col(static_cast<Index>(col));
}

inline void write_matrix(std::ostream& out, const Matrix& M)
{
    for (Index i = 0; i < M.rows(); ++i) {
        for (Index j = 0; j < M.cols(); ++j) {
            if (j) out << ',';
            out << format_double(M(i, j));
        }
        out << '\n';
    }
}

inline void write_matrix(const std::string& path, const Matrix& M)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    write_matrix(out, M);
}

/// Named columns of equal length, with a header line.
inline void write_columns(const std::string& path, const std::vector<std::string>& names,
                          const std::vector<Vector>& columns)
{
    if (names.size() != columns.size() || columns.empty())
        throw std::invalid_argument("write_columns: name/column count mismatch");
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    for (std::size_t k = 0; k < names.size(); ++k)
        out << (k ? "," : "") << names[k];
    out << '\n';
    const Index len = columns.front().size();
    for (const auto& c : columns)
        if (c.size() != len)
            throw std::invalid_argument("write_columns: columns differ in length");
    for (Index i = 0; i < len; ++i) {
        for (std::size_t k = 0; k < columns.size(); ++k)
            out << (k ? "," : "") << format_double(columns[k](i));
        out << '\n';
    }
}

} // namespace regusolve::csv
