#include "rwdre/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "rwdre/error.hpp"

namespace rwdre
{
    std::string format_double(double v)
    {
        if (std::isnan(v))
            return "nan";
        if (std::isinf(v))
            return v > 0 ? "inf" : "-inf";
        char buf[64];
        // shortest round-trip form, never more than 17 significant digits
        auto res = std::to_chars(buf, buf + sizeof buf, v);
        if (res.ec != std::errc{})
            throw NumericalError("format_double: to_chars failed");
        return std::string(buf, res.ptr);
    }

    CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size())
    {
        for (std::size_t i = 0; i < header.size(); ++i)
        {
            if (i)
                buf_ += ',';
            buf_ += header[i];
        }
        buf_ += '\n';
    }

    void CsvWriter::sep()
    {
        if (col_ >= columns_)
            throw UsageError("csv: too many cells in row");
        if (col_++)
            buf_ += ',';
    }

    CsvWriter& CsvWriter::cell(double v)
    {
        sep();
        buf_ += format_double(v);
        return *this;
    }

    CsvWriter& CsvWriter::cell(std::int64_t v)
    {
        sep();
        buf_ += std::to_string(v);
        return *this;
    }

    CsvWriter& CsvWriter::cell(std::uint64_t v)
    {
        sep();
        buf_ += std::to_string(v);
        return *this;
    }

    CsvWriter& CsvWriter::cell(std::string_view v)
    {
        sep();
        buf_ += v;
        return *this;
    }

    CsvWriter& CsvWriter::empty()
    {
        sep();
        return *this;
    }

    void CsvWriter::end_row()
    {
        if (col_ != columns_)
            throw UsageError("csv: row has " + std::to_string(col_) + " cells, expected " + std::to_string(columns_));
        buf_ += '\n';
        col_ = 0;
        ++rows_;
    }

    void write_file(const std::string& path, const std::string& content)
    {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw UsageError("cannot open " + path + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out)
            throw UsageError("write failed: " + path);
    }
} // namespace rwdre
