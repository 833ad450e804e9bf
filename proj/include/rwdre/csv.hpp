#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace rwdre
{
    // Shortest text that reads back to the same double, at most 17
    // significant digits. Locale independent.
    std::string format_double(double v);

    class CsvWriter
    {
    public:
        explicit CsvWriter(std::vector<std::string> header);

        CsvWriter& cell(double v);
        CsvWriter& cell(std::int64_t v);
        CsvWriter& cell(std::uint64_t v);
        CsvWriter& cell(int v) { return cell(static_cast<std::int64_t>(v)); }
        CsvWriter& cell(std::string_view v);
        CsvWriter& empty();
        void end_row();

        const std::string& str() const { return buf_; }
        std::size_t rows() const { return rows_; }

    private:
        void sep();

        std::size_t columns_;
        std::size_t col_ = 0;
        std::size_t rows_ = 0;
        std::string buf_;
    };

    void write_file(const std::string& path, const std::string& content);
} // namespace rwdre
