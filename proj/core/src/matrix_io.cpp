#include "relfit/matrix_io.hpp"

#include "relfit/error.hpp"

#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <string>
#include <vector>

namespace relfit {

namespace {

constexpr char kMagic[8] = {'R', 'E', 'L', 'F', 'I', 'T', 'M', 'X'};
constexpr std::uint32_t kVersion = 1;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw io_error("matrix io: " + path + ": " + what);
}

// Reads everything after the magic bytes.
Matrix read_binary(std::ifstream& in, const std::string& path) {
    std::uint32_t version = 0;
    std::uint64_t rows = 0;
    std::uint64_t cols = 0;
    in.read(reinterpret_cast<char*>(&version), sizeof version);
    in.read(reinterpret_cast<char*>(&rows), sizeof rows);
    in.read(reinterpret_cast<char*>(&cols), sizeof cols);
    if (!in) fail(path, "truncated header");
    if (version != kVersion) fail(path, "unsupported format version " + std::to_string(version));
    if (rows == 0 || cols == 0) fail(path, "empty matrix");
    constexpr std::uint64_t kMaxSide = 100000000ull;
    if (rows > kMaxSide || cols > kMaxSide || rows * cols > (1ull << 31))
        fail(path, "matrix dimensions out of range");

    Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
    std::vector<double> buf(cols);
    for (std::uint64_t i = 0; i < rows; ++i) {
        in.read(reinterpret_cast<char*>(buf.data()),
                static_cast<std::streamsize>(cols * sizeof(double)));
        if (!in) fail(path, "truncated matrix data");
        for (std::uint64_t j = 0; j < cols; ++j)
            m(static_cast<Index>(i), static_cast<Index>(j)) = buf[j];
    }
    if (in.get() != std::char_traits<char>::eof()) fail(path, "trailing bytes after matrix data");
    return m;
}

Matrix parse_csv(std::istream& in, const std::string& path) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        bool blank = true;
        for (char ch : line)
            if (!std::isspace(static_cast<unsigned char>(ch))) {
                blank = false;
                break;
            }
        if (blank) continue;

        std::vector<double> row;
        const char* p = line.c_str();
        while (true) {
            char* end = nullptr;
            const double v = std::strtod(p, &end);
            if (end == p) fail(path, "unparseable number at line " + std::to_string(line_no));
            row.push_back(v);
            p = end;
            while (*p == ' ' || *p == '\t') ++p;
            if (*p == ',') {
                ++p;
                continue;
            }
            if (*p == '\0') break;
            fail(path, "unexpected character at line " + std::to_string(line_no));
        }
        if (!rows.empty() && row.size() != rows.front().size())
            fail(path, "inconsistent column count at line " + std::to_string(line_no));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) fail(path, "no data rows");

    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j)
            m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return m;
}

void check_saveable(const Matrix& m, const std::string& path) {
    if (m.rows() == 0 || m.cols() == 0) fail(path, "refusing to save an empty matrix");
}

}  // namespace

void save_matrix_binary(const std::string& path, const Matrix& m) {
    check_saveable(m, path);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(path, "cannot open for writing");
    const auto rows = static_cast<std::uint64_t>(m.rows());
    const auto cols = static_cast<std::uint64_t>(m.cols());
    out.write(kMagic, sizeof kMagic);
    out.write(reinterpret_cast<const char*>(&kVersion), sizeof kVersion);
    out.write(reinterpret_cast<const char*>(&rows), sizeof rows);
    out.write(reinterpret_cast<const char*>(&cols), sizeof cols);
    std::vector<double> buf(cols);
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) buf[static_cast<std::size_t>(j)] = m(i, j);
        out.write(reinterpret_cast<const char*>(buf.data()),
                  static_cast<std::streamsize>(cols * sizeof(double)));
    }
    out.flush();
    if (!out) fail(path, "write failed");
}

void save_matrix_csv(const std::string& path, const Matrix& m) {
    check_saveable(m, path);
    std::ofstream out(path, std::ios::trunc);
    if (!out) fail(path, "cannot open for writing");
    out << std::setprecision(17);
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j > 0) out << ',';
            out << m(i, j);
        }
        out << '\n';
    }
    out.flush();
    if (!out) fail(path, "write failed");
}

Matrix load_matrix(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open");
    char magic[sizeof kMagic] = {};
    in.read(magic, sizeof magic);
    if (in.gcount() == sizeof magic && std::memcmp(magic, kMagic, sizeof magic) == 0)
        return read_binary(in, path);
    in.clear();
    in.seekg(0);
    return parse_csv(in, path);
}

}  // namespace relfit
