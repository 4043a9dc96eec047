#include "text_io.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include "sica/errors.hpp"

namespace sica::detail {

Field read_field_csv(const std::filesystem::path& path, int nx, int ny) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open field file", path.string());
    Field f(nx, ny);
    std::string line;
    for (int j = 0; j < ny; ++j) {
        if (!std::getline(in, line))
            throw ParseError("field file " + path.string() + " ended before row " +
                                 std::to_string(j),
                             j + 1);
        std::string_view rest = trim(line);
        for (int i = 0; i < nx; ++i) {
            const std::size_t comma = rest.find(',');
            std::string_view token =
                trim(comma == std::string_view::npos ? rest : rest.substr(0, comma));
            auto v = parse_double(token);
            if (!v)
                throw ParseError("field file " + path.string() + ": bad value '" +
                                     std::string(token) + "'",
                                 j + 1);
            f(i, j) = *v;
            if (comma == std::string_view::npos) {
                if (i != nx - 1)
                    throw ParseError("field file " + path.string() + ": row " +
                                         std::to_string(j) + " has fewer than " +
                                         std::to_string(nx) + " values",
                                     j + 1);
                rest = {};
            } else {
                rest = rest.substr(comma + 1);
            }
        }
        if (!trim(rest).empty())
            throw ParseError("field file " + path.string() + ": row " +
                                 std::to_string(j) + " has more than " +
                                 std::to_string(nx) + " values",
                             j + 1);
    }
    return f;
}

void write_field_csv(const std::filesystem::path& path, const Field& f, int digits) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write field file", path.string());
    std::string line;
    for (int j = 0; j < f.ny(); ++j) {
        line.clear();
        for (int i = 0; i < f.nx(); ++i) {
            if (i) line += ',';
            line += format_double(f(i, j), digits);
        }
        line += '\n';
        out << line;
    }
    if (!out) throw IoError("write failed", path.string());
}

}  // namespace sica::detail
