#include "corrdetail/io.hpp"

#include <fstream>
#include <sstream>
#include <system_error>

#include "corrdetail/error.hpp"

namespace corrdetail::io {

void atomic_write(const std::filesystem::path& path,
                  const std::function<void(std::ostream&)>& writer) {
    namespace fs = std::filesystem;
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    std::error_code ec;
    fs::create_directories(dir, ec);

    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) {
            throw DataError("cannot open \"" + tmp.string() + "\" for writing");
        }
        writer(os);
        os.flush();
        if (!os) {
            throw DataError("write failed for \"" + tmp.string() + "\"");
        }
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw DataError("cannot move \"" + tmp.string() + "\" to \"" + path.string() +
                        "\": " + ec.message());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw DataError("cannot open \"" + path.string() + "\" for reading");
    }
    std::ostringstream buf;
    buf << is.rdbuf();
    return buf.str();
}

} // namespace corrdetail::io
