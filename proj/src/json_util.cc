#include "json_util.h"

#include <fstream>
#include <sstream>

namespace skelfit::detail {

std::string read_text_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InputError("cannot write " + path.string());
    out << text;
    if (!out.flush())
        throw InputError("write failed for " + path.string());
}

} // namespace skelfit::detail
