#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>

namespace convsearch {

// Little-endian binary writer/reader for the versioned index and checkpoint
// files. Strings are u32-length-prefixed UTF-8; doubles travel as IEEE-754
// bit patterns.
class BinaryWriter {
public:
    explicit BinaryWriter(const std::string& path);
    ~BinaryWriter();

    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void f64(double v);
    void str(std::string_view s);
    void bytes(const void* data, std::size_t n);
    void close();  // throws IoError on failure

private:
    std::ofstream out_;
    std::string path_;
};

class BinaryReader {
public:
    explicit BinaryReader(const std::string& path);

    std::uint32_t u32();
    std::uint64_t u64();
    double f64();
    std::string str();
    bool at_eof();

private:
    void fill(void* dst, std::size_t n);

    std::ifstream in_;
    std::string path_;
};

// SHA-256 of a file's contents, lowercase hex.
std::string sha256_file(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

}  // namespace convsearch
