#include "convsearch/io.hpp"

#include <bit>
#include <cstring>
#include <sstream>
#include <vector>

#include <openssl/evp.h>

#include "convsearch/error.hpp"

namespace convsearch {
namespace {

void put_le(std::uint64_t v, unsigned char* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<unsigned char>(v >> (8 * i));
}

std::uint64_t get_le(const unsigned char* in, std::size_t n) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(in[i]) << (8 * i);
    return v;
}

}  // namespace

BinaryWriter::BinaryWriter(const std::string& path)
    : out_(path, std::ios::binary), path_(path) {
    if (!out_) throw IoError("cannot write " + path);
}

BinaryWriter::~BinaryWriter() = default;

void BinaryWriter::u32(std::uint32_t v) {
    unsigned char buf[4];
    put_le(v, buf, 4);
    bytes(buf, 4);
}

void BinaryWriter::u64(std::uint64_t v) {
    unsigned char buf[8];
    put_le(v, buf, 8);
    bytes(buf, 8);
}

void BinaryWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void BinaryWriter::str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
}

void BinaryWriter::bytes(const void* data, std::size_t n) {
    out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
}

void BinaryWriter::close() {
    out_.close();
    if (!out_) throw IoError("write failed: " + path_);
}

BinaryReader::BinaryReader(const std::string& path)
    : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw IoError("cannot open " + path);
}

void BinaryReader::fill(void* dst, std::size_t n) {
    in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n)
        throw ParseError(path_ + ": truncated file");
}

std::uint32_t BinaryReader::u32() {
    unsigned char buf[4];
    fill(buf, 4);
    return static_cast<std::uint32_t>(get_le(buf, 4));
}

std::uint64_t BinaryReader::u64() {
    unsigned char buf[8];
    fill(buf, 8);
    return get_le(buf, 8);
}

double BinaryReader::f64() { return std::bit_cast<double>(u64()); }

std::string BinaryReader::str() {
    const std::uint32_t n = u32();
    std::string s(n, '\0');
    if (n > 0) fill(s.data(), n);
    return s;
}

bool BinaryReader::at_eof() { return in_.peek() == std::ifstream::traits_type::eof(); }

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);

    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw IoError("sha256 init failed");
    }
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        const auto got = in.gcount();
        if (got > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(got));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);

    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace convsearch
