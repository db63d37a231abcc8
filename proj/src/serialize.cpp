#include "pisa/serialize.hpp"

#include <array>
#include <cstring>
#include <fstream>

namespace pisa {

namespace {

std::array<std::uint32_t, 256> make_crc_table() {
    std::array<std::uint32_t, 256> table{};
    for (std::uint32_t i = 0; i < 256; ++i) {
        std::uint32_t c = i;
        for (int k = 0; k < 8; ++k) {
            c = (c & 1u) ? 0xEDB88320u ^ (c >> 1) : (c >> 1);
        }
        table[i] = c;
    }
    return table;
}

void append_le(std::vector<std::uint8_t>& buf, const void* src, std::size_t n) {
    const auto* bytes = static_cast<const std::uint8_t*>(src);
    // Host is little-endian on every supported target; memcpy keeps it exact.
    buf.insert(buf.end(), bytes, bytes + n);
}

} // namespace

std::uint32_t crc32(const std::uint8_t* data, std::size_t len, std::uint32_t seed) {
    static const auto table = make_crc_table();
    std::uint32_t c = seed ^ 0xFFFFFFFFu;
    for (std::size_t i = 0; i < len; ++i) {
        c = table[(c ^ data[i]) & 0xFFu] ^ (c >> 8);
    }
    return c ^ 0xFFFFFFFFu;
}

BinWriter::BinWriter(std::string magic) : magic_(std::move(magic)) {}

void BinWriter::put_u32(std::uint32_t v) { append_le(payload_, &v, sizeof v); }
void BinWriter::put_u64(std::uint64_t v) { append_le(payload_, &v, sizeof v); }
void BinWriter::put_f64(double v) { append_le(payload_, &v, sizeof v); }

void BinWriter::put_f64_block(const std::vector<double>& v) {
    if (!v.empty()) append_le(payload_, v.data(), v.size() * sizeof(double));
}

void BinWriter::put_matrix(const Matrix& m) { put_f64_block(m.data); }

void BinWriter::save(const std::filesystem::path& path) const {
    const std::uint32_t crc = crc32(payload_.data(), payload_.size());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot open for writing: " + tmp.string());
        out.write(magic_.data(), static_cast<std::streamsize>(magic_.size()));
        out.put('\0'); // magic strings are NUL-terminated on disk
        out.write(reinterpret_cast<const char*>(payload_.data()),
                  static_cast<std::streamsize>(payload_.size()));
        out.write(reinterpret_cast<const char*>(&crc), sizeof crc);
        if (!out) throw DataError("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

BinReader::BinReader(const std::filesystem::path& path, const std::string& magic)
    : path_(path.string()) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open: " + path_);
    std::vector<std::uint8_t> raw((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
    const std::size_t header = magic.size() + 1;
    if (raw.size() < header + sizeof(std::uint32_t)) {
        throw DataError("truncated file: " + path_);
    }
    if (std::memcmp(raw.data(), magic.data(), magic.size()) != 0 || raw[magic.size()] != 0) {
        throw DataError("bad magic in " + path_ + " (expected " + magic + ")");
    }
    const std::size_t payload_len = raw.size() - header - sizeof(std::uint32_t);
    std::uint32_t stored = 0;
    std::memcpy(&stored, raw.data() + header + payload_len, sizeof stored);
    const std::uint32_t computed = crc32(raw.data() + header, payload_len);
    if (stored != computed) {
        throw DataError("CRC mismatch in " + path_);
    }
    payload_.assign(raw.begin() + static_cast<std::ptrdiff_t>(header),
                    raw.begin() + static_cast<std::ptrdiff_t>(header + payload_len));
}

void BinReader::need(std::size_t n) const {
    if (pos_ + n > payload_.size()) {
        throw DataError("unexpected end of payload in " + path_);
    }
}

std::uint32_t BinReader::get_u32() {
    need(sizeof(std::uint32_t));
    std::uint32_t v = 0;
    std::memcpy(&v, payload_.data() + pos_, sizeof v);
    pos_ += sizeof v;
    return v;
}

std::uint64_t BinReader::get_u64() {
    need(sizeof(std::uint64_t));
    std::uint64_t v = 0;
    std::memcpy(&v, payload_.data() + pos_, sizeof v);
    pos_ += sizeof v;
    return v;
}

double BinReader::get_f64() {
    need(sizeof(double));
    double v = 0;
    std::memcpy(&v, payload_.data() + pos_, sizeof v);
    pos_ += sizeof v;
    return v;
}

void BinReader::get_f64_block(std::vector<double>& out, std::size_t count) {
    need(count * sizeof(double));
    out.resize(count);
    if (count) std::memcpy(out.data(), payload_.data() + pos_, count * sizeof(double));
    pos_ += count * sizeof(double);
}

Matrix BinReader::get_matrix(std::size_t rows, std::size_t cols) {
    Matrix m(rows, cols);
    get_f64_block(m.data, rows * cols);
    return m;
}

} // namespace pisa
