#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pisa/common.hpp"
#include "pisa/numerics.hpp"

namespace pisa {

// CRC-32 (IEEE, reflected, poly 0xEDB88320).
std::uint32_t crc32(const std::uint8_t* data, std::size_t len, std::uint32_t seed = 0);

// Little-endian binary checkpoint layout shared by all artifact files:
// magic bytes, then a payload of u32/f64 fields, then CRC32 of the payload.
class BinWriter {
public:
    explicit BinWriter(std::string magic);

    void put_u32(std::uint32_t v);
    void put_u64(std::uint64_t v);
    void put_f64(double v);
    void put_f64_block(const std::vector<double>& v);
    void put_matrix(const Matrix& m); // values only; dims are written by the caller

    // Appends the payload CRC and writes the file atomically (tmp + rename).
    void save(const std::filesystem::path& path) const;

private:
    std::string magic_;
    std::vector<std::uint8_t> payload_;
};

class BinReader {
public:
    // Loads the file, verifies magic and trailing CRC. Throws DataError on
    // any mismatch or truncation.
    BinReader(const std::filesystem::path& path, const std::string& magic);

    std::uint32_t get_u32();
    std::uint64_t get_u64();
    double get_f64();
    void get_f64_block(std::vector<double>& out, std::size_t count);
    Matrix get_matrix(std::size_t rows, std::size_t cols);

    bool exhausted() const { return pos_ == payload_.size(); }

private:
    void need(std::size_t n) const;

    std::string path_;
    std::vector<std::uint8_t> payload_;
    std::size_t pos_ = 0;
};

} // namespace pisa
