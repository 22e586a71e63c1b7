// SPDX-License-Identifier: Apache-2.0
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "mcsloc/signal.hpp"

namespace mcsloc {

namespace {

static_assert(sizeof(float) == 4);

void put_u32(std::ostream& out, std::uint32_t v)
{
    const std::array<char, 4> b = {char(v & 0xff), char((v >> 8) & 0xff), char((v >> 16) & 0xff),
                                   char((v >> 24) & 0xff)};
    out.write(b.data(), 4);
}

void put_f32(std::ostream& out, float f) { put_u32(out, std::bit_cast<std::uint32_t>(f)); }

std::uint32_t get_u32(std::istream& in)
{
    std::array<unsigned char, 4> b{};
    if (!in.read(reinterpret_cast<char*>(b.data()), 4))
        throw IoError("IQF1: truncated stream");
    return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16)
           | (std::uint32_t(b[3]) << 24);
}

float get_f32(std::istream& in) { return std::bit_cast<float>(get_u32(in)); }

} // namespace

void write_iqf1(std::ostream& out, const IqFrame& frame)
{
    if (frame.samples.size() > Eigen::Index(0xFFFFFFFFu))
        throw DomainError("IQF1: frame too long");
    out.write("IQF1", 4);
    put_u32(out, std::uint32_t(frame.samples.size()));
    put_u32(out, frame.modulation ? std::uint32_t(*frame.modulation) : kUnknownModulationCode);
    put_f32(out, frame.nominal_snr_db ? float(*frame.nominal_snr_db) : std::numeric_limits<float>::quiet_NaN());
    for (Eigen::Index k = 0; k < frame.samples.size(); ++k) {
        put_f32(out, float(frame.samples(k).real()));
        put_f32(out, float(frame.samples(k).imag()));
    }
    if (!out)
        throw IoError("IQF1: write failed");
}

IqFrame read_iqf1(std::istream& in)
{
    std::array<char, 4> magic{};
    if (!in.read(magic.data(), 4) || std::memcmp(magic.data(), "IQF1", 4) != 0)
        throw IoError("IQF1: bad magic");
    const std::uint32_t count = get_u32(in);
    const std::uint32_t code = get_u32(in);
    const float snr = get_f32(in);
    IqFrame frame;
    if (code != kUnknownModulationCode) {
        if (code > 3)
            throw IoError("IQF1: unknown modulation code " + std::to_string(code));
        frame.modulation = Modulation(code);
    }
    if (!std::isnan(snr))
        frame.nominal_snr_db = double(snr);
    frame.samples.resize(Eigen::Index(count));
    for (std::uint32_t k = 0; k < count; ++k) {
        const float re = get_f32(in);
        const float im = get_f32(in);
        frame.samples(k) = {double(re), double(im)};
    }
    return frame;
}

void save_iqf1(const std::string& path, const IqFrame& frame)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("IQF1: cannot open '" + path + "' for writing");
    write_iqf1(out, frame);
}

IqFrame load_iqf1(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("IQF1: cannot open '" + path + "'");
    return read_iqf1(in);
}

} // namespace mcsloc
