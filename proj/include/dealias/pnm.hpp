#ifndef DEALIAS_PNM_HPP
#define DEALIAS_PNM_HPP

/**
 * @file pnm.hpp
 * @brief Binary 8-bit PGM (P5) and PPM (P6) images.
 *
 * Headers may contain comments and any whitespace; writes use the canonical
 * form "P6\n<width> <height>\n255\n" followed by the raw samples.
 */

#include "dealias/conv2d.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <vector>

namespace dealias {

enum class PnmFormat { P5, P6 };

struct PnmImage {
   PnmFormat format = PnmFormat::P6;
   Index width = 0;
   Index height = 0;
   int max_value = 255;
   std::vector<std::uint8_t> pixels; ///< row-major, channels interleaved

   Index channels() const { return format == PnmFormat::P5 ? 1 : 3; }
   void validate() const;

   friend bool operator==(const PnmImage&, const PnmImage&) = default;
};

class PnmError : public std::runtime_error {
public:
   enum class Kind { bad_magic, bad_header, bad_max_value, truncated, io };

   PnmError(Kind kind, const std::string& message);
   Kind kind() const { return kind_; }

private:
   Kind kind_;
};

PnmImage read_pnm(std::span<const std::uint8_t> bytes);
PnmImage read_pnm(const std::filesystem::path& path);

std::vector<std::uint8_t> write_pnm(const PnmImage& image);
void write_pnm(const PnmImage& image, const std::filesystem::path& path);

/// One plane per channel, values 0..255.
std::vector<ImagePlane> to_planes(const PnmImage& image);
/// Inverse of to_planes: 1 plane gives P5, 3 give P6. Values are rounded and clamped.
PnmImage from_planes(const std::vector<ImagePlane>& planes);

} // namespace dealias

#endif
