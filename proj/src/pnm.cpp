#include "dealias/pnm.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

namespace dealias {

namespace {

class HeaderReader {
public:
   explicit HeaderReader(std::span<const std::uint8_t> bytes)
      : bytes_(bytes)
   {
   }

   void skip_space_and_comments()
   {
      while (pos_ < bytes_.size()) {
         const auto c = bytes_[pos_];
         if (c == '#') {
            while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') {
               ++pos_;
            }
         } else if (std::isspace(c)) {
            ++pos_;
         } else {
            return;
         }
      }
   }

   long long integer(const char* field)
   {
      skip_space_and_comments();
      long long value = 0;
      std::size_t digits = 0;
      while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
         if (value > 1'000'000'000) {
            throw PnmError(PnmError::Kind::bad_header, std::string("pnm: ") + field + " too large");
         }
         value = value * 10 + (bytes_[pos_] - '0');
         ++pos_;
         ++digits;
      }
      if (digits == 0) {
         throw PnmError(PnmError::Kind::bad_header, std::string("pnm: expected ") + field);
      }
      return value;
   }

   /// The single whitespace byte that separates the header from the samples.
   void end_of_header()
   {
      if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
         throw PnmError(PnmError::Kind::bad_header, "pnm: missing whitespace after max value");
      }
      ++pos_;
   }

   std::size_t position() const { return pos_; }
   void advance(std::size_t n) { pos_ += n; }

private:
   std::span<const std::uint8_t> bytes_;
   std::size_t pos_ = 0;
};

} // namespace

PnmError::PnmError(Kind kind, const std::string& message)
   : std::runtime_error(message)
   , kind_(kind)
{
}

void PnmImage::validate() const
{
   if (width < 1 || height < 1) {
      throw std::invalid_argument("pnm: width and height must be positive");
   }
   if (max_value != 255) {
      throw std::invalid_argument("pnm: only max value 255 is supported");
   }
   if (pixels.size() != static_cast<std::size_t>(width * height * channels())) {
      throw std::invalid_argument("pnm: pixel count does not match width x height x channels");
   }
}

PnmImage read_pnm(std::span<const std::uint8_t> bytes)
{
   if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
      throw PnmError(PnmError::Kind::bad_magic, "pnm: expected magic P5 or P6");
   }
   PnmImage image;
   image.format = bytes[1] == '5' ? PnmFormat::P5 : PnmFormat::P6;

   HeaderReader header(bytes);
   header.advance(2);
   image.width = header.integer("width");
   image.height = header.integer("height");
   const long long max_value = header.integer("max value");
   if (max_value != 255) {
      throw PnmError(PnmError::Kind::bad_max_value,
                     "pnm: max value " + std::to_string(max_value) + " is not 255");
   }
   header.end_of_header();
   if (image.width < 1 || image.height < 1) {
      throw PnmError(PnmError::Kind::bad_header, "pnm: width and height must be positive");
   }

   const auto count = static_cast<std::size_t>(image.width * image.height * image.channels());
   const std::size_t start = header.position();
   if (bytes.size() - start < count) {
      throw PnmError(PnmError::Kind::truncated,
                     "pnm: expected " + std::to_string(count) + " sample bytes, found "
                        + std::to_string(bytes.size() - start));
   }
   image.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(start),
                       bytes.begin() + static_cast<std::ptrdiff_t>(start + count));
   return image;
}

PnmImage read_pnm(const std::filesystem::path& path)
{
   std::ifstream in(path, std::ios::binary);
   if (!in) {
      throw PnmError(PnmError::Kind::io, "pnm: cannot open " + path.string());
   }
   const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
   try {
      return read_pnm(bytes);
   } catch (const PnmError& e) {
      throw PnmError(e.kind(), path.string() + ": " + e.what());
   }
}

std::vector<std::uint8_t> write_pnm(const PnmImage& image)
{
   image.validate();
   const std::string header = std::string(image.format == PnmFormat::P5 ? "P5" : "P6") + "\n"
      + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
   std::vector<std::uint8_t> out(header.begin(), header.end());
   out.insert(out.end(), image.pixels.begin(), image.pixels.end());
   return out;
}

void write_pnm(const PnmImage& image, const std::filesystem::path& path)
{
   const std::vector<std::uint8_t> bytes = write_pnm(image);
   std::ofstream out(path, std::ios::binary | std::ios::trunc);
   out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
   if (!out) {
      throw PnmError(PnmError::Kind::io, "pnm: cannot write " + path.string());
   }
}

std::vector<ImagePlane> to_planes(const PnmImage& image)
{
   image.validate();
   const Index c = image.channels();
   std::vector<ImagePlane> planes(static_cast<std::size_t>(c), ImagePlane(image.height, image.width));
   for (Index y = 0; y < image.height; ++y) {
      for (Index x = 0; x < image.width; ++x) {
         for (Index k = 0; k < c; ++k) {
            planes[static_cast<std::size_t>(k)](y, x) =
               image.pixels[static_cast<std::size_t>((y * image.width + x) * c + k)];
         }
      }
   }
   return planes;
}

PnmImage from_planes(const std::vector<ImagePlane>& planes)
{
   if (planes.size() != 1 && planes.size() != 3) {
      throw std::invalid_argument("pnm: need 1 or 3 planes");
   }
   PnmImage image;
   image.format = planes.size() == 1 ? PnmFormat::P5 : PnmFormat::P6;
   image.height = planes[0].rows();
   image.width = planes[0].cols();
   for (const ImagePlane& p : planes) {
      if (p.rows() != image.height || p.cols() != image.width) {
         throw std::invalid_argument("pnm: planes differ in size");
      }
   }
   const Index c = image.channels();
   image.pixels.resize(static_cast<std::size_t>(image.width * image.height * c));
   for (Index y = 0; y < image.height; ++y) {
      for (Index x = 0; x < image.width; ++x) {
         for (Index k = 0; k < c; ++k) {
            const double v = planes[static_cast<std::size_t>(k)](y, x);
            image.pixels[static_cast<std::size_t>((y * image.width + x) * c + k)] =
               static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
         }
      }
   }
   image.validate();
   return image;
}

} // namespace dealias
