#include "plumbline/image.hpp"

#include <stdexcept>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

namespace plumbline {

GrayImage load_gray(const std::string& path) {
    cv::Mat m = cv::imread(path, cv::IMREAD_UNCHANGED);
    if (m.empty())
        throw std::runtime_error("cannot read image: " + path);
    if (m.channels() == 4)
        cv::cvtColor(m, m, cv::COLOR_BGRA2BGR);
    if (m.channels() == 3)
        cv::cvtColor(m, m, cv::COLOR_BGR2GRAY);  // 0.299R + 0.587G + 0.114B
    else if (m.channels() != 1)
        throw std::runtime_error("unsupported channel count in " + path);

    double scale;
    switch (m.depth()) {
        case CV_8U: scale = 1.0 / 255.0; break;
        case CV_16U: scale = 1.0 / 65535.0; break;
        case CV_32F:
        case CV_64F: scale = 1.0; break;
        default: throw std::runtime_error("unsupported bit depth in " + path);
    }
    cv::Mat d;
    m.convertTo(d, CV_64F, scale);

    GrayImage img(d.cols, d.rows);
    for (int y = 0; y < d.rows; ++y)
        for (int x = 0; x < d.cols; ++x)
            img.at(x, y) = d.at<double>(y, x);
    return img;
}

void save_gray(const GrayImage& img, const std::string& path) {
    cv::Mat m(img.height, img.width, CV_8U);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            double v = img.at(x, y);
            v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
            m.at<uint8_t>(y, x) = static_cast<uint8_t>(v * 255.0 + 0.5);
        }
    if (!cv::imwrite(path, m))
        throw std::runtime_error("cannot write image: " + path);
}

void save_mask(const std::vector<uint8_t>& mask, int width, int height,
               const std::string& path) {
    cv::Mat m(height, width, CV_8U);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            m.at<uint8_t>(y, x) = mask[static_cast<size_t>(y) * width + x] ? 255 : 0;
    std::vector<int> flags;
    if (path.size() > 4 && path.substr(path.size() - 4) == ".png")
        flags = {cv::IMWRITE_PNG_BILEVEL, 1};
    if (!cv::imwrite(path, m, flags))
        throw std::runtime_error("cannot write mask: " + path);
}

}  // namespace plumbline
