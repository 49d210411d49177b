#include "gbe/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace gbe {

double wrap_angle(double a) {
    double w = std::fmod(a + kPi, 2.0 * kPi);
    if (w < 0) w += 2.0 * kPi;
    return w - kPi;
}

Pixel bbox_center(const Pixel& p1, const Pixel& p2, const Pixel& p3, const Pixel& p4) {
    return Pixel{(p1.x + p2.x + p3.x + p4.x) / 4.0, (p1.y + p2.y + p3.y + p4.y) / 4.0};
}

PolarPoint pixel_to_polar(const Pixel& p, const Camera& camera) {
    if (p.x < 0.0 || p.x > camera.image_w || p.y < 0.0 || p.y > camera.image_h)
        throw std::out_of_range("pixel_to_polar: pixel outside image bounds");
    double half_w = camera.image_w / 2.0;
    double half_h = camera.image_h / 2.0;
    double dx = std::atan((p.x - half_w) / half_w * std::tan(camera.fov_h / 2.0));
    // Pixel y grows downward; positive elevation is up.
    double dy = std::atan((half_h - p.y) / half_h * std::tan(camera.fov_v / 2.0));
    PolarPoint out;
    out.heading = wrap_angle(camera.heading + dx);
    out.elevation = camera.elevation + dy;
    return out;
}

Pixel polar_to_pixel(const PolarPoint& q, const Camera& camera) {
    double dx = wrap_angle(q.heading - camera.heading);
    double dy = q.elevation - camera.elevation;
    if (std::abs(dx) > camera.fov_h / 2.0 || std::abs(dy) > camera.fov_v / 2.0)
        throw std::out_of_range("polar_to_pixel: direction outside camera frustum");
    double half_w = camera.image_w / 2.0;
    double half_h = camera.image_h / 2.0;
    Pixel p;
    p.x = half_w + half_w * std::tan(dx) / std::tan(camera.fov_h / 2.0);
    p.y = half_h - half_h * std::tan(dy) / std::tan(camera.fov_v / 2.0);
    return p;
}

bool localization_hit(const PolarPoint& pred, const PolarExtent& extent) {
    double dh = std::abs(wrap_angle(pred.heading - extent.center.heading));
    double de = std::abs(pred.elevation - extent.center.elevation);
    return dh <= extent.width / 2.0 && de <= extent.height / 2.0;
}

}  // namespace gbe
