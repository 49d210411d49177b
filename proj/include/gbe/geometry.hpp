#pragma once

#include <array>

namespace gbe {

inline constexpr double kPi = 3.14159265358979323846;

// Wrap an angle into [-pi, pi).
double wrap_angle(double a);

// Heading/elevation as differences from the canonical camera ray.
struct PolarPoint {
    double heading = 0.0;    // [-pi, pi)
    double elevation = 0.0;  // [-pi/2, pi/2]
};

// Angular bounding box around a polar center.
struct PolarExtent {
    PolarPoint center;
    double width = 0.0;   // > 0, radians
    double height = 0.0;  // > 0, radians
};

struct Pixel {
    double x = 0.0;
    double y = 0.0;
};

// Pinhole camera with per-axis field of view. heading/elevation orient the
// optical axis relative to the canonical ray.
struct Camera {
    double image_w = 640.0;
    double image_h = 480.0;
    double fov_h = kPi / 2.0;
    double fov_v = kPi / 3.0;
    double heading = 0.0;
    double elevation = 0.0;
};

// Arithmetic mean of the four bounding-box vertices.
Pixel bbox_center(const Pixel& p1, const Pixel& p2, const Pixel& p3, const Pixel& p4);

// Pixel -> angle difference from the camera's own axis, composed with the
// camera orientation so the result is relative to the canonical ray.
// Throws std::out_of_range for pixels outside the image.
PolarPoint pixel_to_polar(const Pixel& p, const Camera& camera);

// Inverse of pixel_to_polar; used when synthesizing bounding-box labels.
// Throws std::out_of_range if the direction is outside the camera frustum.
Pixel polar_to_pixel(const PolarPoint& q, const Camera& camera);

// True iff pred falls inside the extent, heading compared modulo 2*pi.
// Boundaries are inclusive.
bool localization_hit(const PolarPoint& pred, const PolarExtent& extent);

}  // namespace gbe
