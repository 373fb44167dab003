#include "pose6d/synth/objects.hpp"

#include <algorithm>
#include <cmath>

#include "pose6d/core/error.hpp"

namespace pose6d {

std::string shape_name(ShapeKind shape) {
  switch (shape) {
    case ShapeKind::kBox: return "box";
    case ShapeKind::kCylinder: return "cylinder";
    case ShapeKind::kSphere: return "sphere";
    case ShapeKind::kLBracket: return "l-bracket";
    case ShapeKind::kPlane: return "plane";
  }
  return "unknown";
}

namespace {

struct Sample {
  Vec3 p, n;
  double a, b;  // face-local coordinates driving the checker pattern
};

double texture_at(const SurfaceStyle& style, const Vec3& p, double a, double b) {
  double tone = style.flat_gray;
  if (style.checker) {
    const long pa = static_cast<long>(std::floor(a / style.checker_cell));
    const long pb = static_cast<long>(std::floor(b / style.checker_cell));
    tone = ((pa + pb) % 2 + 2) % 2 == 0 ? style.light : style.dark;
  }
  for (const BlobSpec& blob : style.blobs) {
    const double d2 = (p - blob.center).squaredNorm();
    const double g = std::exp(-0.5 * d2 / (blob.sigma * blob.sigma));
    tone += (blob.peak - tone) * g;
  }
  return std::clamp(tone, 0.0, 1.0);
}

ProceduralObject finish(const std::string& object_id, ShapeKind shape,
                        bool symmetric, const std::vector<Sample>& samples,
                        const SurfaceStyle& style, double diameter) {
  if (samples.empty()) {
    throw InvalidArgumentError("procedural object produced no surface samples");
  }
  ProceduralObject obj;
  obj.object_id = object_id;
  obj.shape = shape;
  obj.symmetric = symmetric;
  obj.blobs = style.blobs;
  obj.diameter = diameter;
  const int m = static_cast<int>(samples.size());
  obj.surface.points.resize(m, 3);
  obj.surface.normals.resize(m, 3);
  obj.surface.colors.resize(m, 3);
  for (int i = 0; i < m; ++i) {
    obj.surface.points.row(i) = samples[i].p.transpose();
    obj.surface.normals.row(i) = samples[i].n.transpose();
    const double tone = texture_at(style, samples[i].p, samples[i].a, samples[i].b);
    obj.surface.colors.row(i).setConstant(tone);
  }
  obj.center = obj.surface.points.colwise().mean().transpose();
  obj.surface.validate();
  return obj;
}

int steps_for(double length, double spacing) {
  return std::max(1, static_cast<int>(std::lround(length / spacing)));
}

/// Inclusive grid over one axis-aligned rectangle face.
void sample_face(std::vector<Sample>& out, const Vec3& origin, const Vec3& ea,
                 const Vec3& eb, const Vec3& normal, double spacing) {
  const double la = ea.norm(), lb = eb.norm();
  const int na = steps_for(la, spacing), nb = steps_for(lb, spacing);
  for (int i = 0; i <= na; ++i) {
    for (int j = 0; j <= nb; ++j) {
      const double fa = static_cast<double>(i) / na;
      const double fb = static_cast<double>(j) / nb;
      Sample s;
      s.p = origin + fa * ea + fb * eb;
      s.n = normal;
      s.a = fa * la;
      s.b = fb * lb;
      out.push_back(s);
    }
  }
}

void sample_box_faces(std::vector<Sample>& out, const Vec3& lo, const Vec3& hi,
                      double spacing) {
  const Vec3 d = hi - lo;
  const Vec3 ex(d.x(), 0, 0), ey(0, d.y(), 0), ez(0, 0, d.z());
  sample_face(out, Vec3(lo.x(), lo.y(), lo.z()), ey, ez, Vec3(-1, 0, 0), spacing);
  sample_face(out, Vec3(hi.x(), lo.y(), lo.z()), ey, ez, Vec3(1, 0, 0), spacing);
  sample_face(out, Vec3(lo.x(), lo.y(), lo.z()), ex, ez, Vec3(0, -1, 0), spacing);
  sample_face(out, Vec3(lo.x(), hi.y(), lo.z()), ex, ez, Vec3(0, 1, 0), spacing);
  sample_face(out, Vec3(lo.x(), lo.y(), lo.z()), ex, ey, Vec3(0, 0, -1), spacing);
  sample_face(out, Vec3(lo.x(), lo.y(), hi.z()), ex, ey, Vec3(0, 0, 1), spacing);
}

}  // namespace

ProceduralObject make_box(const std::string& object_id, const Vec3& extents,
                          const SurfaceStyle& style) {
  if (!(extents.minCoeff() > 0.0)) {
    throw InvalidArgumentError("make_box: extents must be positive");
  }
  std::vector<Sample> samples;
  sample_box_faces(samples, -extents / 2.0, extents / 2.0, style.spacing);
  return finish(object_id, ShapeKind::kBox, false, samples, style, extents.norm());
}

ProceduralObject make_cylinder(const std::string& object_id, double radius,
                               double height, const SurfaceStyle& style) {
  if (!(radius > 0.0) || !(height > 0.0)) {
    throw InvalidArgumentError("make_cylinder: dimensions must be positive");
  }
  std::vector<Sample> samples;
  const int n_theta = steps_for(2.0 * kPi * radius, style.spacing);
  const int n_z = steps_for(height, style.spacing);
  for (int i = 0; i < n_theta; ++i) {
    const double theta = 2.0 * kPi * i / n_theta;
    const Vec3 radial(std::cos(theta), std::sin(theta), 0.0);
    for (int j = 0; j <= n_z; ++j) {
      const double z = -height / 2.0 + height * j / n_z;
      Sample s;
      s.p = radius * radial + Vec3(0, 0, z);
      s.n = radial;
      s.a = theta * radius;
      s.b = z;
      samples.push_back(s);
    }
  }
  // Caps: full xy grid masked to the disc.
  const int n_r = steps_for(2.0 * radius, style.spacing);
  for (int i = 0; i <= n_r; ++i) {
    for (int j = 0; j <= n_r; ++j) {
      const double x = -radius + 2.0 * radius * i / n_r;
      const double y = -radius + 2.0 * radius * j / n_r;
      if (x * x + y * y > radius * radius) continue;
      for (int side = 0; side < 2; ++side) {
        Sample s;
        s.p = Vec3(x, y, side == 0 ? -height / 2.0 : height / 2.0);
        s.n = Vec3(0, 0, side == 0 ? -1.0 : 1.0);
        s.a = x;
        s.b = y;
        samples.push_back(s);
      }
    }
  }
  const double diameter = std::sqrt(4.0 * radius * radius + height * height);
  return finish(object_id, ShapeKind::kCylinder, true, samples, style, diameter);
}

ProceduralObject make_sphere(const std::string& object_id, double radius,
                             const SurfaceStyle& style) {
  if (!(radius > 0.0)) {
    throw InvalidArgumentError("make_sphere: radius must be positive");
  }
  std::vector<Sample> samples;
  const int n_phi = steps_for(kPi * radius, style.spacing);
  for (int i = 0; i < n_phi; ++i) {
    const double phi = kPi * (i + 0.5) / n_phi;  // band centers, poles avoided
    const double ring = std::sin(phi);
    const int n_theta = std::max(1, steps_for(2.0 * kPi * radius * ring, style.spacing));
    for (int j = 0; j < n_theta; ++j) {
      const double theta = 2.0 * kPi * j / n_theta;
      Sample s;
      s.n = Vec3(ring * std::cos(theta), ring * std::sin(theta), std::cos(phi));
      s.p = radius * s.n;
      s.a = theta * radius;
      s.b = phi * radius;
      samples.push_back(s);
    }
  }
  return finish(object_id, ShapeKind::kSphere, true, samples, style, 2.0 * radius);
}

ProceduralObject make_l_bracket(const std::string& object_id, double leg_a,
                                double leg_b, double width, double thickness,
                                const SurfaceStyle& style) {
  if (!(leg_a > 0.0) || !(leg_b > 0.0) || !(width > 0.0) || !(thickness > 0.0) ||
      thickness >= leg_a || thickness >= leg_b) {
    throw InvalidArgumentError("make_l_bracket: bad dimensions");
  }
  // Slab A runs along +x, slab B along +z; they share the corner cube.
  const Vec3 a_lo(0, 0, 0), a_hi(leg_a, width, thickness);
  const Vec3 b_lo(0, 0, 0), b_hi(thickness, width, leg_b);
  auto strictly_inside = [](const Vec3& p, const Vec3& lo, const Vec3& hi) {
    const double eps = 1e-9;
    return p.x() > lo.x() + eps && p.x() < hi.x() - eps && p.y() > lo.y() + eps &&
           p.y() < hi.y() - eps && p.z() > lo.z() + eps && p.z() < hi.z() - eps;
  };
  std::vector<Sample> raw_a, raw_b, samples;
  sample_box_faces(raw_a, a_lo, a_hi, style.spacing);
  sample_box_faces(raw_b, b_lo, b_hi, style.spacing);
  const Vec3 shift(leg_a / 2.0, width / 2.0, leg_b / 2.0);
  for (const Sample& s : raw_a) {
    if (!strictly_inside(s.p, b_lo, b_hi)) samples.push_back(s);
  }
  for (const Sample& s : raw_b) {
    if (!strictly_inside(s.p, a_lo, a_hi)) samples.push_back(s);
  }
  for (Sample& s : samples) s.p -= shift;

  // Exact diameter from the 12 outline vertices of the L cross-section.
  const double pts[6][2] = {{0, 0},         {leg_a, 0},         {leg_a, thickness},
                            {thickness, thickness}, {thickness, leg_b}, {0, leg_b}};
  double best = 0.0;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      const double dx = pts[i][0] - pts[j][0], dz = pts[i][1] - pts[j][1];
      best = std::max(best, dx * dx + dz * dz + width * width);
    }
  }
  return finish(object_id, ShapeKind::kLBracket, false, samples, style,
                std::sqrt(best));
}

ProceduralObject make_plane(const std::string& object_id, double width,
                            double height, const SurfaceStyle& style) {
  if (!(width > 0.0) || !(height > 0.0)) {
    throw InvalidArgumentError("make_plane: dimensions must be positive");
  }
  std::vector<Sample> samples;
  sample_face(samples, Vec3(-width / 2.0, -height / 2.0, 0.0),
              Vec3(width, 0, 0), Vec3(0, height, 0), Vec3(0, 0, 1), style.spacing);
  const double diameter = std::hypot(width, height);
  return finish(object_id, ShapeKind::kPlane, false, samples, style, diameter);
}

ProceduralObject make_blob_cube(const std::string& object_id, double edge,
                                double blob_sigma) {
  SurfaceStyle style;
  style.checker = false;
  style.flat_gray = 0.5;
  const double inset = 0.275 * edge;
  const double half = edge / 2.0;
  for (int sz = -1; sz <= 1; sz += 2) {
    for (int sx = -1; sx <= 1; sx += 2) {
      for (int sy = -1; sy <= 1; sy += 2) {
        BlobSpec blob;
        blob.center = Vec3(sx * inset, sy * inset, sz * half);
        blob.sigma = blob_sigma;
        style.blobs.push_back(blob);
      }
    }
  }
  ProceduralObject obj = make_box(object_id, Vec3(edge, edge, edge), style);
  return obj;
}

}  // namespace pose6d
