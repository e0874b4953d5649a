#include "textscape/geometry.hpp"

#include "binary_io.hpp"

namespace textscape {
namespace {

constexpr std::uint32_t kLayoutVersion = 1;

}  // namespace

void write_layout(const std::filesystem::path& path, const ProjectedLayout& layout) {
  detail::ByteWriter out;
  out.write_raw("SEML");
  out.write<std::uint32_t>(kLayoutVersion);
  out.write<std::uint64_t>(layout.seed);
  out.write<std::uint32_t>(static_cast<std::uint32_t>(layout.positions.rows()));
  for (Eigen::Index i = 0; i < layout.positions.rows(); ++i) {
    out.write<float>(static_cast<float>(layout.positions(i, 0)));
    out.write<float>(static_cast<float>(layout.positions(i, 1)));
  }
  const auto& p = layout.params;
  out.write<std::uint8_t>(layout.method == ProjectionMethod::pca ? 0 : 1);
  out.write<double>(p.perplexity);
  out.write<std::uint32_t>(static_cast<std::uint32_t>(p.iterations));
  out.write<double>(p.early_exaggeration);
  out.write<std::uint32_t>(static_cast<std::uint32_t>(p.exaggeration_iterations));
  out.write<double>(p.learning_rate);
  out.write<std::uint32_t>(static_cast<std::uint32_t>(p.pca_dims));
  detail::write_file_bytes(path, out.bytes());
}

ProjectedLayout read_layout(const std::filesystem::path& path) {
  const auto bytes = detail::read_file_bytes(path);
  detail::ByteReader in(bytes, path.string());
  in.expect_magic("SEML");
  if (in.read<std::uint32_t>() != kLayoutVersion) in.fail("unsupported layout version");
  ProjectedLayout layout;
  layout.seed = in.read<std::uint64_t>();
  const auto m = in.read<std::uint32_t>();
  if (in.remaining() < std::size_t{m} * 2 * sizeof(float)) in.fail("truncated positions");
  layout.positions.resize(m, 2);
  for (std::uint32_t i = 0; i < m; ++i) {
    layout.positions(i, 0) = in.read<float>();
    layout.positions(i, 1) = in.read<float>();
  }
  if (!layout.positions.allFinite()) in.fail("non-finite position");
  const auto method = in.read<std::uint8_t>();
  if (method > 1) in.fail("unknown projection method");
  layout.method = method == 0 ? ProjectionMethod::pca : ProjectionMethod::tsne;
  auto& p = layout.params;
  p.method = layout.method;
  p.perplexity = in.read<double>();
  p.iterations = static_cast<int>(in.read<std::uint32_t>());
  p.early_exaggeration = in.read<double>();
  p.exaggeration_iterations = static_cast<int>(in.read<std::uint32_t>());
  p.learning_rate = in.read<double>();
  p.pca_dims = static_cast<int>(in.read<std::uint32_t>());
  if (!in.at_end()) in.fail("trailing bytes");
  return layout;
}

void validate(const RegionSelector& selector) {
  switch (selector.kind) {
    case RegionSelector::Kind::all:
      return;
    case RegionSelector::Kind::viewport_rect:
      if (selector.vertices.size() != 2) {
        throw Error(Errc::invalid_region, "a rectangle needs exactly two corner points");
      }
      break;
    case RegionSelector::Kind::lasso_polygon:
      if (selector.vertices.size() < 3) {
        throw Error(Errc::invalid_region, "a lasso polygon needs at least three vertices");
      }
      break;
  }
  for (const auto& v : selector.vertices) {
    if (!v.allFinite()) throw Error(Errc::invalid_region, "region vertices must be finite");
  }
}

std::vector<std::size_t> select_region(const Eigen::MatrixXd& positions,
                                       const RegionSelector& selector) {
  validate(selector);
  std::vector<std::size_t> out;
  for (Eigen::Index i = 0; i < positions.rows(); ++i) {
    const Point2<double> p(positions(i, 0), positions(i, 1));
    bool inside = true;
    if (selector.kind == RegionSelector::Kind::viewport_rect) {
      const auto& a = selector.vertices[0];
      const auto& b = selector.vertices[1];
      inside = p.x() >= std::min(a.x(), b.x()) && p.x() <= std::max(a.x(), b.x()) &&
               p.y() >= std::min(a.y(), b.y()) && p.y() <= std::max(a.y(), b.y());
    } else if (selector.kind == RegionSelector::Kind::lasso_polygon) {
      inside = point_in_polygon(selector.vertices, p);
    }
    if (inside) out.push_back(static_cast<std::size_t>(i));
  }
  return out;
}

}  // namespace textscape
