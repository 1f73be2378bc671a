#include "subsearch/synthetic.hpp"

#include <cmath>
#include <string>

#include "subsearch/error.hpp"
#include "subsearch/random.hpp"

namespace subsearch {

namespace {

std::vector<float> gaussian_vector(SubstreamRng& rng, std::size_t dim,
                                   double scale) {
  std::vector<float> v(dim);
  for (auto& x : v) x = static_cast<float>(scale * rng.standard_normal());
  return v;
}

// normalize(base + noise), noise scaled so its expected norm is `spread`.
EmbeddingVector jitter(SubstreamRng& rng, std::span<const float> base,
                       double spread) {
  const double per_component = spread / std::sqrt(static_cast<double>(base.size()));
  auto v = gaussian_vector(rng, base.size(), per_component);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += base[i];
  return l2_normalize(v);
}

std::string padded(std::size_t i, int width) {
  std::string s = std::to_string(i);
  if (static_cast<int>(s.size()) < width) s.insert(0, width - s.size(), '0');
  return s;
}

}  // namespace

SyntheticDataset make_homogeneous_dataset(const SyntheticSpec& spec) {
  if (spec.images == 0 || spec.dim == 0 || spec.min_regions == 0 ||
      spec.max_regions < spec.min_regions) {
    throw InvalidArgument("invalid synthetic spec");
  }
  if (!(spec.min_extent > 0.0) || spec.max_extent > 1.0 ||
      spec.max_extent < spec.min_extent) {
    throw InvalidArgument("invalid synthetic rect extents");
  }

  SubstreamRng rng(spec.seed, "synthetic-collection");
  SyntheticDataset out;
  auto& coll = out.collection;
  coll.embeddings = EmbeddingMatrix(spec.dim, {});

  const EmbeddingVector shared = l2_normalize(gaussian_vector(rng, spec.dim, 1.0));

  auto extent = [&] {
    return spec.min_extent + (spec.max_extent - spec.min_extent) * rng.uniform();
  };

  for (std::size_t i = 0; i < spec.images; ++i) {
    ImageRecord img;
    img.image_id = "img" + padded(i, 6);
    img.frame_width_px = 1280;
    img.frame_height_px = 720;
    img.frame_embedding_row =
        coll.embeddings.append(jitter(rng, shared.values(), spec.region_spread).values());
    const std::size_t span = spec.max_regions - spec.min_regions + 1;
    const std::size_t m =
        spec.min_regions + static_cast<std::size_t>(rng.uniform() * span);
    for (std::size_t j = 0; j < m; ++j) {
      RegionRecord reg;
      reg.region_id = "r" + padded(j, 3);
      const double w = extent();
      const double h = extent();
      reg.rect = {rng.uniform() * (1.0 - w), rng.uniform() * (1.0 - h), w, h};
      reg.embedding_row = coll.embeddings.append(
          jitter(rng, shared.values(), spec.region_spread).values());
      reg.source = RegionSource::detector;
      img.regions.push_back(std::move(reg));
    }
    coll.images.push_back(std::move(img));
  }

  SubstreamRng qrng(spec.seed, "synthetic-queries");
  for (std::size_t q = 0; q < spec.queries; ++q) {
    const auto i = static_cast<std::size_t>(qrng.uniform() * spec.images);
    const auto& img = coll.images[i];
    const auto j = static_cast<std::size_t>(qrng.uniform() * img.regions.size());
    const auto& reg = img.regions[j];
    const auto target = coll.embeddings.row(reg.embedding_row);

    Annotation a;
    a.query_id = "q" + padded(q, 5);
    a.target_image_id = img.image_id;
    a.rect = reg.rect;
    a.text_long = "synthetic long description " + a.query_id;
    a.text_short = "synthetic " + a.query_id;
    a.skippable = qrng.uniform() < spec.skippable_fraction;
    a.embedding_long = jitter(qrng, target, spec.query_noise);
    a.embedding_short = jitter(qrng, target, 2.0 * spec.query_noise);
    out.annotations.push_back(std::move(a));
  }
  return out;
}

}  // namespace subsearch
