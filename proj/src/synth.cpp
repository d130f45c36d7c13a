#include "egoseg/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <iterator>
#include <map>
#include <random>
#include <set>

#include "egoseg/error.hpp"
#include "egoseg/io.hpp"

namespace egoseg {

using nlohmann::json;

json SynthSpec::to_json() const {
    json doc{{"n", n}, {"noise_sigma", noise_sigma}, {"seed", seed}, {"segments", json::array()}};
    for (const auto& s : segments) {
        json concepts = json::array();
        for (const auto& [tag, base] : s.concepts) concepts.push_back({{"tag", tag}, {"confidence", base}});
        doc["segments"].push_back({{"length", s.length}, {"mean", s.mean}, {"concepts", std::move(concepts)}});
    }
    return doc;
}

SynthSpec SynthSpec::from_json(const json& doc) {
    try {
        SynthSpec spec;
        spec.n = doc.at("n").get<std::size_t>();
        spec.noise_sigma = doc.value("noise_sigma", 0.0);
        spec.seed = doc.value("seed", std::uint64_t{0});
        for (const auto& s : doc.at("segments")) {
            SynthSegment seg;
            seg.length = s.at("length").get<std::size_t>();
            seg.mean = s.at("mean").get<std::vector<double>>();
            if (s.contains("concepts"))
                for (const auto& c : s["concepts"])
                    seg.concepts.emplace_back(c.at("tag").get<std::string>(), c.at("confidence").get<double>());
            spec.segments.push_back(std::move(seg));
        }
        return spec;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("synth spec: ") + e.what());
    }
}

void validate(const SynthSpec& spec) {
    if (spec.segments.empty()) throw ValidationError("synth spec has no segments");
    if (!(spec.noise_sigma >= 0.0)) throw ValidationError("noise_sigma must be non-negative");
    std::size_t total = 0;
    const std::size_t dim = spec.segments.front().mean.size();
    for (std::size_t k = 0; k < spec.segments.size(); ++k) {
        const auto& s = spec.segments[k];
        if (s.length == 0) throw ValidationError("synth segment " + std::to_string(k) + " is empty");
        if (s.mean.size() != dim || dim == 0)
            throw ValidationError("synth segment " + std::to_string(k) + " has a mean of the wrong dimension");
        std::set<std::string> tags;
        for (const auto& [tag, base] : s.concepts) {
            if (!(base >= 0.0 && base <= 1.0))
                throw ValidationError("synth concept '" + tag + "' has base confidence outside [0,1]");
            if (!tags.insert(tag).second) throw ValidationError("synth segment repeats concept '" + tag + "'");
        }
        total += s.length;
    }
    if (total != spec.n)
        throw ValidationError("synth segment lengths sum to " + std::to_string(total) + ", not n = " +
                              std::to_string(spec.n));
}

SynthSpec load_synth_spec(const std::filesystem::path& path) {
    try {
        return SynthSpec::from_json(json::parse(read_text_file(path)));
    } catch (const json::parse_error& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

SynthData generate(const SynthSpec& spec) {
    validate(spec);
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, spec.noise_sigma > 0.0 ? spec.noise_sigma : 1.0);
    auto draw = [&] { return spec.noise_sigma > 0.0 ? noise(rng) : 0.0; };

    const auto dim = static_cast<Eigen::Index>(spec.segments.front().mean.size());
    SynthData out{{}, {}, Segmentation(spec.n, {0})};
    out.features.contextual.resize(static_cast<Eigen::Index>(spec.n), dim);
    std::vector<std::size_t> starts;
    std::size_t frame = 0;
    for (const auto& seg : spec.segments) {
        starts.push_back(frame);
        for (std::size_t t = 0; t < seg.length; ++t, ++frame) {
            char id[32];
            std::snprintf(id, sizeof id, "frame_%06zu", frame);
            out.features.frames.push_back({frame, 30.0 * static_cast<double>(frame), id});
            for (Eigen::Index j = 0; j < dim; ++j)
                out.features.contextual(static_cast<Eigen::Index>(frame), j) =
                    seg.mean[static_cast<std::size_t>(j)] + draw();
            FrameTags tags{id, {}};
            for (const auto& [tag, base] : seg.concepts) tags.tags.push_back({tag, std::clamp(base + draw(), 0.0, 1.0)});
            out.detections.frames.push_back(std::move(tags));
        }
    }
    out.gt = Segmentation(spec.n, std::move(starts));
    return out;
}

SynthSpec random_synth_spec(std::size_t segments, std::size_t length, std::size_t dim,
                            std::size_t concepts_per_segment, double noise_sigma, std::uint64_t seed) {
    if (segments == 0 || length == 0 || dim == 0) throw ValidationError("random synth spec needs non-zero sizes");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    SynthSpec spec;
    spec.n = segments * length;
    spec.noise_sigma = noise_sigma;
    spec.seed = seed;
    for (std::size_t k = 0; k < segments; ++k) {
        SynthSegment seg;
        seg.length = length;
        // sparse non-negative means, at least one active entry
        seg.mean.assign(dim, 0.0);
        bool any = false;
        for (auto& x : seg.mean)
            if (unit(rng) < 0.35) {
                x = 0.5 + unit(rng);
                any = true;
            }
        if (!any) seg.mean[k % dim] = 1.0;
        for (std::size_t c = 0; c < concepts_per_segment; ++c)
            seg.concepts.emplace_back("s" + std::to_string(k) + "_c" + std::to_string(c), 0.5 + 0.4 * unit(rng));
        seg.concepts.emplace_back("common", 0.5);
        spec.segments.push_back(std::move(seg));
    }
    return spec;
}

TableSimilarityProvider synth_similarity(const SynthSpec& spec) {
    // tags seen in exactly one segment are related to that segment's other such tags
    std::map<std::string, std::set<std::size_t>> owners;
    for (std::size_t k = 0; k < spec.segments.size(); ++k)
        for (const auto& [tag, base] : spec.segments[k].concepts) owners[tag].insert(k);

    TableSimilarityProvider prov;
    for (const auto& [tag, segs] : owners) prov.add_tag(tag, {tag});
    for (auto a = owners.begin(); a != owners.end(); ++a)
        for (auto b = std::next(a); b != owners.end(); ++b)
            if (a->second.size() == 1 && a->second == b->second) prov.set_similarity(a->first, b->first, 0.8);
    return prov;
}

}  // namespace egoseg
