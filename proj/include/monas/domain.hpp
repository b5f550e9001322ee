#pragma once

#include <string>

#include "monas/genome.hpp"
#include "monas/mlp.hpp"
#include "monas/search_space.hpp"

namespace monas {

// What the engine needs from a search space: the genome shape for the
// variation operators and the size objective for selection.
class SearchDomain {
public:
    virtual ~SearchDomain() = default;
    virtual GenomeShape shape() const = 0;
    virtual double size_mb(const Genome& g) const = 0;
    virtual std::string id() const = 0;
};

class MbconvDomain final : public SearchDomain {
public:
    explicit MbconvDomain(SearchSpace space) : space_(std::move(space)) { space_.validate(); }

    GenomeShape shape() const override { return space_.shape(); }
    double size_mb(const Genome& g) const override { return model_size_mb(g, space_); }
    std::string id() const override { return space_.id(); }
    const SearchSpace& space() const { return space_; }

private:
    SearchSpace space_;
};

class MlpDomain final : public SearchDomain {
public:
    explicit MlpDomain(MlpSpace space) : space_(std::move(space)) { space_.validate(); }

    GenomeShape shape() const override { return space_.shape(); }
    double size_mb(const Genome& g) const override { return space_.subnet_size_mb(g); }
    std::string id() const override { return space_.id(); }
    const MlpSpace& space() const { return space_; }

private:
    MlpSpace space_;
};

}  // namespace monas
