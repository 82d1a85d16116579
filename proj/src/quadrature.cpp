#include "osgood/quadrature.hpp"

#include <stdexcept>

namespace osgood::quad {
namespace {

constexpr std::array<double, 2> kGl2x = {-0.577350269189625764509148780501958,
                                         0.577350269189625764509148780501958};
constexpr std::array<double, 2> kGl2w = {1.0, 1.0};
constexpr std::array<double, 3> kGl3x = {-0.774596669241483377035853079956480, 0.0,
                                         0.774596669241483377035853079956480};
constexpr std::array<double, 3> kGl3w = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
constexpr std::array<double, 4> kGl4x = {
    -0.861136311594052575223946488892809, -0.339981043584856264802665759103245,
    0.339981043584856264802665759103245, 0.861136311594052575223946488892809};
constexpr std::array<double, 4> kGl4w = {
    0.347854845137453857373063949221999, 0.652145154862546142626936050778001,
    0.652145154862546142626936050778001, 0.347854845137453857373063949221999};
constexpr std::array<double, 8> kGl8x = {
    -0.960289856497536231683560868569473, -0.796666477413626739591553936475830,
    -0.525532409916328985817739049189246, -0.183434642495649804939476142360184,
    0.183434642495649804939476142360184,  0.525532409916328985817739049189246,
    0.796666477413626739591553936475830,  0.960289856497536231683560868569473};
constexpr std::array<double, 8> kGl8w = {
    0.101228536290376259152531354309962, 0.222381034453374470544355994426241,
    0.313706645877887287337962201986601, 0.362683783378361982965150449277196,
    0.362683783378361982965150449277196, 0.313706645877887287337962201986601,
    0.222381034453374470544355994426241, 0.101228536290376259152531354309962};

const GaussLegendreRule kRule2{kGl2x, kGl2w};
const GaussLegendreRule kRule3{kGl3x, kGl3w};
const GaussLegendreRule kRule4{kGl4x, kGl4w};
const GaussLegendreRule kRule8{kGl8x, kGl8w};

}  // namespace

const GaussLegendreRule& gauss_legendre(int points) {
  switch (points) {
    case 2: return kRule2;
    case 3: return kRule3;
    case 4: return kRule4;
    case 8: return kRule8;
    default: throw std::invalid_argument("unsupported Gauss-Legendre order");
  }
}

}  // namespace osgood::quad
