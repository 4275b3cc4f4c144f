#include "hysterobeam/gauss.hpp"

#include <stdexcept>

namespace hysterobeam {

namespace {

// Nodes and weights carried to 33 significant digits; the compiler rounds
// them to the nearest double.
constexpr GaussPoint kRule1[] = {
    {0.0, 2.00000000000000000000000000000000},
};
constexpr GaussPoint kRule2[] = {
    {-0.577350269189625764509148780501957, 1.00000000000000000000000000000000},
    {0.577350269189625764509148780501957, 1.00000000000000000000000000000000},
};
constexpr GaussPoint kRule3[] = {
    {-0.774596669241483377035853079956480, 0.555555555555555555555555555555556},
    {0.0, 0.888888888888888888888888888888889},
    {0.774596669241483377035853079956480, 0.555555555555555555555555555555556},
};
constexpr GaussPoint kRule4[] = {
    {-0.861136311594052575223946488892810, 0.347854845137453857373063949221999},
    {-0.339981043584856264802665759103245, 0.652145154862546142626936050778001},
    {0.339981043584856264802665759103245, 0.652145154862546142626936050778001},
    {0.861136311594052575223946488892810, 0.347854845137453857373063949221999},
};
constexpr GaussPoint kRule5[] = {
    {-0.906179845938663992797626878299393, 0.236926885056189087514264040719917},
    {-0.538469310105683091036314420700209, 0.478628670499366468041291514835638},
    {0.0, 0.568888888888888888888888888888889},
    {0.538469310105683091036314420700209, 0.478628670499366468041291514835638},
    {0.906179845938663992797626878299393, 0.236926885056189087514264040719917},
};
constexpr GaussPoint kRule6[] = {
    {-0.932469514203152027812301554493995, 0.171324492379170345040296142172733},
    {-0.661209386466264513661399595019905, 0.360761573048138607569833513837716},
    {-0.238619186083196908630501721680712, 0.467913934572691047389870343989551},
    {0.238619186083196908630501721680712, 0.467913934572691047389870343989551},
    {0.661209386466264513661399595019905, 0.360761573048138607569833513837716},
    {0.932469514203152027812301554493995, 0.171324492379170345040296142172733},
};
constexpr GaussPoint kRule7[] = {
    {-0.949107912342758524526189684047851, 0.129484966168869693270611432679082},
    {-0.741531185599394439863864773280788, 0.279705391489276667901467771423780},
    {-0.405845151377397166906606412076961, 0.381830050505118944950369775488975},
    {0.0, 0.417959183673469387755102040816327},
    {0.405845151377397166906606412076961, 0.381830050505118944950369775488975},
    {0.741531185599394439863864773280788, 0.279705391489276667901467771423780},
    {0.949107912342758524526189684047851, 0.129484966168869693270611432679082},
};
constexpr GaussPoint kRule8[] = {
    {-0.960289856497536231683560868569473, 0.101228536290376259152531354309962},
    {-0.796666477413626739591553936475830, 0.222381034453374470544355994426241},
    {-0.525532409916328985817739049189246, 0.313706645877887287337962201986601},
    {-0.183434642495649804939476142360184, 0.362683783378361982965150449277196},
    {0.183434642495649804939476142360184, 0.362683783378361982965150449277196},
    {0.525532409916328985817739049189246, 0.313706645877887287337962201986601},
    {0.796666477413626739591553936475830, 0.222381034453374470544355994426241},
    {0.960289856497536231683560868569473, 0.101228536290376259152531354309962},
};
constexpr GaussPoint kRule9[] = {
    {-0.968160239507626089835576202903673, 0.0812743883615744119718921581105237},
    {-0.836031107326635794299429788069735, 0.180648160694857404058472031242913},
    {-0.613371432700590397308702039341474, 0.260610696402935462318742869418633},
    {-0.324253423403808929038538014643337, 0.312347077040002840068630406584444},
    {0.0, 0.330239355001259763164525069286974},
    {0.324253423403808929038538014643337, 0.312347077040002840068630406584444},
    {0.613371432700590397308702039341474, 0.260610696402935462318742869418633},
    {0.836031107326635794299429788069735, 0.180648160694857404058472031242913},
    {0.968160239507626089835576202903673, 0.0812743883615744119718921581105237},
};
constexpr GaussPoint kRule10[] = {
    {-0.973906528517171720077964012084452, 0.0666713443086881375935688098933318},
    {-0.865063366688984510732096688423493, 0.149451349150580593145776339657697},
    {-0.679409568299024406234327365114874, 0.219086362515982043995534934228163},
    {-0.433395394129247190799265943165784, 0.269266719309996355091226921569469},
    {-0.148874338981631210884826001129720, 0.295524224714752870173892994651338},
    {0.148874338981631210884826001129720, 0.295524224714752870173892994651338},
    {0.433395394129247190799265943165784, 0.269266719309996355091226921569469},
    {0.679409568299024406234327365114874, 0.219086362515982043995534934228163},
    {0.865063366688984510732096688423493, 0.149451349150580593145776339657697},
    {0.973906528517171720077964012084452, 0.0666713443086881375935688098933318},
};

constexpr std::span<const GaussPoint> kRules[] = {
    kRule1, kRule2, kRule3, kRule4, kRule5,
    kRule6, kRule7, kRule8, kRule9, kRule10,
};

}  // namespace

std::span<const GaussPoint> gauss_legendre(int n) {
    if (n < 1 || n > 10) {
        throw std::invalid_argument("gauss_legendre: order must be in [1, 10]");
    }
    return kRules[n - 1];
}

}  // namespace hysterobeam
