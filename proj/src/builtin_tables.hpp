#pragma once

#include <cstddef>

// Published coefficient sets for the shipped methods. Only c, gamma, the
// strictly lower part of R, P, and the strictly lower part of S2 are stored;
// every derived matrix is recomputed from these.
namespace peer::detail {

struct RawTableau {
    const char* label;
    std::size_t s;
    double c[4];
    double gamma;
    double r_lower[6];   // rows of the strict lower triangle: (2,1), (3,1), (3,2), ...
    double p[16];        // row-major
    double s2_lower[6];  // same packing as r_lower
};

inline constexpr RawTableau kImexPeer2s = {
    "imex-peer2s",
    2,
    {0.591977499693304, 1.0, 0, 0},
    0.969486340522434,
    {-1.007885680522306, 0, 0, 0, 0, 0},
    {-1.082167419515352, 2.082167419515352,
     -1.082167419515352, 2.082167419515352,
     0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {0.819167640511257, 0, 0, 0, 0, 0},
};

inline constexpr RawTableau kImexPeer3s = {
    "imex-peer3s",
    3,
    {0.173922498101250, 0.584759944717930, 1.0, 0},
    0.456150901216430,
    {0.271188675194957, 0.099808771568803, 0.395734854902157, 0, 0, 0},
    {-0.516269158723393, 2.301256858880021, -0.784987700156628,
     -0.516269158723393, 2.301256858880021, -0.784987700156628,
     -0.516269158723393, 2.301256858880021, -0.784987700156628,
     0, 0, 0, 0, 0, 0, 0},
    {1.500000000000000, 0.204731875658678, 1.320000000000000, 0, 0, 0},
};

inline constexpr RawTableau kImexPeer4s = {
    "imex-peer4s",
    4,
    {-0.926697334544583, 0.180751924024702, 0.850343633101352, 1.0},
    0.413154106969917,
    {1.186201415903827,
     1.327861645060559, 0.525143168803633,
     1.324984727912657, 0.576558985833141, 0.071014878172581},
    {0.164346920652337, 1.941408294648193, -2.764059964877189, 1.658304749576660,
     0.424734281438207, 1.133423589655944, -0.792340606563880, 0.234182735469729,
     0.562642125818718, 0.131525283967289, 2.162128869126546, -1.856296278912553,
     0.589388877693458, -0.169092459871472, 3.071031564759426, -2.491327982581412},
    {3.884803988586850,
     -3.053336552626494, 2.821635541838257,
     -3.555025951383727, 2.895140468767150, 0.162040780709875},
};

}  // namespace peer::detail
