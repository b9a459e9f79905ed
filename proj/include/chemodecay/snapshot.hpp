#pragma once

#include <filesystem>
#include <string>

#include "chemodecay/spectral.hpp"

namespace chemo {

/// Binary field snapshot.
///
/// Layout: one ASCII header line terminated by '\n'
///
///   chemodecay.snapshot/1 dim=<d> points=<N> length=<L> time=<t> name=<field>
///
/// followed by N^d little-endian IEEE-754 doubles in row-major order
/// (axis 0 slowest), value k belonging to grid point x_j = j * dx.
struct Snapshot {
  ScalarField field;
  double time = 0.0;
  std::string name;
};

inline constexpr const char* kSnapshotSchema = "chemodecay.snapshot/1";

void write_snapshot(const std::filesystem::path& path, const ScalarField& field, double time,
                    const std::string& name);
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace chemo
