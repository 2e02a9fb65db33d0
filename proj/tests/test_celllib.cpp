#include <cmath>

#include "doctest.h"
#include "omnipd/celllib.hpp"
#include "test_support.hpp"

using namespace omnipd;
using namespace omnipd::test;

TEST_CASE("shipped default library loads: 20 cells x 3 architectures") {
  CellLibrary lib = load_library(read_file(data_path("library.lib")));
  auto names = lib.cell_names();
  CHECK(names.size() == 20);
  for (Arch a : {Arch::CFET, Arch::Omni3D, Arch::Omni3DNoIM})
    for (const std::string& n : names) CHECK(lib.has_cell(n, a));
  // lookup total over the shipped set, both flavors
  for (const std::string& n : names)
    for (Flavor f : {Flavor::TI, Flavor::BI}) {
      CHECK(lib.find(n, Arch::CFET, PinAccess::SIO, f) != nullptr);
      CHECK(lib.find(n, Arch::Omni3D, PinAccess::DO, f) != nullptr);
      CHECK(lib.find(n, Arch::Omni3DNoIM, PinAccess::DO, f) != nullptr);
    }
}

TEST_CASE("missing flavor counterpart is rejected") {
  std::string text = R"(param cgp_nm=42 track_pitch_nm=18
cellmaster INVD1 arch=OMNI pattern=SIO flavor=TI width_gp=1 cin=0.25 cout=0.2 rdrive=3.4 eint=0.05 tint=0.5 pins=in:A;out:Z
)";
  CHECK_THROWS_WITH_AS(load_library(text), doctest::Contains("missing BI counterpart"),
                       ValidationError);
}

TEST_CASE("negative capacitance and bad arch are rejected") {
  std::string neg = R"(cellmaster INVD1 arch=OMNI pattern=SIO flavor=TI width_gp=1 cin=-0.1 cout=0.2 rdrive=3.4 eint=0.05 tint=0.5 pins=in:A;out:Z
cellmaster INVD1 arch=OMNI pattern=SIO flavor=BI width_gp=1 cin=-0.1 cout=0.2 rdrive=3.4 eint=0.05 tint=0.5 pins=in:A;out:Z
)";
  CHECK_THROWS_AS(load_library(neg), ValidationError);
  CHECK_THROWS_AS(load_library("cellmaster X arch=WAT pattern=SIO flavor=TI width_gp=1 "
                               "cin=0.1 cout=0.1 rdrive=1 eint=0.1 tint=0.1 pins=in:A;out:Z\n"),
                  ParseError);
}

TEST_CASE("DO row deviating from SIO x delta beyond 0.5% is rejected") {
  auto row = [](const std::string& pat, double cin) {
    std::string s;
    for (const char* fl : {"TI", "BI"}) {
      s += "cellmaster INVD1 arch=OMNI pattern=" + pat + " flavor=" + fl +
           " width_gp=1 cin=" + std::to_string(cin) +
           " cout=0.200000 rdrive=3.4 eint=0.05 tint=0.5 pins=in:A;out:Z\n";
    }
    return s;
  };
  // consistent: cap_in(DO) = 1.042 x SIO, cap_out scaled too
  std::string good = row("SIO", 0.25);
  good += "cellmaster INVD1 arch=OMNI pattern=DO flavor=TI width_gp=1 cin=0.260500 "
          "cout=0.231600 rdrive=3.4 eint=0.05 tint=0.5 pins=in:A;out:Z\n";
  good += "cellmaster INVD1 arch=OMNI pattern=DO flavor=BI width_gp=1 cin=0.260500 "
          "cout=0.231600 rdrive=3.4 eint=0.05 tint=0.5 pins=in:A;out:Z\n";
  CHECK_NOTHROW(load_library(good));

  std::string bad = row("SIO", 0.25);
  bad += "cellmaster INVD1 arch=OMNI pattern=DO flavor=TI width_gp=1 cin=0.275000 "
         "cout=0.231600 rdrive=3.4 eint=0.05 tint=0.5 pins=in:A;out:Z\n";
  bad += "cellmaster INVD1 arch=OMNI pattern=DO flavor=BI width_gp=1 cin=0.275000 "
         "cout=0.231600 rdrive=3.4 eint=0.05 tint=0.5 pins=in:A;out:Z\n";
  CHECK_THROWS_WITH_AS(load_library(bad), doctest::Contains("deviates"), ValidationError);
}

TEST_CASE("MUX footprints across architectures") {
  const CellLibrary& lib = shared_library();
  const CellMaster& cfet = lib.get("MUX2D1", Arch::CFET, PinAccess::SIO, Flavor::TI);
  const CellMaster& omni = lib.get("MUX2D1", Arch::Omni3D, PinAccess::SIO, Flavor::TI);
  const CellMaster& noim = lib.get("MUX2D1", Arch::Omni3DNoIM, PinAccess::SIO, Flavor::TI);
  CHECK(cfet.width_gp == 8);
  CHECK(cfet.height_tracks == 4);
  CHECK(omni.width_gp == 7);
  CHECK(omni.height_tracks == 3);
  CHECK(noim.width_gp == 8);
  CHECK(noim.height_tracks == 3);
  CHECK(cell_area_nm2(cfet, lib) == doctest::Approx(336.0 * 72.0));
  CHECK(cell_area_nm2(omni, lib) == doctest::Approx(294.0 * 54.0));
  CHECK(cell_area_nm2(noim, lib) == doctest::Approx(336.0 * 54.0));
}

TEST_CASE("area ratios: simple cells 0.75, DFF ~1/1.8, identity 1.0") {
  const CellLibrary& lib = shared_library();
  for (const char* n : {"INVD1", "ND2D1", "NR2D1"})
    CHECK(area_ratio(lib, n, Arch::Omni3D, Arch::CFET) == doctest::Approx(0.75));
  CHECK(area_ratio(lib, "DFFD1", Arch::Omni3D, Arch::CFET) ==
        doctest::Approx(1.0 / 1.8).epsilon(0.06));  // within +-0.03 absolute
  CHECK(std::abs(area_ratio(lib, "DFFD1", Arch::Omni3D, Arch::CFET) - 1.0 / 1.8) < 0.03);
  CHECK(area_ratio(lib, "XOR2D1", Arch::CFET, Arch::CFET) == doctest::Approx(1.0));
  CHECK_THROWS_AS(area_ratio(lib, "NOPE", Arch::CFET, Arch::Omni3D), ValidationError);
}

TEST_CASE("area_ratio is scale-invariant under a global CGP change") {
  CellLibrary lib =
      characterize_library(SurrogateCoefficients{}, load_skeleton(read_file(data_path("skeleton.txt"))));
  double before = area_ratio(lib, "DFFD1", Arch::Omni3D, Arch::CFET);
  lib.cgp_nm *= 1.7;
  double after = area_ratio(lib, "DFFD1", Arch::Omni3D, Arch::CFET);
  CHECK(before == doctest::Approx(after));
}

TEST_CASE("pattern capacitance ordering and additive DIDO composition") {
  const CellLibrary& lib = shared_library();
  for (const char* name : {"INVD1", "ND2D1", "XOR2D1", "DFFD1"}) {
    const CellMaster& sio = lib.get(name, Arch::Omni3D, PinAccess::SIO, Flavor::TI);
    const CellMaster& dor = lib.get(name, Arch::Omni3D, PinAccess::DO, Flavor::TI);
    CHECK(sio.cap_total() < dor.cap_total());
    // synthesize DI/DIDO rows to check composition
    double di_total = sio.cap_in_total() * pattern_cap_in_mult(PinAccess::DI) +
                      sio.cap_out_ff * pattern_cap_out_mult(PinAccess::DI);
    double dido_total = sio.cap_in_total() * pattern_cap_in_mult(PinAccess::DIDO) +
                        sio.cap_out_ff * pattern_cap_out_mult(PinAccess::DIDO);
    CHECK(sio.cap_total() < di_total);
    double composed = sio.cap_total() + (dor.cap_total() - sio.cap_total()) +
                      (di_total - sio.cap_total());
    CHECK(std::abs(dido_total - composed) / composed < 0.005);
  }
}

TEST_CASE("noIM input caps and widths") {
  const CellLibrary& lib = shared_library();
  // via-stack-only cells shed 6.7% input cap
  for (const char* name : {"INVD1", "BUFD1"}) {
    const CellMaster& im = lib.get(name, Arch::Omni3D, PinAccess::SIO, Flavor::TI);
    const CellMaster& no = lib.get(name, Arch::Omni3DNoIM, PinAccess::SIO, Flavor::TI);
    CHECK(no.cap_in_ff[0] ==
          doctest::Approx(kNoImViaOnlyCapInRatio * im.cap_in_ff[0]).epsilon(0.001));
    CHECK(no.cap_in_ff[0] <= im.cap_in_ff[0]);
  }
  // complex cells lose the IM width saving
  for (const char* name : {"DFFD1", "XOR2D1", "MUX2D1", "AOI22D1", "OAI22D1"}) {
    const CellMaster& im = lib.get(name, Arch::Omni3D, PinAccess::SIO, Flavor::TI);
    const CellMaster& no = lib.get(name, Arch::Omni3DNoIM, PinAccess::SIO, Flavor::TI);
    CHECK(no.width_gp >= im.width_gp);
  }
}

TEST_CASE("library serialization round-trips") {
  const CellLibrary& lib = shared_library();
  std::string s1 = serialize_library(lib);
  CellLibrary lib2 = load_library(s1);
  CHECK(serialize_library(lib2) == s1);
  CHECK(lib2.vdd == doctest::Approx(lib.vdd));
}
