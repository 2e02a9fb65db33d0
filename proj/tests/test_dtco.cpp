#include <cmath>

#include "doctest.h"
#include "omnipd/dtco.hpp"
#include "test_support.hpp"

using namespace omnipd;
using namespace omnipd::test;

namespace {

SurrogateCoefficients shipped_coeffs() {
  return SurrogateCoefficients::from_config(
      KeyValueConfig::from_file(data_path("coefficients.txt")));
}

}  // namespace

TEST_CASE("design space enumerates exactly 288 sorted unique points") {
  for (Arch a : {Arch::CFET, Arch::Omni3D}) {
    auto pts = enumerate_design_space(a);
    CHECK(pts.size() == 288);
    for (std::size_t i = 1; i < pts.size(); ++i) {
      CHECK(pts[i - 1] < pts[i]);  // sorted, strictly: no duplicates
    }
  }
  DesignSpace narrow;
  narrow.vdd = {0.45};
  CHECK(enumerate_design_space(Arch::Omni3D, narrow).size() == 48);
}

TEST_CASE("feasibility filter drops exactly the short-contact cells") {
  SurrogateCoefficients c = shipped_coeffs();
  // oracle: exhaustive formula scan
  for (Arch a : {Arch::CFET, Arch::Omni3D}) {
    int infeasible = 0;
    for (const DeviceParams& p : enumerate_design_space(a)) {
      Feasibility f = check_feasibility(p, c);
      bool contact_short = 42.0 - p.lg_nm - 2.0 * p.sp_gs_nm < 10.0;
      bool expect_short = p.sp_gs_nm == 9 && p.lg_nm >= 15;
      CHECK(contact_short == expect_short);
      CHECK((f == Feasibility::ContactTooShort) == contact_short);
      if (f != Feasibility::Ok) ++infeasible;
    }
    CHECK(infeasible == 72);  // {15,16,17} x {9} x 4 sheets x 6 vdd
  }
  // spot values
  DeviceParams p;
  p.lg_nm = 14;
  p.sp_gs_nm = 9;
  CHECK(p.contact_len_nm() == doctest::Approx(10.0));
  CHECK(check_feasibility(p, c) == Feasibility::Ok);
  p.lg_nm = 17;
  CHECK(p.contact_len_nm() == doctest::Approx(7.0));
  CHECK(check_feasibility(p, c) == Feasibility::ContactTooShort);
  p.lg_nm = 14;
  p.sp_gs_nm = 5;
  CHECK(p.contact_len_nm() == doctest::Approx(18.0));
  CHECK(check_feasibility(p, c) == Feasibility::Ok);
}

TEST_CASE("vt retarget: analytic properties and bisection oracle") {
  SurrogateCoefficients c = shipped_coeffs();
  DeviceParams p;
  p.arch = Arch::Omni3D;
  p.w_ch_nm = 28;

  SUBCASE("doubling W_eff raises vt by ss*log10(2)") {
    p.n_sheets = 1;
    double v1 = retarget_vt(p, c);
    p.n_sheets = 2;
    double v2 = retarget_vt(p, c);
    CHECK(v2 - v1 == doctest::Approx(c.ss_v_dec * std::log10(2.0)).epsilon(1e-12));
  }

  SUBCASE("boundary: i0*W == target gives vt = 0") {
    SurrogateCoefficients cb = c;
    cb.i0_leak = cb.i_leak_target / 28.0;
    p.n_sheets = 1;
    CHECK(retarget_vt(p, cb) == doctest::Approx(0.0).epsilon(1e-12));
  }

  SUBCASE("closed form matches bisection to 1e-6 on random draws") {
    Rng rng(42);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
      SurrogateCoefficients cr = c;
      cr.i0_leak = 1e-9 * std::pow(10.0, 2.0 * u(rng));      // 1e-9..1e-7 A/nm
      cr.ss_v_dec = 0.06 + 0.06 * u(rng);                    // 60..120 mV/dec
      cr.i_leak_target = 1e-9 * (1.0 + 3.0 * u(rng));
      DeviceParams pr;
      pr.n_sheets = 1 + static_cast<int>(rng() % 4);
      pr.w_ch_nm = 27.0 + 2.0 * u(rng);
      double closed = retarget_vt(pr, cr);
      // bisection on the monotone leakage function i(vt) = i0*W*10^(-vt/ss)
      auto leak = [&](double vt) {
        return cr.i0_leak * pr.w_eff_nm() * std::pow(10.0, -vt / cr.ss_v_dec);
      };
      double lo = -2.0, hi = 2.0;
      for (int it = 0; it < 80; ++it) {
        double mid = (lo + hi) / 2;
        if (leak(mid) > cr.i_leak_target)
          lo = mid;
        else
          hi = mid;
      }
      CHECK(std::abs(closed - (lo + hi) / 2) < 1e-6);
    }
  }

  SUBCASE("non-positive coefficients are rejected") {
    SurrogateCoefficients cb = c;
    cb.i0_leak = -1.0;
    CHECK_THROWS_AS(retarget_vt(p, cb), ValidationError);
  }
}

TEST_CASE("ro_metrics term isolation and invariants") {
  SurrogateCoefficients c = shipped_coeffs();
  DeviceParams p;
  p.arch = Arch::Omni3D;
  p.w_ch_nm = 28;
  p.lg_nm = 14;
  p.sp_gs_nm = 9;
  p.n_sheets = 1;
  p.vdd = 0.45;

  SUBCASE("edp = energy * delay and the stated identities hold") {
    DeviceMetrics m = ro_metrics(p, c);
    CHECK(m.energy_fj == doctest::Approx(m.c_eff_ff * p.vdd * p.vdd).epsilon(1e-12));
    CHECK(m.delay_ps == doctest::Approx(0.69 * m.r_eff_kohm * m.c_eff_ff).epsilon(1e-12));
    CHECK(m.edp == doctest::Approx(m.energy_fj * m.delay_ps).epsilon(1e-12));
  }

  SUBCASE("zero wire and parasitic leaves gate + IM terms exactly") {
    SurrogateCoefficients cz = c;
    cz.wire_load_um = 0.0;
    cz.c_par_gs = 1e-300;  // validated positive; vanishing contribution
    DeviceMetrics m = ro_metrics(p, cz);
    double expect = cz.c_gate_aerial * p.lg_nm * p.w_eff_nm() * cz.fo3_factor + cz.c_im_fixed;
    CHECK(m.c_eff_ff == doctest::Approx(expect).epsilon(1e-9));
  }

  SUBCASE("energy strictly increases and delay strictly decreases with vdd") {
    DesignSpace space;
    for (std::size_t i = 1; i < space.vdd.size(); ++i) {
      DeviceParams lo = p, hi = p;
      lo.vdd = space.vdd[i - 1];
      hi.vdd = space.vdd[i];
      CHECK(ro_metrics(hi, c).energy_fj > ro_metrics(lo, c).energy_fj);
      CHECK(ro_metrics(hi, c).delay_ps < ro_metrics(lo, c).delay_ps);
    }
  }

  SUBCASE("infeasible point is refused") {
    DeviceParams bad = p;
    bad.lg_nm = 17;
    bad.sp_gs_nm = 9;
    CHECK_THROWS_AS(ro_metrics(bad, c), ValidationError);
  }
}

TEST_CASE("pareto frontier equals the quadratic domination oracle") {
  SurrogateCoefficients c = shipped_coeffs();

  SUBCASE("textbook case") {
    auto mk = [](double e, double d) {
      DeviceMetrics m;
      m.energy_fj = e;
      m.delay_ps = d;
      m.edp = e * d;
      return m;
    };
    auto out = pareto_frontier({mk(1, 2), mk(2, 1), mk(2, 2)});
    REQUIRE(out.size() == 2);
    CHECK(out[0].delay_ps == 1);
    CHECK(out[1].delay_ps == 2);
  }

  SUBCASE("single point is its own frontier") {
    auto pts = sweep(Arch::Omni3D, c);
    std::vector<DeviceMetrics> one{pts[0].feasible == Feasibility::Ok ? pts[0] : pts[50]};
    one[0].feasible = Feasibility::Ok;
    auto out = pareto_frontier(one);
    CHECK(out.size() == 1);
  }

  SUBCASE("empty input throws") {
    CHECK_THROWS_AS(pareto_frontier({}), ValidationError);
  }

  SUBCASE("full CFET sweep vs brute force") {
    auto pts = sweep(Arch::CFET, c);
    auto frontier = pareto_frontier(pts);
    // oracle: O(n^2) scan over the feasible subset
    std::vector<DeviceMetrics> feas;
    for (const auto& m : pts)
      if (m.feasible == Feasibility::Ok) feas.push_back(m);
    std::vector<DeviceMetrics> oracle;
    for (const auto& m : feas) {
      bool dominated = false;
      for (const auto& o : feas)
        if ((o.energy_fj <= m.energy_fj && o.delay_ps <= m.delay_ps) &&
            (o.energy_fj < m.energy_fj || o.delay_ps < m.delay_ps))
          dominated = true;
      if (!dominated) oracle.push_back(m);
    }
    REQUIRE(frontier.size() == oracle.size());
    for (std::size_t i = 1; i < frontier.size(); ++i)
      CHECK(frontier[i - 1].delay_ps <= frontier[i].delay_ps);
    for (const auto& m : frontier) {
      bool found = false;
      for (const auto& o : oracle)
        if (o.params == m.params) found = true;
      CHECK(found);
    }
  }
}

TEST_CASE("min-EDP corner with shipped defaults") {
  SurrogateCoefficients c = shipped_coeffs();
  DeviceMetrics omni = min_edp(sweep(Arch::Omni3D, c));
  DeviceMetrics cfet = min_edp(sweep(Arch::CFET, c));
  for (const DeviceMetrics* m : {&omni, &cfet}) {
    CHECK(m->params.lg_nm == 14);
    CHECK(m->params.sp_gs_nm == 9);
    CHECK(m->params.n_sheets == 1);
    CHECK(m->params.vdd == 0.45);
  }
  // calibration consistency: the shipped defaults are fitted to these
  CHECK(cfet.edp / omni.edp == doctest::Approx(1.30).epsilon(0.04));
  CHECK(1.0 - omni.energy_fj / cfet.energy_fj == doctest::Approx(0.102).epsilon(0.2));
  CHECK(std::abs((1.0 - omni.energy_fj / cfet.energy_fj) - 0.102) < 0.02);
  CHECK(std::abs((1.0 - omni.delay_ps / cfet.delay_ps) - 0.156) < 0.02);

  SUBCASE("identical-EDP tie breaks to the lexicographically smaller params") {
    DeviceMetrics a, b;
    a.energy_fj = 2;
    a.delay_ps = 3;
    a.edp = 6;
    a.params.lg_nm = 15;
    b = a;
    b.energy_fj = 3;
    b.delay_ps = 2;
    b.params.lg_nm = 14;
    CHECK(min_edp({a, b}).params.lg_nm == 14);
  }
}

TEST_CASE("variant table ratios") {
  SurrogateCoefficients c = shipped_coeffs();
  auto rows = variant_metrics(c);
  REQUIRE(rows.size() == 6);
  auto find = [&](const std::string& label) -> const DeviceMetrics& {
    for (const VariantRow& r : rows)
      if (r.label == label) return r.metrics;
    throw Error("missing row " + label);
  };
  const DeviceMetrics& sio = find("SIO");
  const DeviceMetrics& cfet = find("CFET");
  CHECK(find("DO").c_eff_ff / sio.c_eff_ff == doctest::Approx(1.056).epsilon(0.005));
  CHECK(find("DI").c_eff_ff / sio.c_eff_ff == doctest::Approx(1.112).epsilon(0.005));
  CHECK(std::abs(find("DIDO").c_eff_ff / sio.c_eff_ff - 1.169) < 0.005);
  CHECK(std::abs(find("noIM").c_eff_ff / sio.c_eff_ff - 0.956) < 0.005);
  for (const char* v : {"SIO", "DO", "DI", "DIDO", "noIM"}) {
    CHECK(find(v).r_eff_kohm == doctest::Approx(sio.r_eff_kohm));  // equal across variants
    CHECK(std::abs(find(v).r_eff_kohm / cfet.r_eff_kohm - 0.95) < 0.02);
  }
}

TEST_CASE("sweep feasibility partition covers all 288 points") {
  SurrogateCoefficients c = shipped_coeffs();
  auto pts = sweep(Arch::Omni3D, c);
  int ok = 0, bad = 0;
  for (const auto& m : pts) (m.feasible == Feasibility::Ok ? ok : bad)++;
  CHECK(ok + bad == 288);
  CHECK(bad == 72);
}

TEST_CASE("characterize_library anchors") {
  SurrogateCoefficients c = shipped_coeffs();
  LibrarySkeleton skel = load_skeleton(read_file(data_path("skeleton.txt")));
  CellLibrary lib = characterize_library(c, skel);
  DeviceMetrics point = min_edp(sweep(Arch::Omni3D, c));

  const CellMaster& inv = lib.get("INVD1", Arch::Omni3D, PinAccess::SIO, Flavor::TI);
  CHECK(inv.r_drive_kohm == doctest::Approx(point.r_eff_kohm));  // definitional anchor

  const CellMaster& inv_do = lib.get("INVD1", Arch::Omni3D, PinAccess::DO, Flavor::TI);
  CHECK(inv_do.cap_in_ff[0] == doctest::Approx(1.042 * inv.cap_in_ff[0]));

  const CellMaster& nd2 = lib.get("ND2D1", Arch::Omni3D, PinAccess::SIO, Flavor::TI);
  const SkeletonCell* ske = skel.find("ND2D1");
  REQUIRE(ske != nullptr);
  CHECK(ske->rdrive_factor == doctest::Approx(2.0));
  CHECK(nd2.r_drive_kohm == doctest::Approx(ske->rdrive_factor * inv.r_drive_kohm));

  SUBCASE("skeleton missing scale factor is an error") {
    LibrarySkeleton broken = skel;
    broken.cells[0].rdrive_factor = 0.0;
    CellLibrary dummy;
    CHECK_THROWS_AS(characterize_arch(dummy, point, c, broken), ValidationError);
  }
}

TEST_CASE("sweep report csv is deterministic and complete") {
  SurrogateCoefficients c = shipped_coeffs();
  auto pts = sweep(Arch::Omni3D, c);
  std::string a = sweep_report_csv(pts);
  std::string b = sweep_report_csv(sweep(Arch::Omni3D, c));
  CHECK(a == b);
  CHECK(std::count(a.begin(), a.end(), '\n') == 289);  // header + 288 rows
}
