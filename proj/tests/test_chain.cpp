#include <gtest/gtest.h>

#include <numbers>

#include "ciliaflow/chain.hpp"
#include "ciliaflow/error.hpp"
#include "support.hpp"

using namespace ciliaflow;
using namespace ciliaflow::testing;

namespace {

constexpr double kPi = std::numbers::pi;

ChainState two_beads(const Vec2& a, const Vec2& b) {
  Eigen::VectorXd x(4);
  x << a.x(), a.y(), b.x(), b.y();
  return ChainState(x);
}

}  // namespace

TEST(ChainState, RejectsOddLengthAndNonFinite) {
  EXPECT_THROW(ChainState(Eigen::VectorXd::Zero(3)), Error);
  Eigen::VectorXd x = Eigen::VectorXd::Ones(4);
  x[2] = std::nan("");
  EXPECT_THROW(ChainState{x}, Error);
}

TEST(ChainState, RestChainIsStraightAtRestSpacing) {
  const PhysicalParams p = reference_params(5);
  const ChainState s = ChainState::rest(p);
  ASSERT_EQ(s.size(), 5);
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(s.bead(i).x(), 0.0);
    EXPECT_DOUBLE_EQ(s.bead(i).y(), 3.0 * p.a * (i + 1));
  }
}

TEST(BondGeometry, RestChainHasUnitSpacingAlongZ) {
  const PhysicalParams p = reference_params(20);
  const BondGeometry g = bond_geometry(ChainState::rest(p));
  ASSERT_EQ(g.length.size(), 20u);
  for (int i = 0; i < 20; ++i) {
    EXPECT_NEAR(g.length[i], 1.5e-6, 1e-20);
    EXPECT_NEAR(g.tangent[i].x(), 0.0, 1e-15);
    EXPECT_NEAR(g.tangent[i].y(), 1.0, 1e-15);
  }
}

TEST(BondGeometry, AxisAlignedPair) {
  const double l = 1.5e-6;
  const BondGeometry g = bond_geometry(two_beads({0, l}, {l, l}));
  EXPECT_DOUBLE_EQ(g.separation(0, 1), l);
  EXPECT_DOUBLE_EQ(g.unit(0, 1).x(), 1.0);
  EXPECT_DOUBLE_EQ(g.unit(0, 1).y(), 0.0);
}

TEST(BondGeometry, UnitVectorsAreAntisymmetric) {
  const PhysicalParams p = reference_params(5);
  std::mt19937_64 rng(1);
  const BondGeometry g = bond_geometry(random_state(p, rng));
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      if (i == j) continue;
      EXPECT_EQ(g.separation(i, j), g.separation(j, i));
      EXPECT_EQ(g.unit(i, j), Vec2(-g.unit(j, i)));
      EXPECT_NEAR(g.unit(i, j).norm(), 1.0, 1e-15);
    }
  }
}

TEST(BondGeometry, CoincidentPointsThrowTypedError) {
  const double l = 1.5e-6;
  try {
    bond_geometry(two_beads({0, l}, {0, l}));
    FAIL() << "expected CoincidentBeads";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::coincident_beads);
  }
  try {
    bond_geometry(two_beads({0, 0}, {0, l}));
    FAIL() << "expected CoincidentBeads for bead on the anchor";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::coincident_beads);
  }
}

TEST(StretchingEnergy, ZeroAtRest) {
  const PhysicalParams p = reference_params(20);
  // Rest positions i * l carry roundoff, so "zero" means negligible
  // against the energy scale k l^2.
  EXPECT_LT(stretching_energy(ChainState::rest(p), p), 1e-24 * p.k_stretch * p.l_rest * p.l_rest);
}

TEST(StretchingEnergy, SingleStretchedBond) {
  const PhysicalParams p = reference_params(4);
  Eigen::VectorXd x = ChainState::rest(p).flat();
  const double delta = 0.1 * p.l_rest;
  x[7] += delta;  // only the last bond grows
  EXPECT_NEAR(stretching_energy(ChainState(x), p), 0.5 * p.k_stretch * delta * delta,
              1e-12 * 0.5 * p.k_stretch * delta * delta);
}

TEST(StretchingEnergy, MatchesTermByTermSum) {
  const PhysicalParams p = reference_params(4);
  std::mt19937_64 rng(2);
  const ChainState s = random_state(p, rng);
  double sum = 0.0;
  for (int i = 1; i <= 4; ++i) {
    const double l = (s.point(i) - s.point(i - 1)).norm();
    sum += 0.5 * p.k_stretch * (l - p.l_rest) * (l - p.l_rest);
  }
  EXPECT_LT(rel_err(stretching_energy(s, p), sum), 1e-12);
}

TEST(BendingEnergy, ZeroForStraightChain) {
  const PhysicalParams p = reference_params(20);
  EXPECT_NEAR(bending_energy(ChainState::rest(p), p), 0.0, 1e-40);
}

TEST(BendingEnergy, RightAngleKinkCostsAOverL) {
  const PhysicalParams p = reference_params(2);
  const double l = p.l_rest;
  const double e = bending_energy(two_beads({0, l}, {l, l}), p);
  EXPECT_LT(rel_err(e, p.A_bend / l), 1e-12);
}

TEST(DipoleEnergy, PerpendicularPairMatchesDirectEvaluation) {
  const PhysicalParams p = reference_params(2);
  const double r = 1.5e-6;
  const ChainState s = two_beads({0, 2 * r}, {0, 3 * r});
  const double e = dipole_energy(s, p, FieldAngle{kPi / 2});
  EXPECT_NEAR(p.dipole_energy_prefactor(), 2.47e-34, 0.01e-34);
  EXPECT_LT(rel_err(e, p.dipole_energy_prefactor() / (r * r * r)), 1e-12);
  EXPECT_NEAR(e, 7.3e-17, 0.05e-17);
}

TEST(DipoleEnergy, ParallelPairIsMinusTwiceThePerpendicularValue) {
  const PhysicalParams p = reference_params(2);
  const double r = 1.5e-6;
  const ChainState s = two_beads({0, 2 * r}, {0, 3 * r});
  const double perp = dipole_energy(s, p, FieldAngle{kPi / 2});
  const double para = dipole_energy(s, p, FieldAngle{0.0});
  EXPECT_LT(rel_err(para, -2.0 * perp), 1e-12);
}

TEST(DipoleEnergy, PiPeriodicInFieldAngle) {
  const PhysicalParams p = reference_params(5);
  std::mt19937_64 rng(3);
  const ChainState s = random_state(p, rng);
  for (double phi : {0.0, 0.3, 1.7, 4.0}) {
    EXPECT_LT(rel_err(dipole_energy(s, p, FieldAngle{phi + kPi}), dipole_energy(s, p, FieldAngle{phi})),
              1e-12);
  }
}

TEST(TotalEnergy, RestChainWithAxialFieldIsPureDipole) {
  const PhysicalParams p = reference_params(20);
  const ChainState s = ChainState::rest(p);
  EXPECT_EQ(total_energy(s, p, FieldAngle{0.0}), dipole_energy(s, p, FieldAngle{0.0}));
}

TEST(TotalEnergy, IsSumOfTermsBitForBit) {
  const PhysicalParams p = reference_params(6);
  std::mt19937_64 rng(4);
  const ChainState s = random_state(p, rng);
  const FieldAngle f{0.9};
  EXPECT_EQ(total_energy(s, p, f), stretching_energy(s, p) + bending_energy(s, p) + dipole_energy(s, p, f));
}

TEST(Energies, DipoleTranslationInvariant) {
  const PhysicalParams p = reference_params(5);
  std::mt19937_64 rng(5);
  const ChainState s = random_state(p, rng);
  Eigen::VectorXd x = s.flat();
  for (int i = 0; i < 5; ++i) {
    x[2 * i] += 3.1e-6;
    x[2 * i + 1] -= 0.7e-6;
  }
  const FieldAngle f{0.4};
  EXPECT_LT(rel_err(dipole_energy(ChainState(x), p, f), dipole_energy(s, p, f)), 1e-10);
}

TEST(Energies, ElasticTermsInvariantUnderRotationAboutAnchor) {
  // The anchor is pinned at the origin, so rotations about it move every
  // point of the chain rigidly.
  const PhysicalParams p = reference_params(5);
  std::mt19937_64 rng(6);
  const ChainState s = random_state(p, rng);
  const double c = std::cos(0.8);
  const double sn = std::sin(0.8);
  Eigen::VectorXd x = s.flat();
  for (int i = 0; i < 5; ++i) {
    const double y = x[2 * i];
    const double z = x[2 * i + 1];
    x[2 * i] = c * y - sn * z;
    x[2 * i + 1] = sn * y + c * z;
  }
  EXPECT_LT(rel_err(stretching_energy(ChainState(x), p), stretching_energy(s, p)), 1e-9);
  EXPECT_LT(rel_err(bending_energy(ChainState(x), p), bending_energy(s, p)), 1e-9);
}

TEST(Energies, MirrorSymmetry) {
  const PhysicalParams p = reference_params(5);
  std::mt19937_64 rng(7);
  const ChainState s = random_state(p, rng);
  const ChainState m = mirrored(s);
  const double phi = 0.6;
  EXPECT_LT(rel_err(stretching_energy(m, p), stretching_energy(s, p)), 1e-12);
  EXPECT_LT(rel_err(bending_energy(m, p), bending_energy(s, p)), 1e-12);
  EXPECT_LT(rel_err(dipole_energy(m, p, FieldAngle{-phi}), dipole_energy(s, p, FieldAngle{phi})), 1e-12);
  EXPECT_LT(rel_err(total_force(m, p, FieldAngle{-phi}), flip_y(total_force(s, p, FieldAngle{phi}))), 1e-12);
}

TEST(StretchingForce, ZeroAtRest) {
  const PhysicalParams p = reference_params(20);
  EXPECT_LT(stretching_force(ChainState::rest(p), p).cwiseAbs().maxCoeff(), 1e-12 * p.k_stretch * p.l_rest);
}

TEST(StretchingForce, TwoBeadChainWithStretchedOuterBond) {
  const PhysicalParams p = reference_params(2);
  const double l = p.l_rest;
  const double delta = 0.2 * l;
  const BeadVector f = stretching_force(two_beads({0, l}, {0, 2 * l + delta}), p);
  // Anchor bond at rest, so bead 1 only feels bond 2 pulling it up.
  EXPECT_NEAR(f[0], 0.0, 1e-30);
  EXPECT_LT(rel_err(f[1], p.k_stretch * delta), 1e-12);
  EXPECT_NEAR(f[2], 0.0, 1e-30);
  EXPECT_LT(rel_err(f[3], -p.k_stretch * delta), 1e-12);
}

TEST(StretchingForce, MatchesFiniteDifferences) {
  const PhysicalParams p = reference_params(6);
  std::mt19937_64 rng(8);
  const ChainState s = random_state(p, rng);
  const auto fd = fd_force([&](const ChainState& c) { return stretching_energy(c, p); }, s, 1e-9 * p.l_rest);
  EXPECT_LT(rel_err(stretching_force(s, p), fd), 1e-6);
}

TEST(BendingForce, ZeroForStraightChain) {
  const PhysicalParams p = reference_params(20);
  EXPECT_LT(bending_force(ChainState::rest(p), p).cwiseAbs().maxCoeff(), 1e-30);
}

TEST(BendingForce, VShapeAndItsMirrorImageGiveMirroredForces) {
  const PhysicalParams p = reference_params(3);
  const double l = p.l_rest;
  Eigen::VectorXd x(6);
  x << 0.0, l, 0.6 * l, 1.8 * l, 0.0, 2.6 * l;
  const ChainState v(x);
  const BeadVector f = bending_force(v, p);
  const BeadVector g = bending_force(mirrored(v), p);
  EXPECT_GT(f.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LT((g - flip_y(f)).cwiseAbs().maxCoeff(), 1e-15 * f.cwiseAbs().maxCoeff());
}

TEST(BendingForce, MatchesFiniteDifferences) {
  const PhysicalParams p = reference_params(6);
  std::mt19937_64 rng(9);
  const ChainState s = random_state(p, rng);
  const auto fd = fd_force([&](const ChainState& c) { return bending_energy(c, p); }, s, 1e-9 * p.l_rest);
  EXPECT_LT(rel_err(bending_force(s, p), fd), 1e-6);
}

TEST(DipoleForce, AlignedPairAttractsWithTwiceCfOverR4) {
  const PhysicalParams p = reference_params(2);
  const double r = 1.5e-6;
  const BeadVector f = dipole_force(two_beads({0, 2 * r}, {0, 3 * r}), p, FieldAngle{0.0});
  const double expected = 2.0 * p.dipole_force_prefactor() / std::pow(r, 4);
  EXPECT_NEAR(p.dipole_force_prefactor(), 7.41e-34, 0.01e-34);
  EXPECT_LT(rel_err(f[1], expected), 1e-12);  // lower bead pulled up
  EXPECT_LT(rel_err(f[3], -expected), 1e-12);
  EXPECT_NEAR(expected, 2.9e-10, 0.05e-10);
}

TEST(DipoleForce, ActionReaction) {
  const PhysicalParams p = reference_params(5);
  std::mt19937_64 rng(10);
  const ChainState s = random_state(p, rng);
  const BeadVector f = dipole_force(s, p, FieldAngle{1.1});
  Vec2 net = Vec2::Zero();
  for (int i = 0; i < 5; ++i) net += f.segment<2>(2 * i);
  EXPECT_LT(net.cwiseAbs().maxCoeff(), 1e-12 * f.cwiseAbs().maxCoeff());

  const BeadVector pair = dipole_force(two_beads({0.3e-6, 1.5e-6}, {-0.4e-6, 3.2e-6}), reference_params(2),
                                       FieldAngle{0.7});
  EXPECT_EQ(pair[0], -pair[2]);
  EXPECT_EQ(pair[1], -pair[3]);
}

TEST(DipoleForce, MatchesFiniteDifferences) {
  const PhysicalParams p = reference_params(5);
  std::mt19937_64 rng(11);
  const ChainState s = random_state(p, rng);
  const FieldAngle f{2.3};
  const auto fd = fd_force([&](const ChainState& c) { return dipole_energy(c, p, f); }, s, 1e-9 * p.l_rest);
  EXPECT_LT(rel_err(dipole_force(s, p, f), fd), 1e-6);
}

TEST(TotalForce, AdditiveAndFiniteDifferenceConsistent) {
  const PhysicalParams p = reference_params(5);
  std::mt19937_64 rng(12);
  const ChainState s = random_state(p, rng);
  const FieldAngle f{0.2};
  const BeadVector total = total_force(s, p, f);
  const BeadVector sum = stretching_force(s, p) + bending_force(s, p) + dipole_force(s, p, f);
  EXPECT_LT((total - sum).cwiseAbs().maxCoeff(), 1e-15 * total.cwiseAbs().maxCoeff());
  const auto fd = fd_force([&](const ChainState& c) { return total_energy(c, p, f); }, s, 1e-9 * p.l_rest);
  EXPECT_LT(rel_err(total, fd), 1e-6);
}

TEST(TotalForce, RestChainWithAxialFieldHasNoLateralForce) {
  const PhysicalParams p = reference_params(20);
  const BeadVector f = total_force(ChainState::rest(p), p, FieldAngle{0.0});
  for (int i = 0; i < 20; ++i) EXPECT_EQ(f[2 * i], 0.0);
}

TEST(DipoleForceDphi, MatchesFiniteDifferenceInAngle) {
  const PhysicalParams p = reference_params(5);
  std::mt19937_64 rng(13);
  const ChainState s = random_state(p, rng);
  for (double phi : {0.0, 0.8, 2.5}) {
    const double h = 1e-6;
    const BeadVector fd =
        (dipole_force(s, p, FieldAngle{phi + h}) - dipole_force(s, p, FieldAngle{phi - h})) / (2.0 * h);
    EXPECT_LT(rel_err(dipole_force_dphi(s, p, FieldAngle{phi}), fd), 1e-6) << "phi " << phi;
  }
}

TEST(DipoleForceDphi, PiPeriodic) {
  const PhysicalParams p = reference_params(5);
  std::mt19937_64 rng(14);
  const ChainState s = random_state(p, rng);
  const BeadVector a = dipole_force_dphi(s, p, FieldAngle{0.4});
  const BeadVector b = dipole_force_dphi(s, p, FieldAngle{0.4 + kPi});
  EXPECT_LT(rel_err(b, a), 1e-12);
}

TEST(DipoleForceDphi, AlignedPairHasNoAxialComponent) {
  // With p parallel to the separation, d(p.e)^2/dphi vanishes, leaving only
  // the 2 c p' term, which is perpendicular to e.
  const PhysicalParams p = reference_params(2);
  const BeadVector d = dipole_force_dphi(two_beads({0, 1.5e-6}, {0, 3e-6}), p, FieldAngle{0.0});
  EXPECT_NEAR(d[1], 0.0, 1e-15 * d.cwiseAbs().maxCoeff());
  EXPECT_NEAR(d[3], 0.0, 1e-15 * d.cwiseAbs().maxCoeff());
  EXPECT_GT(std::abs(d[0]), 0.0);
}
