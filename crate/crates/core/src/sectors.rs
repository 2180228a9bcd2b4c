//! Inertia sectors of the quotient stack, labeled by fractional action
//! vectors.
//!
//! A sector is the component of the inertia stack attached to a torus
//! element `g`; it is recorded through the vector of rotation numbers
//! `c_rho in [0,1)` of `g` on the coordinates. Only elements fixing a
//! semistable point occur, and every such element lies in the stabilizer of
//! a torus-fixed point, so the enumeration runs over the fixed-point
//! subsets and solves for their stabilizers through Smith normal form.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::classes::CurveClass;
use crate::exactmath::rational::frac_part;
use crate::exactmath::{smith_normal_form, Rat};
use crate::model::{FixedPointSubset, GitPresentation};

/// Chen-Ruan sector label: the action vector of the group element, with
/// entries in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SectorLabel {
    action: Vec<Rat>,
}

impl SectorLabel {
    pub fn new(action: Vec<Rat>) -> Self {
        debug_assert!(
            action.iter().all(|c| !c.is_negative() && *c < Rat::one()),
            "action vector entries must lie in [0, 1)"
        );
        SectorLabel { action }
    }

    pub fn untwisted(n_rays: usize) -> Self {
        SectorLabel {
            action: vec![Rat::zero(); n_rays],
        }
    }

    pub fn action(&self) -> &[Rat] {
        &self.action
    }

    pub fn is_untwisted(&self) -> bool {
        self.action.iter().all(|c| c.is_zero())
    }

    /// Rays fixed by the group element.
    pub fn support(&self) -> Vec<usize> {
        (0..self.action.len())
            .filter(|&rho| self.action[rho].is_zero())
            .collect()
    }

    /// Age: sum of the rotation numbers over the moving rays.
    pub fn age(&self) -> Rat {
        self.action.iter().sum()
    }

    /// Complex dimension of the sector, `|support| - r`.
    pub fn dim(&self, p: &GitPresentation) -> i64 {
        self.support().len() as i64 - p.rank() as i64
    }

    /// Number of rays on which the element acts nontrivially.
    pub fn moving_rays(&self) -> usize {
        self.action.iter().filter(|c| !c.is_zero()).count()
    }
}

/// The inversion involution on sectors: `c_rho -> frac(-c_rho)`.
pub fn involution(s: &SectorLabel) -> SectorLabel {
    SectorLabel::new(s.action.iter().map(|c| frac_part(&(-c))).collect())
}

/// All sectors of the stack, deduplicated and sorted by action vector.
///
/// For each fixed-point subset `sigma`, the stabilizer is the group of
/// `gamma in (Q/Z)^r` with `A_sigma^T gamma` integral; writing
/// `U A_sigma^T V = diag(d)` its elements are `gamma = V delta` with
/// `delta_k` ranging over `(1/d_k) Z / Z`.
pub fn enumerate_sectors(
    p: &GitPresentation,
    fixed_subsets: &[FixedPointSubset],
) -> Vec<SectorLabel> {
    let r = p.rank();
    let mut seen: BTreeSet<Vec<Rat>> = BTreeSet::new();
    for subset in fixed_subsets {
        let a_sigma = p.charges().select_columns(&subset.sigma);
        // Transpose: rows of m are indexed by sigma.
        let mut m = crate::exactmath::IntMatrix::zero(r, r);
        for i in 0..r {
            for j in 0..r {
                m[(i, j)] = a_sigma[(j, i)].clone();
            }
        }
        let snf = smith_normal_form(&m);
        let orders: Vec<BigInt> = snf.diagonal.clone();
        let mut counters = vec![BigInt::zero(); r];
        loop {
            let delta: Vec<Rat> = counters
                .iter()
                .zip(&orders)
                .map(|(m_k, d_k)| Rat::new(m_k.clone(), d_k.clone()))
                .collect();
            let gamma: Vec<Rat> = (0..r)
                .map(|i| {
                    (0..r)
                        .map(|k| Rat::from_integer(snf.right[(i, k)].clone()) * &delta[k])
                        .sum()
                })
                .collect();
            let action: Vec<Rat> = (0..p.n_rays())
                .map(|rho| {
                    let weight: Rat = (0..r)
                        .map(|i| Rat::from_integer(p.charge(i, rho).clone()) * &gamma[i])
                        .sum();
                    frac_part(&weight)
                })
                .collect();
            seen.insert(action);

            // Increment the mixed-radix counter over the group.
            let mut k = 0;
            loop {
                if k == r {
                    break;
                }
                counters[k] += 1;
                if counters[k] < orders[k] {
                    break;
                }
                counters[k] = BigInt::zero();
                k += 1;
            }
            if k == r {
                break;
            }
        }
    }
    seen.into_iter().map(SectorLabel::new).collect()
}

/// The sector receiving the class `beta` under evaluation at infinity:
/// action vector `frac(-b_rho)`, the label of the inverse of
/// `g_beta = (e^{2 pi i b_rho})_rho`.
pub fn sector_of_class(p: &GitPresentation, beta: &CurveClass) -> SectorLabel {
    SectorLabel::new(
        (0..p.n_rays())
            .map(|rho| frac_part(&(-beta.ray_pairing(rho))))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rational::{rat, rat_int};
    use crate::model::fixed_point_subsets;
    use crate::testutil::model;

    fn sectors_of(p: &GitPresentation) -> Vec<SectorLabel> {
        enumerate_sectors(p, &fixed_point_subsets(p).unwrap())
    }

    #[test]
    fn projective_space_has_only_the_untwisted_sector() {
        for n in 1..=4usize {
            let p = model("pn", &[vec![1; n + 1]], &[1]);
            let sectors = sectors_of(&p);
            assert_eq!(sectors.len(), 1);
            assert!(sectors[0].is_untwisted());
            assert_eq!(sectors[0].age(), rat_int(0));
        }
    }

    #[test]
    fn wp12_sectors() {
        let p = model("wp12", &[vec![1, 2]], &[1]);
        let sectors = sectors_of(&p);
        assert_eq!(sectors.len(), 2);
        assert_eq!(sectors[0].action(), &[rat_int(0), rat_int(0)]);
        assert_eq!(sectors[0].dim(&p), 1);
        assert_eq!(sectors[1].action(), &[rat(1, 2), rat_int(0)]);
        assert_eq!(sectors[1].age(), rat(1, 2));
        assert_eq!(sectors[1].dim(&p), 0);
        assert_eq!(sectors[1].support(), vec![1]);
    }

    #[test]
    fn wp112_sectors() {
        let p = model("wp112", &[vec![1, 1, 2]], &[1]);
        let sectors = sectors_of(&p);
        assert_eq!(sectors.len(), 2);
        assert_eq!(sectors[1].action(), &[rat(1, 2), rat(1, 2), rat_int(0)]);
        assert_eq!(sectors[1].age(), rat_int(1));
        assert_eq!(sectors[1].dim(&p), 0);
    }

    #[test]
    fn sector_of_class_examples() {
        let wp = model("wp12", &[vec![1, 2]], &[1]);
        let half = CurveClass::new(&wp, vec![rat(1, 2)]);
        let s = sector_of_class(&wp, &half);
        assert_eq!(s.action(), &[rat(1, 2), rat_int(0)]);
        assert_eq!(s.age(), rat(1, 2));

        let int = CurveClass::new(&wp, vec![rat_int(2)]);
        assert!(sector_of_class(&wp, &int).is_untwisted());

        let wp112 = model("wp112", &[vec![1, 1, 2]], &[1]);
        let half = CurveClass::new(&wp112, vec![rat(1, 2)]);
        let s = sector_of_class(&wp112, &half);
        assert_eq!(s.action(), &[rat(1, 2), rat(1, 2), rat_int(0)]);
        assert_eq!(s.age(), rat_int(1));
    }

    #[test]
    fn involution_examples() {
        let wp = model("wp12", &[vec![1, 2]], &[1]);
        let sectors = sectors_of(&wp);
        for s in &sectors {
            assert_eq!(involution(&involution(s)), *s);
        }
        // The order-2 sector is its own inverse.
        assert_eq!(involution(&sectors[1]), sectors[1]);

        // A mu_3 sector: P(1,3) has sectors with c_0 in {0, 1/3, 2/3}.
        let wp13 = model("wp13", &[vec![1, 3]], &[1]);
        let sectors = sectors_of(&wp13);
        assert_eq!(sectors.len(), 3);
        assert_eq!(sectors[1].action(), &[rat(1, 3), rat_int(0)]);
        assert_eq!(involution(&sectors[1]).action(), &[rat(2, 3), rat_int(0)]);
    }

    #[test]
    fn age_duality_and_overall_involution() {
        for p in crate::testutil::corpus() {
            let e = crate::model::exponent_lcm_e(&p).unwrap();
            let sectors = sectors_of(&p);
            for s in &sectors {
                let inv = involution(s);
                assert!(sectors.contains(&inv), "involution leaves the sector list");
                assert_eq!(involution(&inv), *s);
                let total = s.age() + inv.age();
                assert_eq!(total, rat_int(s.moving_rays() as i64));
                for c in s.action() {
                    assert!(
                        (&e % c.denom()).is_zero(),
                        "rotation number denominator exceeds e on {}",
                        p.name()
                    );
                }
            }
        }
    }

    #[test]
    fn support_contains_nonneg_integer_support() {
        use crate::classes::enumerate_effective;
        for p in crate::testutil::corpus() {
            let fixed = fixed_point_subsets(&p).unwrap();
            for beta in enumerate_effective(&p, &fixed, &rat_int(2)).unwrap() {
                let sector = sector_of_class(&p, &beta);
                let support = sector.support();
                for rho in beta.nonneg_integer_support() {
                    assert!(support.contains(&rho));
                }
            }
        }
    }

    #[test]
    fn brute_force_completeness_on_small_models() {
        use crate::model::exponent_lcm_e;
        // Every torus element of order dividing a small bound whose fixed
        // locus is semistable must appear in the enumeration.
        for p in crate::testutil::corpus() {
            let e = exponent_lcm_e(&p).unwrap();
            let e = i64::try_from(&e).unwrap();
            let enumerated: BTreeSet<Vec<Rat>> = sectors_of(&p)
                .into_iter()
                .map(|s| s.action().to_vec())
                .collect();
            let bound = (2 * e).max(4);
            let r = p.rank();
            let mut brute: BTreeSet<Vec<Rat>> = BTreeSet::new();
            let mut gamma_num = vec![0i64; r];
            'outer: loop {
                let gamma: Vec<Rat> = gamma_num.iter().map(|&n| rat(n, bound)).collect();
                let action: Vec<Rat> = (0..p.n_rays())
                    .map(|rho| {
                        let w: Rat = (0..r)
                            .map(|i| Rat::from_integer(p.charge(i, rho).clone()) * &gamma[i])
                            .sum();
                        frac_part(&w)
                    })
                    .collect();
                let support: Vec<usize> = (0..p.n_rays())
                    .filter(|&rho| action[rho].is_zero())
                    .collect();
                if p.support_semistable(&support).unwrap() {
                    brute.insert(action);
                }
                let mut k = 0;
                loop {
                    if k == r {
                        break 'outer;
                    }
                    gamma_num[k] += 1;
                    if gamma_num[k] < bound {
                        break;
                    }
                    gamma_num[k] = 0;
                    k += 1;
                }
            }
            assert_eq!(
                enumerated,
                brute,
                "sector enumeration mismatch on {}",
                p.name()
            );
        }
    }
}
