//! Curve classes: rational characters of the Picard group, their pairings,
//! effectivity, enumeration up to a degree bound, and dimension formulas.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactmath::rational::{ceil_int, floor_int, is_nonneg_integer, lcm_big};
use crate::exactmath::{solve_square, Rat};
use crate::model::{FixedPointSubset, GitPresentation};

/// A class `beta` in `Hom(Pic, Q)`, stored through its values on the
/// standard characters together with the derived pairings against every
/// ray character and the stability character.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveClass {
    components: Vec<Rat>,
    ray_pairings: Vec<Rat>,
    degree: Rat,
}

impl CurveClass {
    pub fn new(p: &GitPresentation, components: Vec<Rat>) -> Self {
        assert_eq!(
            components.len(),
            p.rank(),
            "class has one component per torus factor"
        );
        let ray_pairings = (0..p.n_rays())
            .map(|rho| {
                (0..p.rank())
                    .map(|i| Rat::from_integer(p.charge(i, rho).clone()) * &components[i])
                    .sum()
            })
            .collect();
        let degree = p
            .theta()
            .iter()
            .zip(&components)
            .map(|(t, b)| Rat::from_integer(t.clone()) * b)
            .sum();
        CurveClass {
            components,
            ray_pairings,
            degree,
        }
    }

    pub fn zero(p: &GitPresentation) -> Self {
        Self::new(p, vec![Rat::zero(); p.rank()])
    }

    pub fn components(&self) -> &[Rat] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.is_zero())
    }

    /// `beta(L_rho)`, written `b_rho`.
    pub fn ray_pairing(&self, rho: usize) -> &Rat {
        &self.ray_pairings[rho]
    }

    pub fn ray_pairings(&self) -> &[Rat] {
        &self.ray_pairings
    }

    /// `beta(L_theta)`.
    pub fn degree(&self) -> &Rat {
        &self.degree
    }

    /// `beta(L_eta)` for an arbitrary integer character.
    pub fn pairing(&self, eta: &[BigInt]) -> Rat {
        assert_eq!(eta.len(), self.components.len(), "character rank mismatch");
        eta.iter()
            .zip(&self.components)
            .map(|(e, b)| Rat::from_integer(e.clone()) * b)
            .sum()
    }

    /// `beta(det T)`: the sum of all ray pairings.
    pub fn canonical_pairing(&self) -> Rat {
        self.ray_pairings.iter().sum()
    }

    /// Minimal positive integer `a` with `a * beta` integral on every
    /// character: the lcm of component denominators.
    pub fn minimal_a(&self) -> BigInt {
        self.components
            .iter()
            .fold(BigInt::one(), |acc, c| lcm_big(&acc, c.denom()))
    }

    /// Rays with nonnegative integer pairing; the support of the
    /// distinguished fixed locus.
    pub fn nonneg_integer_support(&self) -> Vec<usize> {
        (0..self.ray_pairings.len())
            .filter(|&rho| is_nonneg_integer(&self.ray_pairings[rho]))
            .collect()
    }

    /// Deterministic order: by degree, ties broken lexicographically on the
    /// components.
    pub fn sort_key(&self) -> (Rat, Vec<Rat>) {
        (self.degree.clone(), self.components.clone())
    }
}

/// Does the distinguished fixed locus `F_beta` meet the semistable locus?
/// Equivalent to `theta` lying in the cone of the rays with nonnegative
/// integer pairing.
pub fn f_beta_nonempty(p: &GitPresentation, beta: &CurveClass) -> Result<bool> {
    p.support_semistable(&beta.nonneg_integer_support())
}

/// All classes with nonempty fixed locus and degree at most `d_max`,
/// deduplicated and sorted by degree then components.
///
/// Per fixed-point subset `sigma` the pairings `(b_rho)_{rho in sigma}`
/// range over nonnegative integers with `sum c_rho b_rho <= d_max`, which
/// is finite because every `c_rho` is strictly positive when semistable
/// equals stable; the class is recovered by solving `A_sigma beta = b`.
pub fn enumerate_effective(
    p: &GitPresentation,
    fixed_subsets: &[FixedPointSubset],
    d_max: &Rat,
) -> Result<Vec<CurveClass>> {
    if d_max.is_negative() {
        return Err(Error::Precondition("d_max must be nonnegative".into()));
    }
    if fixed_subsets.is_empty() {
        return Err(Error::EmptySemistableLocus);
    }
    let mut seen: Vec<CurveClass> = Vec::new();
    for subset in fixed_subsets {
        if subset.coefficients.iter().any(|c| !c.is_positive()) {
            return Err(Error::Precondition(format!(
                "fixed-point subset {:?} has a nonpositive coefficient; is semistable = stable?",
                subset.sigma
            )));
        }
        // The pairings satisfy b_sigma = A_sigma^T beta, so the recursion
        // solves the transposed block.
        let a_sigma = p.charges().select_columns(&subset.sigma);
        let r = subset.sigma.len();
        let mut a_sigma_t = crate::exactmath::IntMatrix::zero(r, r);
        for i in 0..r {
            for j in 0..r {
                a_sigma_t[(i, j)] = a_sigma[(j, i)].clone();
            }
        }
        // Depth-first scan of b in Z_{>=0}^sigma under the degree budget.
        let mut b = vec![BigInt::zero(); r];
        enumerate_rec(
            p,
            &a_sigma_t,
            &subset.coefficients,
            d_max.clone(),
            &mut b,
            0,
            &mut seen,
        );
    }
    seen.sort_by_key(|x| x.sort_key());
    seen.dedup_by(|x, y| x.components == y.components);
    Ok(seen)
}

fn enumerate_rec(
    p: &GitPresentation,
    a_sigma_t: &crate::exactmath::IntMatrix,
    coeffs: &[Rat],
    budget: Rat,
    b: &mut Vec<BigInt>,
    pos: usize,
    out: &mut Vec<CurveClass>,
) {
    if pos == coeffs.len() {
        let rhs: Vec<Rat> = b.iter().map(|x| Rat::from_integer(x.clone())).collect();
        let beta = solve_square(a_sigma_t, &rhs)
            .expect("fixed-point subsets have invertible charge blocks");
        out.push(CurveClass::new(p, beta));
        return;
    }
    // b[pos] <= budget / c[pos]
    let max = floor_int(&(&budget / &coeffs[pos]));
    let mut v = BigInt::zero();
    while v <= max {
        b[pos] = v.clone();
        let spent = &coeffs[pos] * Rat::from_integer(v.clone());
        enumerate_rec(p, a_sigma_t, coeffs, &budget - spent, b, pos + 1, out);
        v += 1;
    }
}

/// Dimensions of the stacky loop space attached to a class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopSpaceDims {
    /// Minimal integer making `a * beta` integral; the x-weight of the
    /// football domain.
    pub a: BigInt,
    /// `dim W_beta = sum over rays with b_rho >= 0 of (floor(b_rho) + 1)`.
    pub dim_w_beta: i64,
    /// `dim W_beta - r`.
    pub dim_stack: i64,
    /// Rank of the obstruction bundle: `sum over b_rho < 0 of
    /// (ceil(-b_rho) - 1)`.
    pub obstruction_dim: i64,
    /// `dim_stack - obstruction_dim`.
    pub virtual_dim: i64,
}

pub fn loop_space_dims(p: &GitPresentation, beta: &CurveClass) -> Result<LoopSpaceDims> {
    if !f_beta_nonempty(p, beta)? {
        return Err(Error::Precondition(format!(
            "class {:?} has empty fixed locus",
            beta.components()
        )));
    }
    let mut dim_w_beta: i64 = 0;
    let mut obstruction_dim: i64 = 0;
    for rho in 0..p.n_rays() {
        let b = beta.ray_pairing(rho);
        if b.is_negative() {
            let count = ceil_int(&(-b)) - BigInt::one();
            obstruction_dim += i64::try_from(&count).expect("obstruction dimension fits i64");
        } else {
            let count = floor_int(b) + BigInt::one();
            dim_w_beta += i64::try_from(&count).expect("section count fits i64");
        }
    }
    let dim_stack = dim_w_beta - p.rank() as i64;
    Ok(LoopSpaceDims {
        a: beta.minimal_a(),
        dim_w_beta,
        dim_stack,
        obstruction_dim,
        virtual_dim: dim_stack - obstruction_dim,
    })
}

/// Virtual dimension of the genus-`g`, `k`-marked moduli of class `beta`
/// with prescribed sector ages at the markings:
/// `k + (1 - g)(dim X - 3) + beta(det T) - sum(ages)`.
pub fn virtual_dim_moduli(
    p: &GitPresentation,
    genus: i64,
    markings: usize,
    beta: &CurveClass,
    sector_ages: &[Rat],
) -> Result<Rat> {
    if sector_ages.len() != markings {
        return Err(Error::Precondition(format!(
            "got {} ages for {} markings",
            sector_ages.len(),
            markings
        )));
    }
    let dim_x = Rat::from_integer(BigInt::from(p.dim()));
    let one_minus_g = Rat::from_integer(BigInt::from(1 - genus));
    let three = Rat::from_integer(BigInt::from(3));
    let ages: Rat = sector_ages.iter().sum();
    Ok(Rat::from_integer(BigInt::from(markings as i64))
        + one_minus_g * (dim_x - three)
        + beta.canonical_pairing()
        - ages)
}

/// Outcome of the semi-positivity scan up to a degree bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SemipositivityReport {
    /// `beta(det T) >= 0` for all enumerated classes; `strict` records
    /// whether the inequality was strict for every nonzero class.
    Pass { d_max: Rat, strict: bool },
    /// A class with negative canonical pairing.
    Violation { beta: Vec<Rat>, value: Rat },
}

pub fn semipositivity_report(
    p: &GitPresentation,
    fixed_subsets: &[FixedPointSubset],
    d_max: &Rat,
) -> Result<SemipositivityReport> {
    let mut strict = true;
    for beta in enumerate_effective(p, fixed_subsets, d_max)? {
        let value = beta.canonical_pairing();
        if value.is_negative() {
            return Ok(SemipositivityReport::Violation {
                beta: beta.components().to_vec(),
                value,
            });
        }
        if !beta.is_zero() && value.is_zero() {
            strict = false;
        }
    }
    Ok(SemipositivityReport::Pass {
        d_max: d_max.clone(),
        strict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rational::{rat, rat_int};
    use crate::model::{check_ss_equals_s, fixed_point_subsets};
    use crate::testutil::model;

    fn classes_of(p: &GitPresentation, d_max: Rat) -> Vec<CurveClass> {
        let fixed = fixed_point_subsets(p).unwrap();
        enumerate_effective(p, &fixed, &d_max).unwrap()
    }

    #[test]
    fn pairing_examples() {
        let p1 = model("p1", &[vec![1, 1]], &[1]);
        let beta = CurveClass::new(&p1, vec![rat_int(1)]);
        assert_eq!(beta.pairing(&[BigInt::one()]), rat_int(1));
        assert_eq!(beta.pairing(&[BigInt::zero()]), rat_int(0));

        let wp = model("wp12", &[vec![1, 2]], &[1]);
        let half = CurveClass::new(&wp, vec![rat(1, 2)]);
        assert_eq!(half.pairing(&[BigInt::from(2)]), rat_int(1));
        assert_eq!(half.ray_pairing(0), &rat(1, 2));
        assert_eq!(half.ray_pairing(1), &rat_int(1));
    }

    #[test]
    fn minimal_a_examples() {
        let wp = model("wp12", &[vec![1, 2]], &[1]);
        assert_eq!(
            CurveClass::new(&wp, vec![rat_int(3)]).minimal_a(),
            BigInt::one()
        );
        assert_eq!(
            CurveClass::new(&wp, vec![rat(1, 2)]).minimal_a(),
            BigInt::from(2)
        );
        let two = model("rank2", &[vec![1, 0, 1], vec![0, 1, 1]], &[1, 1]);
        assert_eq!(
            CurveClass::new(&two, vec![rat(1, 2), rat(1, 3)]).minimal_a(),
            BigInt::from(6)
        );
    }

    #[test]
    fn f_beta_nonempty_examples() {
        let p1 = model("p1", &[vec![1, 1]], &[1]);
        assert!(f_beta_nonempty(&p1, &CurveClass::zero(&p1)).unwrap());
        assert!(!f_beta_nonempty(&p1, &CurveClass::new(&p1, vec![rat_int(-1)])).unwrap());

        let wp = model("wp12", &[vec![1, 2]], &[1]);
        assert!(f_beta_nonempty(&wp, &CurveClass::new(&wp, vec![rat(1, 2)])).unwrap());
    }

    #[test]
    fn enumerate_p1() {
        let p1 = model("p1", &[vec![1, 1]], &[1]);
        let classes = classes_of(&p1, rat_int(2));
        let degrees: Vec<Rat> = classes.iter().map(|c| c.degree().clone()).collect();
        assert_eq!(degrees, vec![rat_int(0), rat_int(1), rat_int(2)]);
    }

    #[test]
    fn enumerate_wp12() {
        let wp = model("wp12", &[vec![1, 2]], &[1]);
        let classes = classes_of(&wp, rat_int(1));
        let degrees: Vec<Rat> = classes.iter().map(|c| c.degree().clone()).collect();
        assert_eq!(degrees, vec![rat_int(0), rat(1, 2), rat_int(1)]);
    }

    #[test]
    fn enumerate_local_p2() {
        let local = model("local_p2", &[vec![1, 1, 1, -3]], &[1]);
        let classes = classes_of(&local, rat_int(2));
        let degrees: Vec<Rat> = classes.iter().map(|c| c.degree().clone()).collect();
        assert_eq!(degrees, vec![rat_int(0), rat_int(1), rat_int(2)]);
    }

    #[test]
    fn effectivity_degree_zero_iff_zero_class() {
        for p in crate::testutil::corpus() {
            if !check_ss_equals_s(&p).unwrap().ss_equals_s {
                continue;
            }
            for beta in classes_of(&p, rat_int(2)) {
                assert!(!beta.degree().is_negative());
                assert_eq!(beta.degree().is_zero(), beta.is_zero());
            }
        }
    }

    #[test]
    fn enumeration_matches_brute_force_lattice_scan() {
        use crate::model::exponent_lcm_e;
        use std::collections::BTreeSet;
        for p in crate::testutil::corpus() {
            let e = i64::try_from(&exponent_lcm_e(&p).unwrap()).unwrap();
            let r = p.rank();
            let enumerated: BTreeSet<Vec<Rat>> = classes_of(&p, rat_int(2))
                .iter()
                .map(|c| c.components().to_vec())
                .collect();

            // Scan beta in (1/e) Z^r over the box [-3, 3]^r.
            let box_bound = 3i64;
            let steps = 2 * box_bound * e;
            let mut brute: BTreeSet<Vec<Rat>> = BTreeSet::new();
            let mut counters = vec![0i64; r];
            loop {
                let components: Vec<Rat> = counters
                    .iter()
                    .map(|&k| rat(k - box_bound * e, e))
                    .collect();
                let beta = CurveClass::new(&p, components.clone());
                if !beta.degree().is_negative()
                    && *beta.degree() <= rat_int(2)
                    && f_beta_nonempty(&p, &beta).unwrap()
                {
                    brute.insert(components);
                }
                let mut pos = 0;
                loop {
                    if pos == r {
                        break;
                    }
                    counters[pos] += 1;
                    if counters[pos] <= steps {
                        break;
                    }
                    counters[pos] = 0;
                    pos += 1;
                }
                if pos == r {
                    break;
                }
            }
            assert_eq!(enumerated, brute, "mismatch on {}", p.name());
            // The box is adequate: nothing sits on its boundary.
            assert!(brute.iter().flatten().all(|c| c.abs() < rat_int(box_bound)));
        }
    }

    #[test]
    fn minimal_a_divides_e_on_corpus() {
        use crate::model::exponent_lcm_e;
        for p in crate::testutil::corpus() {
            if !check_ss_equals_s(&p).unwrap().ss_equals_s {
                continue;
            }
            let e = exponent_lcm_e(&p).unwrap();
            for beta in classes_of(&p, rat_int(2)) {
                assert!(
                    (&e % beta.minimal_a()).is_zero(),
                    "a does not divide e on {}",
                    p.name()
                );
            }
        }
    }

    #[test]
    fn loop_space_dims_examples() {
        let p1 = model("p1", &[vec![1, 1]], &[1]);
        for d in 0..3i64 {
            let beta = CurveClass::new(&p1, vec![rat_int(d)]);
            let dims = loop_space_dims(&p1, &beta).unwrap();
            assert_eq!(dims.dim_w_beta, 2 * (d + 1));
            assert_eq!(dims.dim_stack, 2 * d + 1);
            assert_eq!(dims.obstruction_dim, 0);
        }

        let wp = model("wp12", &[vec![1, 2]], &[1]);
        let half = CurveClass::new(&wp, vec![rat(1, 2)]);
        let dims = loop_space_dims(&wp, &half).unwrap();
        assert_eq!(dims.a, BigInt::from(2));
        assert_eq!(dims.dim_w_beta, 3);
        assert_eq!(dims.dim_stack, 2);

        let local = model("local_p2", &[vec![1, 1, 1, -3]], &[1]);
        let one = CurveClass::new(&local, vec![rat_int(1)]);
        let dims = loop_space_dims(&local, &one).unwrap();
        assert_eq!(dims.dim_w_beta, 6);
        assert_eq!(dims.obstruction_dim, 2);
        assert_eq!(dims.virtual_dim, 3);
    }

    #[test]
    fn section_counts_match_monomial_enumeration() {
        // dim C[x,y]_m with deg x = a, deg y = 1 equals the number of
        // monomials x^i y^j with a*i + j = m.
        let wp = model("wp12", &[vec![1, 2]], &[1]);
        for num in 0..12i64 {
            let beta = CurveClass::new(&wp, vec![rat(num, 2)]);
            let a = i64::try_from(&beta.minimal_a()).unwrap();
            let mut expected = 0i64;
            for rho in 0..2 {
                let scaled = beta.ray_pairing(rho) * Rat::from_integer(BigInt::from(a));
                let m = i64::try_from(scaled.numer()).unwrap();
                expected += (0..=m).filter(|i| m - i * a >= 0).count() as i64;
            }
            let dims = loop_space_dims(&wp, &beta).unwrap();
            assert_eq!(dims.dim_w_beta, expected, "mismatch at beta = {num}/2");
        }
    }

    #[test]
    fn virtual_dim_moduli_examples() {
        let p1 = model("p1", &[vec![1, 1]], &[1]);
        let beta = CurveClass::new(&p1, vec![rat_int(1)]);
        let v = virtual_dim_moduli(&p1, 0, 2, &beta, &[rat_int(0), rat_int(0)]).unwrap();
        assert_eq!(v, rat_int(2));

        let wp = model("wp12", &[vec![1, 2]], &[1]);
        let half = CurveClass::new(&wp, vec![rat(1, 2)]);
        let v = virtual_dim_moduli(&wp, 0, 1, &half, &[rat(1, 2)]).unwrap();
        assert_eq!(v, rat_int(0));

        let zero = CurveClass::zero(&wp);
        let v = virtual_dim_moduli(&wp, 1, 0, &zero, &[]).unwrap();
        assert_eq!(v, rat_int(0));
    }

    #[test]
    fn semipositivity_examples() {
        let fixed = |p: &GitPresentation| fixed_point_subsets(p).unwrap();

        let p2 = model("p2", &[vec![1, 1, 1]], &[1]);
        assert_eq!(
            semipositivity_report(&p2, &fixed(&p2), &rat_int(2)).unwrap(),
            SemipositivityReport::Pass {
                d_max: rat_int(2),
                strict: true
            }
        );

        let local = model("local_p2", &[vec![1, 1, 1, -3]], &[1]);
        assert_eq!(
            semipositivity_report(&local, &fixed(&local), &rat_int(2)).unwrap(),
            SemipositivityReport::Pass {
                d_max: rat_int(2),
                strict: false
            }
        );

        let neg = model("neg", &[vec![1, 1, -3]], &[1]);
        match semipositivity_report(&neg, &fixed(&neg), &rat_int(2)).unwrap() {
            SemipositivityReport::Violation { beta, value } => {
                assert_eq!(beta, vec![rat_int(1)]);
                assert_eq!(value, rat_int(-1));
            }
            other => panic!("expected violation, got {other:?}"),
        }
    }
}
