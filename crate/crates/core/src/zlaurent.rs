//! Finitely supported Laurent expansions in `z` with sector-ring
//! coefficients.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::cohomology::{RingElement, SectorRing};
use crate::error::{Error, Result};
use crate::exactmath::Rat;

/// Map from z-power (possibly negative) to a coefficient in one fixed
/// sector ring. Zero coefficients are never stored. The `flagged` bit is
/// sticky: it records that some intermediate product may have lost content
/// past the ring truncation.
#[derive(Clone, Debug)]
pub struct ZLaurent {
    ring: Arc<SectorRing>,
    coeffs: BTreeMap<i64, RingElement>,
    flagged: bool,
}

impl PartialEq for ZLaurent {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}
impl Eq for ZLaurent {}

impl ZLaurent {
    pub fn zero(ring: &Arc<SectorRing>) -> Self {
        ZLaurent {
            ring: Arc::clone(ring),
            coeffs: BTreeMap::new(),
            flagged: false,
        }
    }

    pub fn one(ring: &Arc<SectorRing>) -> Self {
        Self::monomial(0, RingElement::one(ring))
    }

    /// `coefficient * z^power`.
    pub fn monomial(power: i64, coefficient: RingElement) -> Self {
        let ring = Arc::clone(coefficient.ring());
        let flagged = coefficient.flagged();
        let mut coeffs = BTreeMap::new();
        if !coefficient.is_zero() {
            coeffs.insert(power, coefficient);
        }
        ZLaurent {
            ring,
            coeffs,
            flagged,
        }
    }

    /// `element + c * z`, the basic linear factor of the residue formulas.
    pub fn linear(element: RingElement, c: &Rat) -> Self {
        let ring = Arc::clone(element.ring());
        let mut out = Self::monomial(0, element);
        let z_coeff = RingElement::one(&ring).scale(c);
        if !z_coeff.is_zero() {
            out.coeffs.insert(1, z_coeff);
        }
        out
    }

    pub fn ring(&self) -> &Arc<SectorRing> {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coefficient(&self, power: i64) -> Option<&RingElement> {
        self.coeffs.get(&power)
    }

    /// (lowest, highest) populated powers.
    pub fn support_range(&self) -> Option<(i64, i64)> {
        let lo = self.coeffs.keys().next()?;
        let hi = self.coeffs.keys().next_back()?;
        Some((*lo, *hi))
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &RingElement)> {
        self.coeffs.iter().map(|(k, v)| (*k, v))
    }

    pub fn flagged(&self) -> bool {
        self.flagged || self.coeffs.values().any(|c| c.flagged())
    }

    pub fn add(&self, other: &ZLaurent) -> ZLaurent {
        let mut out = self.clone();
        out.flagged |= other.flagged;
        for (p, c) in &other.coeffs {
            let merged = match out.coeffs.remove(p) {
                Some(existing) => existing.add(c),
                None => c.clone(),
            };
            if !merged.is_zero() {
                out.coeffs.insert(*p, merged);
            } else {
                out.flagged |= merged.flagged();
            }
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> ZLaurent {
        let mut out = Self::zero(&self.ring);
        out.flagged = self.flagged;
        if c.is_zero() {
            return out;
        }
        for (p, coeff) in &self.coeffs {
            out.coeffs.insert(*p, coeff.scale(c));
        }
        out
    }

    pub fn mul(&self, other: &ZLaurent) -> ZLaurent {
        let mut out = Self::zero(&self.ring);
        out.flagged = self.flagged || other.flagged;
        for (pa, ca) in &self.coeffs {
            for (pb, cb) in &other.coeffs {
                let prod = ca.mul(cb);
                out.flagged |= prod.flagged();
                if prod.is_zero() {
                    continue;
                }
                let p = pa + pb;
                let merged = match out.coeffs.remove(&p) {
                    Some(existing) => existing.add(&prod),
                    None => prod,
                };
                if !merged.is_zero() {
                    out.coeffs.insert(p, merged);
                }
            }
        }
        out
    }

    pub fn mul_ring(&self, factor: &RingElement) -> ZLaurent {
        let mut out = Self::zero(&self.ring);
        out.flagged = self.flagged || factor.flagged();
        for (p, c) in &self.coeffs {
            let prod = c.mul(factor);
            out.flagged |= prod.flagged();
            if !prod.is_zero() {
                out.coeffs.insert(*p, prod);
            }
        }
        out
    }

    /// Restricts to `[z_min, z_max]`, reporting the dropped powers.
    pub fn clip(&self, z_min: i64, z_max: i64) -> (ZLaurent, Vec<i64>) {
        let mut kept = Self::zero(&self.ring);
        kept.flagged = self.flagged;
        let mut dropped = Vec::new();
        for (p, c) in &self.coeffs {
            if *p < z_min || *p > z_max {
                dropped.push(*p);
            } else {
                kept.coeffs.insert(*p, c.clone());
            }
        }
        (kept, dropped)
    }
}

/// Laurent expansion of `(element + c z)^{-1}` by the geometric series
/// `sum_k (-1)^k element^k / c^{k+1} z^{k+1}`, finite because degree-one
/// elements are nilpotent in the truncated ring.
pub fn invert_linear(element: &RingElement, c: &Rat) -> Result<ZLaurent> {
    if c.is_zero() {
        return Err(Error::Internal(
            "z-free denominator factor: the residue formula guarantees a nonzero z part".into(),
        ));
    }
    let ring = Arc::clone(element.ring());
    let mut out = ZLaurent::zero(&ring);
    out.flagged = element.flagged();
    let mut power_of_element = RingElement::one(&ring);
    let mut sign = Rat::one();
    let mut c_power = c.clone();
    let mut k: i64 = 0;
    loop {
        let coeff = power_of_element.scale(&(&sign / &c_power));
        if !coeff.is_zero() {
            out.coeffs.insert(-(k + 1), coeff);
        }
        power_of_element = power_of_element.mul(element);
        out.flagged |= power_of_element.flagged();
        if power_of_element.is_zero() {
            break;
        }
        // Nilpotency is certain past the truncation.
        if k as usize > ring.max_degree() + 1 {
            break;
        }
        sign = -sign;
        c_power = &c_power * c;
        k += 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::SectorRing;
    use crate::exactmath::rational::{rat, rat_int};
    use crate::model::fixed_point_subsets;
    use crate::sectors::enumerate_sectors;
    use crate::testutil::model;

    fn ring_for(charges: &[Vec<i64>], theta: &[i64], sector_idx: usize) -> Arc<SectorRing> {
        let p = model("m", charges, theta);
        let fixed = fixed_point_subsets(&p).unwrap();
        let sectors = enumerate_sectors(&p, &fixed);
        SectorRing::build(&p, &sectors[sector_idx], None).unwrap()
    }

    #[test]
    fn invert_pure_z() {
        let ring = ring_for(&[vec![1, 1]], &[1], 0);
        let zero = RingElement::zero(&ring);
        let inv = invert_linear(&zero, &rat_int(1)).unwrap();
        assert_eq!(inv.coefficient(-1).unwrap(), &RingElement::one(&ring));
        assert_eq!(inv.coeffs.len(), 1);
    }

    #[test]
    fn invert_on_p1() {
        // (xi + z)^{-1} = z^{-1} - xi z^{-2} in Q[xi]/(xi^2).
        let ring = ring_for(&[vec![1, 1]], &[1], 0);
        let xi = RingElement::xi(&ring, 0);
        let inv = invert_linear(&xi, &rat_int(1)).unwrap();
        assert_eq!(inv.coefficient(-1).unwrap(), &RingElement::one(&ring));
        assert_eq!(inv.coefficient(-2).unwrap(), &xi.neg());
        assert!(inv.coefficient(-3).is_none());
    }

    #[test]
    fn invert_in_trivial_twisted_ring() {
        // Twisted P(1,2) ring is Q; (D_1 + z/2)^{-1} = 2 z^{-1}.
        let ring = ring_for(&[vec![1, 2]], &[1], 1);
        let d1 = RingElement::divisor(&ring, 0);
        assert!(d1.is_zero());
        let inv = invert_linear(&d1, &rat(1, 2)).unwrap();
        assert_eq!(
            inv.coefficient(-1).unwrap(),
            &RingElement::one(&ring).scale(&rat_int(2))
        );
        assert_eq!(inv.coeffs.len(), 1);
    }

    #[test]
    fn zero_z_coefficient_is_an_error() {
        let ring = ring_for(&[vec![1, 1]], &[1], 0);
        let xi = RingElement::xi(&ring, 0);
        assert!(invert_linear(&xi, &rat_int(0)).is_err());
    }

    #[test]
    fn product_times_inverse_is_one() {
        let ring = ring_for(&[vec![1, 1, 1]], &[1], 0);
        let xi = RingElement::xi(&ring, 0);
        for c in [rat_int(1), rat_int(3), rat(1, 2), rat(-2, 5)] {
            let factor = ZLaurent::linear(xi.clone(), &c);
            let inv = invert_linear(&xi, &c).unwrap();
            assert_eq!(factor.mul(&inv), ZLaurent::one(&ring));
        }
    }

    #[test]
    fn clip_reports_drops() {
        let ring = ring_for(&[vec![1, 1]], &[1], 0);
        let xi = RingElement::xi(&ring, 0);
        let inv = invert_linear(&xi, &rat_int(1)).unwrap();
        let (kept, dropped) = inv.clip(-1, 5);
        assert_eq!(dropped, vec![-2]);
        assert_eq!(kept.coefficient(-1).unwrap(), &RingElement::one(&ring));
        assert!(kept.coefficient(-2).is_none());
    }
}
