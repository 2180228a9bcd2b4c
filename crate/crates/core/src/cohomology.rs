//! Degree-truncated quotient rings presenting each sector's rational
//! cohomology.
//!
//! The ring is `Q[xi_1, .., xi_r]` modulo the ideal generated by the
//! products `prod_{rho in B} D_rho(xi)` over the minimal Stanley-Reisner
//! sets `B` of the sector's support, where `D_rho(xi) = sum_i a_{i,rho}
//! xi_i`. Each graded piece is materialized by exact row reduction: the
//! normal-form basis is the set of non-pivot monomials, and every monomial
//! carries its expansion over that basis.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactmath::Rat;
use crate::model::{sr_generators, GitPresentation};
use crate::sectors::SectorLabel;

/// Exponent vector of a monomial in the xi generators.
pub type Monomial = Vec<u32>;

#[derive(Clone, Debug)]
struct DegreePiece {
    monomials: Vec<Monomial>,
    index: BTreeMap<Monomial, usize>,
    /// Indices (into `monomials`) of the normal-form basis.
    basis: Vec<usize>,
    /// Per monomial: its normal form as coefficients over `basis`.
    reduction: Vec<Vec<Rat>>,
}

#[derive(Debug)]
pub struct SectorRing {
    sector: SectorLabel,
    rank: usize,
    max_degree: usize,
    /// Linear form of each ray divisor in the xi generators.
    divisor_forms: Vec<Vec<Rat>>,
    /// Minimal Stanley-Reisner sets of the support.
    sr_sets: Vec<Vec<usize>>,
    pieces: Vec<DegreePiece>,
    /// True when every degree beyond `max_degree` provably vanishes, i.e.
    /// some materialized degree already has dimension zero.
    exact_beyond_truncation: bool,
}

fn monomials_of_degree(rank: usize, degree: usize) -> Vec<Monomial> {
    fn rec(rank: usize, degree: usize, prefix: &mut Monomial, out: &mut Vec<Monomial>) {
        if prefix.len() == rank - 1 {
            prefix.push(degree as u32);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=degree).rev() {
            prefix.push(e as u32);
            rec(rank, degree - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if rank == 0 {
        if degree == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(rank, degree, &mut Vec::with_capacity(rank), &mut out);
    out
}

/// Dense homogeneous polynomial over a fixed degree's monomial list.
fn poly_mul(
    rank: usize,
    a_deg: usize,
    a: &[Rat],
    b_deg: usize,
    b: &[Rat],
    target: &DegreePiece,
) -> Vec<Rat> {
    let a_monos = monomials_of_degree(rank, a_deg);
    let b_monos = monomials_of_degree(rank, b_deg);
    let mut out = vec![Rat::zero(); target.monomials.len()];
    for (ia, ca) in a.iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        for (ib, cb) in b.iter().enumerate() {
            if cb.is_zero() {
                continue;
            }
            let mono: Monomial = a_monos[ia]
                .iter()
                .zip(&b_monos[ib])
                .map(|(x, y)| x + y)
                .collect();
            let idx = target.index[&mono];
            out[idx] += ca * cb;
        }
    }
    out
}

impl SectorRing {
    /// Materializes the sector's quotient ring up to `max_degree`
    /// (inclusive). The default truncation is one past the sector
    /// dimension.
    pub fn build(
        p: &GitPresentation,
        sector: &SectorLabel,
        max_degree: Option<usize>,
    ) -> Result<Arc<SectorRing>> {
        let support = sector.support();
        let sr_sets = sr_generators(p, &support)?;
        let rank = p.rank();
        let max_degree = max_degree.unwrap_or_else(|| sector.dim(p).max(0) as usize + 1);

        let divisor_forms: Vec<Vec<Rat>> = (0..p.n_rays())
            .map(|rho| {
                (0..rank)
                    .map(|i| Rat::from_integer(p.charge(i, rho).clone()))
                    .collect()
            })
            .collect();

        // Expand each Stanley-Reisner product once.
        let mut generators: Vec<(usize, Vec<Rat>)> = Vec::new();
        for b in &sr_sets {
            let mut deg = 0usize;
            let mut coeffs = vec![Rat::one()];
            for &rho in b {
                let next_deg = deg + 1;
                let next_piece = DegreePiece::unreduced(rank, next_deg);
                coeffs = poly_mul(rank, deg, &coeffs, 1, &divisor_forms[rho], &next_piece);
                deg = next_deg;
            }
            generators.push((deg, coeffs));
        }

        let mut pieces: Vec<DegreePiece> = Vec::with_capacity(max_degree + 1);
        for k in 0..=max_degree {
            let mut piece = DegreePiece::unreduced(rank, k);
            // Relation rows: m * g for each generator g and monomial m of
            // complementary degree.
            let mut rows: Vec<Vec<Rat>> = Vec::new();
            for (gdeg, gcoeffs) in &generators {
                if *gdeg > k {
                    continue;
                }
                let m_deg = k - gdeg;
                let m_monos = monomials_of_degree(rank, m_deg);
                for m_idx in 0..m_monos.len() {
                    let mut m_vec = vec![Rat::zero(); m_monos.len()];
                    m_vec[m_idx] = Rat::one();
                    rows.push(poly_mul(rank, m_deg, &m_vec, *gdeg, gcoeffs, &piece));
                }
            }
            piece.reduce(rows);
            pieces.push(piece);
        }

        let exact_beyond_truncation = pieces.iter().any(|p| p.basis.is_empty());
        Ok(Arc::new(SectorRing {
            sector: sector.clone(),
            rank,
            max_degree,
            divisor_forms,
            sr_sets,
            pieces,
            exact_beyond_truncation,
        }))
    }

    pub fn sector(&self) -> &SectorLabel {
        &self.sector
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn sr_sets(&self) -> &[Vec<usize>] {
        &self.sr_sets
    }

    /// Dimensions of the graded pieces, degrees `0..=max_degree`.
    pub fn betti_dims(&self) -> Vec<usize> {
        self.pieces.iter().map(|p| p.basis.len()).collect()
    }

    /// Largest degree with a nonzero piece, if any piece is nonzero.
    pub fn top_nonzero_degree(&self) -> Option<usize> {
        (0..=self.max_degree)
            .rev()
            .find(|&k| !self.pieces[k].basis.is_empty())
    }

    pub fn exact_beyond_truncation(&self) -> bool {
        self.exact_beyond_truncation
    }

    fn same_ring(&self, other: &SectorRing) -> bool {
        self.sector == other.sector && self.max_degree == other.max_degree
    }

    /// Monomial (exponent vector) of basis slot `j` in degree `k`.
    pub fn basis_monomial(&self, k: usize, j: usize) -> &Monomial {
        let piece = &self.pieces[k];
        &piece.monomials[piece.basis[j]]
    }
}

impl DegreePiece {
    fn unreduced(rank: usize, degree: usize) -> Self {
        let monomials = monomials_of_degree(rank, degree);
        let index = monomials.iter().cloned().zip(0..).collect();
        DegreePiece {
            monomials,
            index,
            basis: Vec::new(),
            reduction: Vec::new(),
        }
    }

    /// Row-reduces the relation rows and installs the normal-form data.
    fn reduce(&mut self, mut rows: Vec<Vec<Rat>>) {
        let n = self.monomials.len();
        let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
        let mut rank = 0usize;
        for col in 0..n {
            let Some(r) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
                continue;
            };
            rows.swap(rank, r);
            let inv = rows[rank][col].clone();
            for j in 0..n {
                rows[rank][j] = &rows[rank][j] / &inv;
            }
            for r2 in 0..rows.len() {
                if r2 != rank && !rows[r2][col].is_zero() {
                    let f = rows[r2][col].clone();
                    for j in 0..n {
                        let sub = &f * &rows[rank][j];
                        rows[r2][j] -= sub;
                    }
                }
            }
            pivots.push((rank, col));
            rank += 1;
        }
        let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
        self.basis = (0..n).filter(|c| !pivot_cols.contains(c)).collect();
        let basis_pos: BTreeMap<usize, usize> = self.basis.iter().cloned().zip(0..).collect();
        self.reduction = (0..n)
            .map(|c| {
                let mut coords = vec![Rat::zero(); self.basis.len()];
                if let Some(&pos) = basis_pos.get(&c) {
                    coords[pos] = Rat::one();
                } else {
                    let (row, _) = pivots.iter().find(|&&(_, pc)| pc == c).unwrap();
                    for (pos, &b) in self.basis.iter().enumerate() {
                        coords[pos] = -rows[*row][b].clone();
                    }
                }
                coords
            })
            .collect();
    }

    fn reduce_vector(&self, raw: &[Rat]) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); self.basis.len()];
        for (idx, c) in raw.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (pos, red) in self.reduction[idx].iter().enumerate() {
                if !red.is_zero() {
                    out[pos] += c * red;
                }
            }
        }
        out
    }
}

/// An element of a sector ring: per-degree coordinates over the
/// normal-form bases. `flagged` records that a truncation may have dropped
/// content the ring could not prove zero.
#[derive(Clone, Debug)]
pub struct RingElement {
    ring: Arc<SectorRing>,
    comps: BTreeMap<usize, Vec<Rat>>,
    flagged: bool,
}

impl PartialEq for RingElement {
    fn eq(&self, other: &Self) -> bool {
        self.ring.same_ring(&other.ring) && self.comps == other.comps
    }
}
impl Eq for RingElement {}

impl RingElement {
    pub fn zero(ring: &Arc<SectorRing>) -> Self {
        RingElement {
            ring: Arc::clone(ring),
            comps: BTreeMap::new(),
            flagged: false,
        }
    }

    pub fn one(ring: &Arc<SectorRing>) -> Self {
        let piece = &ring.pieces[0];
        assert_eq!(
            piece.basis.len(),
            1,
            "degree-0 piece must be one-dimensional"
        );
        let mut comps = BTreeMap::new();
        comps.insert(0usize, vec![Rat::one()]);
        RingElement {
            ring: Arc::clone(ring),
            comps,
            flagged: false,
        }
    }

    /// The generator `xi_i` reduced into the ring.
    pub fn xi(ring: &Arc<SectorRing>, i: usize) -> Self {
        let mut raw = vec![Rat::zero(); ring.pieces[1].monomials.len()];
        let mono: Monomial = (0..ring.rank).map(|k| u32::from(k == i)).collect();
        raw[ring.pieces[1].index[&mono]] = Rat::one();
        Self::from_raw_degree(ring, 1, raw)
    }

    /// The divisor class `D_rho = sum_i a_{i,rho} xi_i` in normal form.
    pub fn divisor(ring: &Arc<SectorRing>, rho: usize) -> Self {
        let piece = &ring.pieces[1];
        let mut raw = vec![Rat::zero(); piece.monomials.len()];
        for i in 0..ring.rank {
            let mono: Monomial = (0..ring.rank).map(|k| u32::from(k == i)).collect();
            raw[piece.index[&mono]] = ring.divisor_forms[rho][i].clone();
        }
        Self::from_raw_degree(ring, 1, raw)
    }

    /// First Chern class of the line bundle of an arbitrary integer
    /// character: `sum_i eta_i xi_i` in normal form.
    pub fn character(ring: &Arc<SectorRing>, eta: &[num_bigint::BigInt]) -> Self {
        assert_eq!(eta.len(), ring.rank, "character rank mismatch");
        let piece = &ring.pieces[1];
        let mut raw = vec![Rat::zero(); piece.monomials.len()];
        for i in 0..ring.rank {
            let mono: Monomial = (0..ring.rank).map(|k| u32::from(k == i)).collect();
            raw[piece.index[&mono]] = Rat::from_integer(eta[i].clone());
        }
        Self::from_raw_degree(ring, 1, raw)
    }

    fn from_raw_degree(ring: &Arc<SectorRing>, degree: usize, raw: Vec<Rat>) -> Self {
        let mut el = Self::zero(ring);
        if degree <= ring.max_degree {
            let coords = ring.pieces[degree].reduce_vector(&raw);
            if coords.iter().any(|c| !c.is_zero()) {
                el.comps.insert(degree, coords);
            }
        }
        el
    }

    pub fn ring(&self) -> &Arc<SectorRing> {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn flagged(&self) -> bool {
        self.flagged
    }

    /// Degrees with nonzero components, ascending.
    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.comps.keys().copied()
    }

    /// Coordinates over the degree-`k` basis, if nonzero there.
    pub fn component(&self, k: usize) -> Option<&[Rat]> {
        self.comps.get(&k).map(|v| v.as_slice())
    }

    /// The homogeneous part of degree `k` as a standalone element.
    pub fn homogeneous_part(&self, k: usize) -> RingElement {
        let mut el = Self::zero(&self.ring);
        el.flagged = self.flagged;
        if let Some(v) = self.comps.get(&k) {
            el.comps.insert(k, v.clone());
        }
        el
    }

    /// If the element is a rational multiple of the unit, returns the
    /// scalar.
    pub fn as_scalar(&self) -> Option<Rat> {
        match self.comps.len() {
            0 => Some(Rat::zero()),
            1 => {
                let (k, v) = self.comps.iter().next().unwrap();
                (*k == 0).then(|| v[0].clone())
            }
            _ => None,
        }
    }

    pub fn scale(&self, c: &Rat) -> RingElement {
        if c.is_zero() {
            let mut z = Self::zero(&self.ring);
            z.flagged = self.flagged;
            return z;
        }
        let comps = self
            .comps
            .iter()
            .map(|(k, v)| (*k, v.iter().map(|x| x * c).collect()))
            .collect();
        RingElement {
            ring: Arc::clone(&self.ring),
            comps,
            flagged: self.flagged,
        }
    }

    pub fn add(&self, other: &RingElement) -> RingElement {
        assert!(
            self.ring.same_ring(&other.ring),
            "ring mismatch: cannot add elements of different sector rings"
        );
        let mut comps = self.comps.clone();
        for (k, v) in &other.comps {
            let entry = comps
                .entry(*k)
                .or_insert_with(|| vec![Rat::zero(); v.len()]);
            for (a, b) in entry.iter_mut().zip(v) {
                *a += b;
            }
        }
        comps.retain(|_, v| v.iter().any(|c| !c.is_zero()));
        RingElement {
            ring: Arc::clone(&self.ring),
            comps,
            flagged: self.flagged || other.flagged,
        }
    }

    pub fn neg(&self) -> RingElement {
        self.scale(&-Rat::one())
    }

    pub fn sub(&self, other: &RingElement) -> RingElement {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RingElement) -> RingElement {
        assert!(
            self.ring.same_ring(&other.ring),
            "ring mismatch: cannot multiply elements of different sector rings"
        );
        let ring = &self.ring;
        let mut out = Self::zero(ring);
        out.flagged = self.flagged || other.flagged;
        for (&ka, va) in &self.comps {
            for (&kb, vb) in &other.comps {
                let k = ka + kb;
                if k > ring.max_degree {
                    // Content beyond the truncation: sound to drop only when
                    // the ring provably vanishes out there.
                    if !ring.exact_beyond_truncation {
                        out.flagged = true;
                    }
                    continue;
                }
                let piece_a = &ring.pieces[ka];
                let piece_b = &ring.pieces[kb];
                let target = &ring.pieces[k];
                let mut raw = vec![Rat::zero(); target.monomials.len()];
                for (ja, ca) in va.iter().enumerate() {
                    if ca.is_zero() {
                        continue;
                    }
                    let ma = &piece_a.monomials[piece_a.basis[ja]];
                    for (jb, cb) in vb.iter().enumerate() {
                        if cb.is_zero() {
                            continue;
                        }
                        let mb = &piece_b.monomials[piece_b.basis[jb]];
                        let mono: Monomial = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                        raw[target.index[&mono]] += ca * cb;
                    }
                }
                let coords = target.reduce_vector(&raw);
                if coords.iter().any(|c| !c.is_zero()) {
                    let entry = out
                        .comps
                        .entry(k)
                        .or_insert_with(|| vec![Rat::zero(); coords.len()]);
                    for (a, b) in entry.iter_mut().zip(&coords) {
                        *a += b;
                    }
                }
            }
        }
        out.comps.retain(|_, v| v.iter().any(|c| !c.is_zero()));
        out
    }

    /// Nonzero terms as (degree, monomial exponents, coefficient).
    pub fn terms(&self) -> Vec<(usize, Monomial, Rat)> {
        let mut out = Vec::new();
        for (&k, v) in &self.comps {
            for (j, c) in v.iter().enumerate() {
                if !c.is_zero() {
                    out.push((k, self.ring.basis_monomial(k, j).clone(), c.clone()));
                }
            }
        }
        out
    }
}

/// Free-function form of [`RingElement::divisor`].
pub fn divisor_class(ring: &Arc<SectorRing>, rho: usize) -> RingElement {
    RingElement::divisor(ring, rho)
}

/// Graded dimensions of the ring.
pub fn betti_dims(ring: &SectorRing) -> Vec<usize> {
    ring.betti_dims()
}

/// Renders a monomial in the divisor symbols `H1..Hr`; the empty monomial
/// renders as `1`.
pub fn monomial_name(mono: &Monomial) -> String {
    let mut parts = Vec::new();
    for (i, &e) in mono.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(format!("H{}", i + 1)),
            _ => parts.push(format!("H{}^{}", i + 1, e)),
        }
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

/// Parses the output of [`monomial_name`] back into exponents.
pub fn parse_monomial_name(name: &str, rank: usize) -> Result<Monomial> {
    let mut mono = vec![0u32; rank];
    if name.trim() == "1" {
        return Ok(mono);
    }
    for factor in name.split('*') {
        let factor = factor.trim();
        let (var, exp) = match factor.split_once('^') {
            Some((v, e)) => (
                v,
                e.parse::<u32>()
                    .map_err(|_| Error::Check(format!("bad exponent in monomial {name}")))?,
            ),
            None => (factor, 1),
        };
        let idx: usize = var
            .strip_prefix('H')
            .and_then(|s| s.parse::<usize>().ok())
            .ok_or_else(|| Error::Check(format!("bad variable in monomial {name}")))?;
        if idx == 0 || idx > rank {
            return Err(Error::Check(format!("variable out of range in {name}")));
        }
        mono[idx - 1] += exp;
    }
    Ok(mono)
}
