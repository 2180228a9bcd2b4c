//! Shared per-model context: stability data, sector list, and sector rings,
//! built once and shared read-only by the series engine and the CLI.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;

use crate::cohomology::SectorRing;
use crate::error::{Error, Result};
use crate::exactmath::Rat;
use crate::model::{check_ss_equals_s, GitPresentation, StabilityReport};
use crate::sectors::{enumerate_sectors, SectorLabel};

pub struct Analysis {
    presentation: GitPresentation,
    stability: StabilityReport,
    sectors: Vec<SectorLabel>,
    rings: BTreeMap<SectorLabel, Arc<SectorRing>>,
    proper: bool,
}

impl Analysis {
    /// Validates stability and materializes sectors and their rings.
    ///
    /// `ring_degree` overrides the per-sector truncation (default: one past
    /// the sector dimension).
    pub fn new(presentation: GitPresentation, ring_degree: Option<usize>) -> Result<Analysis> {
        let stability = check_ss_equals_s(&presentation)?;
        if !stability.ss_equals_s {
            return Err(Error::Stability(format!(
                "semistable != stable; witness rays {:?}",
                stability.witness.clone().unwrap_or_default()
            )));
        }
        if stability.fixed_subsets.is_empty() {
            return Err(Error::EmptySemistableLocus);
        }
        let sectors = enumerate_sectors(&presentation, &stability.fixed_subsets);
        let mut rings = BTreeMap::new();
        for sector in &sectors {
            let ring = SectorRing::build(&presentation, sector, ring_degree)?;
            rings.insert(sector.clone(), ring);
        }
        let proper = presentation.coarse_space_proper()?;
        Ok(Analysis {
            presentation,
            stability,
            sectors,
            rings,
            proper,
        })
    }

    pub fn presentation(&self) -> &GitPresentation {
        &self.presentation
    }

    pub fn stability(&self) -> &StabilityReport {
        &self.stability
    }

    pub fn exponent_e(&self) -> &BigInt {
        &self.stability.exponent_e
    }

    pub fn sectors(&self) -> &[SectorLabel] {
        &self.sectors
    }

    pub fn proper(&self) -> bool {
        self.proper
    }

    pub fn ring(&self, sector: &SectorLabel) -> Result<&Arc<SectorRing>> {
        self.rings.get(sector).ok_or_else(|| {
            Error::Internal(format!(
                "sector {:?} missing from the enumeration; class sector outside inertia list",
                sector.action()
            ))
        })
    }

    pub fn untwisted_ring(&self) -> Result<&Arc<SectorRing>> {
        self.ring(&SectorLabel::untwisted(self.presentation.n_rays()))
    }

    pub fn effective_classes(&self, d_max: &Rat) -> Result<Vec<crate::classes::CurveClass>> {
        crate::classes::enumerate_effective(
            &self.presentation,
            &self.stability.fixed_subsets,
            d_max,
        )
    }
}
