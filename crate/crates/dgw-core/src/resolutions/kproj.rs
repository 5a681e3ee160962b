//! Sampled K-projectivity testing: every module chain map from the
//! candidate into each acyclic corpus member must be null-homotopic through
//! a module-linear homotopy.
//!
//! An all-pass verdict is evidence by sampling, not a proof; resolutions
//! built from semifree columns are additionally certified by construction
//! and the two grades are kept apart in reports.

use crate::dg::hom::module_null_homotopy;
use crate::dg::module::{DGModule, ModuleMap};
use crate::error::Error;

#[derive(Clone, Debug)]
pub struct KProjVerdict {
    pub corpus_member: String,
    pub map_index: usize,
    pub null_homotopic: bool,
}

#[derive(Clone, Debug)]
pub struct KProjReport {
    pub candidate: String,
    pub verdicts: Vec<KProjVerdict>,
    pub all_null_homotopic: bool,
    /// "certified-by-construction" for semifree totals, "sampled" here.
    pub grade: &'static str,
}

/// `kprojective_property_test`. Non-acyclic corpus members are rejected.
pub fn kprojective_property_test(
    p: &DGModule,
    corpus: &[(DGModule, Vec<ModuleMap>)],
) -> Result<KProjReport, Error> {
    let mut verdicts = Vec::new();
    let mut all = true;
    for (z, maps) in corpus {
        if !z.carrier().is_acyclic() {
            return Err(Error::structural(format!(
                "kprojective_property_test: corpus member {} is not acyclic",
                z.name
            )));
        }
        for (idx, f) in maps.iter().enumerate() {
            if f.source.carrier() != p.carrier() {
                return Err(Error::structural("sampled map does not start at the candidate"));
            }
            if f.target.carrier() != z.carrier() {
                return Err(Error::structural("sampled map does not land in the corpus member"));
            }
            let verdict = module_null_homotopy(f)?.is_some();
            if !verdict {
                all = false;
            }
            verdicts.push(KProjVerdict {
                corpus_member: z.name.clone(),
                map_index: idx,
                null_homotopic: verdict,
            });
        }
    }
    Ok(KProjReport {
        candidate: p.name.clone(),
        verdicts,
        all_null_homotopic: all,
        grade: "sampled",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dg::examples::{augmentation_module, delta};
    use crate::dg::hom::module_chain_map_basis;
    use crate::dg::module::cone_module;

    #[test]
    fn free_module_passes_against_cones() {
        let d = delta();
        let p = DGModule::regular(&d).unwrap();
        let (z, _) = cone_module(&ModuleMap::identity(&p)).unwrap();
        let basis = module_chain_map_basis(&p, &z).unwrap();
        let maps: Vec<ModuleMap> = basis
            .into_iter()
            .map(|f| ModuleMap::new(p.clone(), z.clone(), f).unwrap())
            .collect();
        let report = kprojective_property_test(&p, &[(z, maps)]).unwrap();
        assert!(report.all_null_homotopic);
    }

    #[test]
    fn non_acyclic_corpus_rejected() {
        let d = delta();
        let p = DGModule::regular(&d).unwrap();
        let z = augmentation_module(&d).unwrap();
        assert!(kprojective_property_test(&p, &[(z, Vec::new())]).is_err());
    }
}
