use std::collections::{BTreeMap, BTreeSet};

use super::CornersError;

/// One blow-up in a chain, through its local model `[ℝⁿ_k ; {0}]`:
/// `n` ambient dimensions, `k` of them boundary (x-type) coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlowupStep {
    pub n: u32,
    pub k: u32,
    pub new_face: String,
    /// Earlier front faces containing this centre; their accumulated density
    /// weight is re-deposited on the new face when it is lifted.
    pub inherits_from: BTreeSet<String>,
}

impl BlowupStep {
    pub fn new<'a>(
        n: u32,
        k: u32,
        new_face: impl Into<String>,
        inherits_from: impl IntoIterator<Item = &'a str>,
    ) -> Self {
        BlowupStep {
            n,
            k,
            new_face: new_face.into(),
            inherits_from: inherits_from.into_iter().map(str::to_string).collect(),
        }
    }
}

/// A b-density lifts through the step to `ρ_ff^{n-k}` times a b-density.
pub fn density_lift_exponent(step: &BlowupStep) -> Result<u32, CornersError> {
    step.n
        .checked_sub(step.k)
        .ok_or_else(|| CornersError::InvalidStep(step.new_face.clone()))
}

/// Accumulated density exponent of every front face created by `steps`.
pub fn chained_density_exponents(
    steps: &[BlowupStep],
) -> Result<BTreeMap<String, u32>, CornersError> {
    let mut acc: BTreeMap<String, u32> = BTreeMap::new();
    for step in steps {
        let mut exponent = density_lift_exponent(step)?;
        for parent in &step.inherits_from {
            let inherited = acc.get(parent).ok_or_else(|| CornersError::DanglingInheritance {
                step: step.new_face.clone(),
                face: parent.clone(),
            })?;
            exponent += inherited;
        }
        acc.insert(step.new_face.clone(), exponent);
    }
    Ok(acc)
}

/// How two cleanly intersecting p-submanifolds sit relative to each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CenterRelation {
    Transversal,
    YInsideZ,
    ZInsideY,
    CleanOnly,
}

/// Whether `[[X; Y]; Z] = [[X; Z]; Y]`.
pub fn commute_blowups(relation: CenterRelation) -> bool {
    !matches!(relation, CenterRelation::CleanOnly)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_step_exponents() {
        assert_eq!(density_lift_exponent(&BlowupStep::new(2, 1, "ff", [])), Ok(1));
        assert_eq!(density_lift_exponent(&BlowupStep::new(3, 1, "ff_b", [])), Ok(2));
        assert_eq!(density_lift_exponent(&BlowupStep::new(3, 3, "corner", [])), Ok(0));
        assert!(density_lift_exponent(&BlowupStep::new(1, 2, "bad", [])).is_err());
    }

    #[test]
    fn double_and_triple_chains() {
        let double = chained_density_exponents(&[
            BlowupStep::new(3, 1, "ff_b", []),
            BlowupStep::new(2, 1, "ff_c", ["ff_b"]),
        ])
        .unwrap();
        assert_eq!(double["ff_b"], 2);
        assert_eq!(double["ff_c"], 3);

        let triple = chained_density_exponents(&[
            BlowupStep::new(4, 1, "fff_b", []),
            BlowupStep::new(4, 2, "fff_c", ["fff_b"]),
        ])
        .unwrap();
        assert_eq!(triple["fff_b"], 3);
        assert_eq!(triple["fff_c"], 5);

        let simple = chained_density_exponents(&[BlowupStep::new(2, 1, "ff", [])]).unwrap();
        assert_eq!(simple["ff"], 1);
    }

    #[test]
    fn dangling_inheritance() {
        let err = chained_density_exponents(&[BlowupStep::new(2, 1, "ff_c", ["ff_b"])]).unwrap_err();
        assert_eq!(
            err,
            CornersError::DanglingInheritance {
                step: "ff_c".into(),
                face: "ff_b".into()
            }
        );
    }

    #[test]
    fn commutation_criterion() {
        assert!(commute_blowups(CenterRelation::YInsideZ));
        assert!(commute_blowups(CenterRelation::ZInsideY));
        assert!(commute_blowups(CenterRelation::Transversal));
        assert!(!commute_blowups(CenterRelation::CleanOnly));
    }
}
